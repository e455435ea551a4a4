#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "roughstat/common.hpp"

namespace roughstat {

/// A subset K of the positive integers given by a membership test.
///
/// The test must be pure and total on k >= 1; every routine in this library
/// may call it any number of times and from several threads.
class IndexPredicate {
 public:
  using Membership = std::function<bool(Index)>;

  IndexPredicate(Membership membership, std::string description);

  bool contains(Index k) const { return membership_(k); }
  bool operator()(Index k) const { return membership_(k); }
  const std::string& description() const { return description_; }

  IndexPredicate complement() const;

  static IndexPredicate all();
  static IndexPredicate none();

 private:
  Membership membership_;
  std::string description_;
};

IndexPredicate operator||(const IndexPredicate& a, const IndexPredicate& b);
IndexPredicate operator&&(const IndexPredicate& a, const IndexPredicate& b);

/// Exact ratio count/n, kept unreduced so reports show |K_n| and n verbatim.
struct Density {
  std::uint64_t count = 0;
  std::uint64_t n = 1;

  double value() const { return static_cast<double>(count) / static_cast<double>(n); }
  std::string to_string() const;  // "count/n"

  friend bool operator==(const Density& a, const Density& b);
  friend std::strong_ordering operator<=>(const Density& a, const Density& b);
};

/// Finite stand-in for a limit statement: densities are sampled at the
/// checkpoints and the last `stability_window` samples decide the verdict.
class AnalysisProtocol {
 public:
  AnalysisProtocol(std::vector<Index> checkpoints, double zero_tol, int stability_window,
                   double positive_tol);

  const std::vector<Index>& checkpoints() const { return checkpoints_; }
  double zero_tol() const { return zero_tol_; }
  int stability_window() const { return stability_window_; }
  double positive_tol() const { return positive_tol_; }
  Index max_checkpoint() const { return checkpoints_.back(); }

  /// Checkpoints 10^3..10^6, zero_tol 0.01, window 2, positive_tol 0.02.
  static AnalysisProtocol defaults();

 private:
  std::vector<Index> checkpoints_;
  double zero_tol_;
  int stability_window_;
  double positive_tol_;
};

struct CheckpointRecord {
  Index n = 0;
  std::uint64_t count = 0;
  Density density;
};

enum class DensityKind { Zero, Positive, Undecided };

std::string to_string(DensityKind kind);

struct DensityVerdict {
  DensityKind kind = DensityKind::Undecided;
  double estimate = 0.0;          // window mean, meaningful for Positive
  std::vector<Density> evidence;  // densities of the final window
};

struct DensityReport {
  std::vector<CheckpointRecord> checkpoints;
  DensityVerdict verdict;

  const CheckpointRecord& final_record() const { return checkpoints.back(); }
};

/// |{k : 1 <= k <= n, pred(k)}|.
std::uint64_t prefix_count(const IndexPredicate& pred, Index n);

/// prefix_count(pred, n) / n, exact.
Density empirical_density(const IndexPredicate& pred, Index n);

/// Applies the window rule to densities already sampled at the protocol
/// checkpoints (one per checkpoint, in order).
DensityVerdict decide(const std::vector<Density>& densities, const AnalysisProtocol& protocol);

DensityReport density_verdict(const IndexPredicate& pred, const AnalysisProtocol& protocol);

/// Density report plus the smallest members of K up to the final checkpoint.
struct DensityScan {
  DensityReport report;
  std::vector<Index> first_members;
};

/// One pass over 1..max_checkpoint; collects at most `max_members` members.
DensityScan scan_density(const IndexPredicate& pred, const AnalysisProtocol& protocol,
                         std::size_t max_members);

}  // namespace roughstat
