#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "roughstat/density.hpp"
#include "roughstat/sequence.hpp"

namespace roughstat {

/// Candidate limit `target`, roughness degree `r` and slack `eps`.
struct RoughParams {
  double target = 0.0;
  double r = 0.0;
  double eps = 0.01;

  void validate() const;  // throws ConfigError unless r >= 0, eps > 0, all finite
};

enum class Verdict { Accept, Reject, Undecided };

std::string to_string(Verdict v);

/// Zero -> accept, Positive -> reject, Undecided -> undecided.
Verdict verdict_from(DensityKind kind);

/// accept iff every verdict accepts, reject iff any rejects, else undecided.
Verdict combine(std::span<const Verdict> verdicts);

struct ConvergenceReport {
  RoughParams params;
  DensityReport density_report;  // of the bad index set
  Verdict verdict = Verdict::Undecided;
  std::vector<Index> witness_bad_indices;  // first <= 16 bad indices
};

inline constexpr std::size_t kWitnessLimit = 16;

/// {k : |x_k - target| >= r + eps}; errors and infinities are bad.
IndexPredicate bad_index_set(const ScalarSequenceView& seq, const RoughParams& params);

ConvergenceReport rough_stat_verdict(const ScalarSequenceView& seq, const RoughParams& params,
                                     const AnalysisProtocol& protocol);

/// Outcome of the "for all k >= N" test on 1..horizon.
struct ClassicalVerdict {
  bool accepted = false;
  Index start = 0;                  // smallest N that works (accepted only)
  std::optional<Index> witness;     // latest violating index, if any
  std::uint64_t violations = 0;     // number of violating k <= horizon
};

/// Accepts iff some N <= horizon/2 has |x_k - target| < r + eps for all N <= k <= horizon.
ClassicalVerdict classical_rough_verdict(const ScalarSequenceView& seq, const RoughParams& params,
                                         Index horizon);

struct RoughnessEstimate {
  double r_hat = 0.0;
  std::pair<double, double> bracket;  // quantiles at tail_delta and tail_delta/2
  double tail_delta = 0.0;
  std::vector<std::pair<Index, double>> per_checkpoint;
  std::vector<Index> tail_indices;  // first <= 16 k with deviation > r_hat
  /// rough_stat_verdict at r = r_hat * (1 + margin); expected not to reject.
  Verdict cross_check = Verdict::Undecided;
};

/// Smallest t with |{k <= n : dev_k > t}| <= delta * n. Non-finite deviations
/// count as +infinity; the result may be +infinity.
double tail_quantile(std::span<const double> deviations, double delta);

RoughnessEstimate minimal_roughness(const ScalarSequenceView& seq, double target,
                                    const AnalysisProtocol& protocol, double tail_delta);

struct CandidateResult {
  Index n = 0;
  double anchor_value = 0.0;
  DensityReport density_report;
};

struct CauchyReport {
  double r = 0.0;
  double eps = 0.0;
  std::vector<Index> candidates_tried;
  std::optional<Index> witness_n;
  Verdict verdict = Verdict::Undecided;
  std::vector<CandidateResult> per_candidate;
};

/// floor(n/4), floor(n/2), floor(3n/4), then 5 splitmix64 draws seeded with n,
/// duplicates removed.
std::vector<Index> default_candidates(Index n_max);

CauchyReport rough_cauchy_verdict(const ScalarSequenceView& seq, double r, double eps,
                                  std::span<const Index> candidates,
                                  const AnalysisProtocol& protocol);

CauchyReport rough_cauchy_verdict(const ScalarSequenceView& seq, double r, double eps,
                                  const AnalysisProtocol& protocol);

}  // namespace roughstat
