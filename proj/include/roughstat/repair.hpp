#pragma once

#include <optional>
#include <string>
#include <vector>

#include "roughstat/density.hpp"
#include "roughstat/rough.hpp"
#include "roughstat/sequence.hpp"

namespace roughstat {

/// Closed interval [lo, hi] with lo < hi. Stored by endpoints so that
/// intersections nest exactly.
class Band {
 public:
  Band(double lo, double hi);
  static Band around(double center, double halfwidth);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double center() const { return lo_ + (hi_ - lo_) / 2.0; }
  double halfwidth() const { return (hi_ - lo_) / 2.0; }
  double height() const { return hi_ - lo_; }

  bool contains(double v) const { return lo_ <= v && v <= hi_; }
  bool contains(const Band& other) const { return lo_ <= other.lo_ && other.hi_ <= hi_; }

  /// Intersection, or nullopt when it is empty or a single point.
  std::optional<Band> intersect(const Band& other) const;

 private:
  double lo_;
  double hi_;
};

struct ChainStage {
  int m = 0;
  Band band;              // I_m
  Index anchor_index = 0;  // N_m
  Index threshold = 0;     // J_m, 0 until derive_thresholds runs
};

/// Nested bands I_1 ⊇ I_2 ⊇ ... with height(I_m) <= 2^(1-m), each holding
/// almost all sequence values. `seed` is the halfwidth-1 band every stage
/// is intersected with.
struct BandChain {
  Band seed{0.0, 1.0};
  Index seed_anchor = 0;
  std::vector<ChainStage> stages;
  double limit_estimate = 0.0;
  std::string stop_reason;  // empty when m_max stages were built

  bool thresholds_derived() const { return !stages.empty() && stages.front().threshold > 0; }
};

/// Stage m intersects the running chain with a band of halfwidth 2^-m around
/// value_at(N_m), for the first pool candidate N_m whose outside set gets a
/// Zero density verdict. Throws NotCauchyError if stage 1 (or the seed)
/// has no anchor.
BandChain build_band_chain(const ScalarSequenceView& seq, int m_max,
                           const AnalysisProtocol& protocol);

BandChain derive_thresholds(const ScalarSequenceView& seq, BandChain chain,
                            const AnalysisProtocol& protocol);

struct RepairResult {
  BandChain chain;
  IndexPredicate exceptional;  // indices where g_k was replaced by limit_estimate
  ScalarSequenceView repaired_view;
  DensityReport modification_density;
};

RepairResult repair_sequence(const ScalarSequenceView& seq, const BandChain& chain,
                             const AnalysisProtocol& protocol);

struct RepairVerification {
  bool modification_zero = false;        // (a)
  bool classical_convergence = false;    // (b)
  std::uint64_t exception_count = 0;     // p: k <= horizon with |g_k - f| >= eps_classical
  std::optional<Index> last_exception;
  bool rough_stat_accepts = false;       // (c)
  ConvergenceReport rough_report;
  /// modification count < n/m at every checkpoint n > J_m, for every stage m.
  bool threshold_bound_holds = false;

  bool passed() const {
    return modification_zero && classical_convergence && rough_stat_accepts &&
           threshold_bound_holds;
  }
};

RepairVerification verify_repair(const ScalarSequenceView& seq, const RepairResult& result,
                                 const AnalysisProtocol& protocol, double eps_classical);

}  // namespace roughstat
