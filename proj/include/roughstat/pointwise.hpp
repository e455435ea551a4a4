#pragma once

#include <span>
#include <vector>

#include "roughstat/dsl/program.hpp"
#include "roughstat/rough.hpp"

namespace roughstat {

struct PointReport {
  double x = 0.0;
  ConvergenceReport report;
};

struct PointwiseReport {
  std::vector<PointReport> points;
  Verdict overall = Verdict::Undecided;
};

/// Runs rough_stat_verdict at every grid point with target f(x) taken from
/// `target` (which must not use k). `r` and `eps` are shared by all points.
PointwiseReport pointwise_report(const dsl::SequenceProgram& program,
                                 const dsl::SequenceProgram& target, std::span<const double> grid,
                                 double r, double eps, const AnalysisProtocol& protocol,
                                 int jobs = 1);

/// Throws ProgramError when `target` uses k or is not numeric, ConfigError
/// when a grid point lies outside the program's domain hint.
void check_pointwise_inputs(const dsl::SequenceProgram& program,
                            const dsl::SequenceProgram& target, std::span<const double> grid);

struct LinearityInputs {
  dsl::SequenceProgram f;
  dsl::SequenceProgram g;
  dsl::SequenceProgram f_limit;
  dsl::SequenceProgram g_limit;
  double alpha = 1.0;
  double beta = 1.0;
  double r_f = 0.0;
  double r_g = 0.0;
  double eps = 0.01;
};

struct LinearityResult {
  bool premise_holds = false;  // f and g both accept; otherwise the check is vacuous
  double combined_r = 0.0;     // |alpha| r_f + |beta| r_g
  Verdict combined = Verdict::Undecided;
  /// Combination at max(r_f, r_g); only evaluated when |alpha| + |beta| <= 1.
  std::optional<Verdict> same_degree;

  bool passed() const {
    if (!premise_holds) return true;
    return combined == Verdict::Accept && (!same_degree || *same_degree == Verdict::Accept);
  }
};

/// Checks that alpha f + beta g converges to alpha f_lim + beta g_lim at
/// degree |alpha| r_f + |beta| r_g. The premises run at
/// eps / max(1, |alpha| + |beta|) so that the triangle inequality closes at eps.
LinearityResult linearity_check(const LinearityInputs& in, std::span<const double> grid,
                                const AnalysisProtocol& protocol, int jobs = 1);

}  // namespace roughstat
