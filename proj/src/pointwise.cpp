#include "roughstat/pointwise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "roughstat/parallel.hpp"

namespace roughstat {

void check_pointwise_inputs(const dsl::SequenceProgram& program,
                            const dsl::SequenceProgram& target, std::span<const double> grid) {
  if (program.type() != dsl::ValueType::Number)
    throw dsl::ProgramError("sequence program must be numeric");
  if (target.type() != dsl::ValueType::Number)
    throw dsl::ProgramError("target program must be numeric");
  if (target.uses_index()) throw dsl::ProgramError("target program must not reference k");
  if (grid.empty()) throw ConfigError("grid must not be empty");
  if (const auto& domain = program.domain_hint()) {
    for (const double x : grid) {
      if (!domain->contains(x)) {
        throw ConfigError("grid point " + std::to_string(x) + " lies outside the program domain");
      }
    }
  }
}

PointwiseReport pointwise_report(const dsl::SequenceProgram& program,
                                 const dsl::SequenceProgram& target, std::span<const double> grid,
                                 double r, double eps, const AnalysisProtocol& protocol,
                                 int jobs) {
  check_pointwise_inputs(program, target, grid);
  PointwiseReport out;
  out.points = parallel_map(grid.size(), jobs, [&](std::size_t i) {
    const double x = grid[i];
    const auto limit = target.evaluate(1, x);
    // A target that fails to evaluate makes every index bad.
    const double xi = limit.ok() && std::isfinite(limit.value())
                          ? limit.value()
                          : std::numeric_limits<double>::infinity();
    RoughParams params{0.0, r, eps};
    params.validate();
    params.target = xi;
    ConvergenceReport report;
    if (std::isfinite(xi)) {
      report = rough_stat_verdict(program.at(x), params, protocol);
    } else {
      report = rough_stat_verdict(
          ScalarSequenceView([](Index) { return std::optional<double>(); }), {0.0, r, eps},
          protocol);
      report.params.target = xi;
    }
    return PointReport{x, std::move(report)};
  });
  std::vector<Verdict> verdicts;
  for (const auto& p : out.points) verdicts.push_back(p.report.verdict);
  out.overall = combine(verdicts);
  return out;
}

LinearityResult linearity_check(const LinearityInputs& in, std::span<const double> grid,
                                const AnalysisProtocol& protocol, int jobs) {
  const double weight = std::abs(in.alpha) + std::abs(in.beta);
  const double premise_eps = in.eps / std::max(1.0, weight);

  LinearityResult result;
  result.premise_holds =
      pointwise_report(in.f, in.f_limit, grid, in.r_f, premise_eps, protocol, jobs).overall ==
          Verdict::Accept &&
      pointwise_report(in.g, in.g_limit, grid, in.r_g, premise_eps, protocol, jobs).overall ==
          Verdict::Accept;
  if (!result.premise_holds) return result;

  const auto combined = dsl::linear_combination(in.alpha, in.f, in.beta, in.g);
  const auto combined_limit = dsl::linear_combination(in.alpha, in.f_limit, in.beta, in.g_limit);
  result.combined_r = std::abs(in.alpha) * in.r_f + std::abs(in.beta) * in.r_g;
  result.combined =
      pointwise_report(combined, combined_limit, grid, result.combined_r, in.eps, protocol, jobs)
          .overall;
  if (weight <= 1.0) {
    result.same_degree = pointwise_report(combined, combined_limit, grid,
                                          std::max(in.r_f, in.r_g), in.eps, protocol, jobs)
                             .overall;
  }
  return result;
}

}  // namespace roughstat
