#include "roughstat/rough.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace roughstat {
namespace {

constexpr double kCrossCheckMargin = 0.01;

void require_within(const ScalarSequenceView& seq, Index n) {
  if (n > seq.max_index()) {
    throw ConfigError("checkpoint " + std::to_string(n) + " exceeds the sequence prefix budget " +
                      std::to_string(seq.max_index()));
  }
}

std::string describe(const RoughParams& p) {
  std::ostringstream out;
  out << "|x_k - " << p.target << "| >= " << p.r << " + " << p.eps;
  return out.str();
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

void RoughParams::validate() const {
  if (!std::isfinite(target)) throw ConfigError("target must be finite");
  if (!(std::isfinite(r) && r >= 0.0)) throw ConfigError("roughness degree r must be >= 0");
  if (!(std::isfinite(eps) && eps > 0.0)) throw ConfigError("eps must be > 0");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Accept: return "accept";
    case Verdict::Reject: return "reject";
    case Verdict::Undecided: return "undecided";
  }
  return "undecided";
}

Verdict verdict_from(DensityKind kind) {
  switch (kind) {
    case DensityKind::Zero: return Verdict::Accept;
    case DensityKind::Positive: return Verdict::Reject;
    case DensityKind::Undecided: return Verdict::Undecided;
  }
  return Verdict::Undecided;
}

Verdict combine(std::span<const Verdict> verdicts) {
  bool all_accept = true;
  for (const Verdict v : verdicts) {
    if (v == Verdict::Reject) return Verdict::Reject;
    if (v != Verdict::Accept) all_accept = false;
  }
  return all_accept ? Verdict::Accept : Verdict::Undecided;
}

IndexPredicate bad_index_set(const ScalarSequenceView& seq, const RoughParams& params) {
  const double threshold = params.r + params.eps;
  return IndexPredicate(
      [seq, target = params.target, threshold](Index k) {
        return deviation(seq.value_at(k), target) >= threshold;
      },
      describe(params));
}

ConvergenceReport rough_stat_verdict(const ScalarSequenceView& seq, const RoughParams& params,
                                     const AnalysisProtocol& protocol) {
  params.validate();
  require_within(seq, protocol.max_checkpoint());
  auto scan = scan_density(bad_index_set(seq, params), protocol, kWitnessLimit);
  ConvergenceReport report;
  report.params = params;
  report.verdict = verdict_from(scan.report.verdict.kind);
  report.density_report = std::move(scan.report);
  report.witness_bad_indices = std::move(scan.first_members);
  return report;
}

ClassicalVerdict classical_rough_verdict(const ScalarSequenceView& seq, const RoughParams& params,
                                         Index horizon) {
  params.validate();
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  require_within(seq, horizon);
  const double threshold = params.r + params.eps;
  ClassicalVerdict result;
  for (Index k = 1; k <= horizon; ++k) {
    if (deviation(seq.value_at(k), params.target) >= threshold) {
      result.witness = k;
      ++result.violations;
    }
  }
  const Index start = result.witness ? *result.witness + 1 : 1;
  result.accepted = start <= horizon / 2;
  if (result.accepted) result.start = start;
  return result;
}

double tail_quantile(std::span<const double> deviations, double delta) {
  const auto n = deviations.size();
  if (n == 0) return 0.0;
  // At most `allowed` deviations may exceed the answer, so it is the
  // (allowed + 1)-th largest deviation.
  const auto allowed = static_cast<std::size_t>(std::floor(delta * static_cast<double>(n)));
  if (allowed >= n) return 0.0;
  std::vector<double> work(deviations.begin(), deviations.end());
  auto nth = work.begin() + static_cast<std::ptrdiff_t>(allowed);
  std::nth_element(work.begin(), nth, work.end(), std::greater<>());
  return std::max(0.0, *nth);
}

RoughnessEstimate minimal_roughness(const ScalarSequenceView& seq, double target,
                                    const AnalysisProtocol& protocol, double tail_delta) {
  if (!(tail_delta > 0.0 && tail_delta < 1.0)) throw ConfigError("tail_delta must lie in (0, 1)");
  if (!std::isfinite(target)) throw ConfigError("target must be finite");
  const Index n_max = protocol.max_checkpoint();
  require_within(seq, n_max);

  std::vector<double> deviations;
  deviations.reserve(static_cast<std::size_t>(n_max));
  bool any_finite = false;
  for (Index k = 1; k <= n_max; ++k) {
    const double d = deviation(seq.value_at(k), target);
    any_finite = any_finite || std::isfinite(d);
    deviations.push_back(d);
  }
  if (!any_finite) throw EstimationError("all deviations are non-finite");

  RoughnessEstimate estimate;
  estimate.tail_delta = tail_delta;
  const std::span<const double> all(deviations);
  for (const Index n : protocol.checkpoints()) {
    estimate.per_checkpoint.emplace_back(
        n, tail_quantile(all.first(static_cast<std::size_t>(n)), tail_delta));
  }
  estimate.r_hat = estimate.per_checkpoint.back().second;
  for (std::size_t i = 0; i < deviations.size() && estimate.tail_indices.size() < kWitnessLimit;
       ++i) {
    if (deviations[i] > estimate.r_hat) estimate.tail_indices.push_back(static_cast<Index>(i) + 1);
  }
  const double upper = tail_quantile(all, tail_delta / 2.0);
  estimate.bracket = {std::min(estimate.r_hat, upper), std::max(estimate.r_hat, upper)};

  if (std::isfinite(estimate.r_hat)) {
    RoughParams check{target, estimate.r_hat * (1.0 + kCrossCheckMargin),
                      kCrossCheckMargin * std::max(estimate.r_hat, 1.0)};
    estimate.cross_check = rough_stat_verdict(seq, check, protocol).verdict;
  }
  return estimate;
}

std::vector<Index> default_candidates(Index n_max) {
  if (n_max < 1) throw ConfigError("candidate pool needs n_max >= 1");
  std::vector<Index> pool;
  auto add = [&pool](Index c) {
    c = std::max<Index>(c, 1);
    if (std::find(pool.begin(), pool.end(), c) == pool.end()) pool.push_back(c);
  };
  add(n_max / 4);
  add(n_max / 2);
  add(static_cast<Index>((static_cast<__int128>(n_max) * 3) / 4));
  std::uint64_t state = static_cast<std::uint64_t>(n_max);
  for (int i = 0; i < 5; ++i) {
    add(static_cast<Index>(splitmix64(state) % static_cast<std::uint64_t>(n_max)) + 1);
  }
  return pool;
}

CauchyReport rough_cauchy_verdict(const ScalarSequenceView& seq, double r, double eps,
                                  std::span<const Index> candidates,
                                  const AnalysisProtocol& protocol) {
  if (!(std::isfinite(r) && r >= 0.0)) throw ConfigError("roughness degree r must be >= 0");
  if (!(std::isfinite(eps) && eps > 0.0)) throw ConfigError("eps must be > 0");
  if (candidates.empty()) throw ConfigError("Cauchy test needs at least one candidate index");
  require_within(seq, protocol.max_checkpoint());

  CauchyReport report;
  report.r = r;
  report.eps = eps;
  for (const Index n : candidates) {
    if (n < 1 || n > seq.max_index()) {
      throw ConfigError("candidate index " + std::to_string(n) + " outside the sequence");
    }
    const auto anchor = seq.value_at(n);
    if (!anchor || !std::isfinite(*anchor)) continue;
    report.candidates_tried.push_back(n);
    CandidateResult result;
    result.n = n;
    result.anchor_value = *anchor;
    result.density_report = density_verdict(bad_index_set(seq, {*anchor, r, eps}), protocol);
    const DensityKind kind = result.density_report.verdict.kind;
    report.per_candidate.push_back(std::move(result));
    if (kind == DensityKind::Zero) {
      report.witness_n = n;
      report.verdict = Verdict::Accept;
      return report;
    }
  }
  if (report.candidates_tried.empty())
    throw CandidateError("no candidate index has a finite value");
  const bool all_positive =
      std::all_of(report.per_candidate.begin(), report.per_candidate.end(), [](const auto& c) {
        return c.density_report.verdict.kind == DensityKind::Positive;
      });
  report.verdict = all_positive ? Verdict::Reject : Verdict::Undecided;
  return report;
}

CauchyReport rough_cauchy_verdict(const ScalarSequenceView& seq, double r, double eps,
                                  const AnalysisProtocol& protocol) {
  const auto pool = default_candidates(protocol.max_checkpoint());
  return rough_cauchy_verdict(seq, r, eps, pool, protocol);
}

}  // namespace roughstat
