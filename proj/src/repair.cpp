#include "roughstat/repair.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace roughstat {
namespace {

IndexPredicate outside(const ScalarSequenceView& seq, const Band& band) {
  return IndexPredicate(
      [seq, band](Index k) {
        const auto v = seq.value_at(k);
        return !v || !band.contains(*v);
      },
      "outside [" + std::to_string(band.lo()) + ", " + std::to_string(band.hi()) + "]");
}

struct Anchored {
  Band band;
  Index anchor;
};

// First pool candidate whose band (intersected with `within`) holds almost
// all values.
std::optional<Anchored> find_anchor(const ScalarSequenceView& seq, double halfwidth,
                                    const std::optional<Band>& within,
                                    const std::vector<Index>& pool,
                                    const AnalysisProtocol& protocol) {
  for (const Index n : pool) {
    const auto v = seq.value_at(n);
    if (!v || !std::isfinite(*v)) continue;
    if (!(*v - halfwidth < *v + halfwidth)) continue;  // halfwidth below the value's ulp
    std::optional<Band> band = Band::around(*v, halfwidth);
    if (within) band = within->intersect(*band);
    if (!band) continue;
    // height <= 2 * halfwidth must survive rounding of center +/- halfwidth
    if (band->height() > 2.0 * halfwidth) {
      double lo = band->lo();
      while (band->hi() - lo > 2.0 * halfwidth) lo = std::nextafter(lo, band->hi());
      band = Band(lo, band->hi());
    }
    if (density_verdict(outside(seq, *band), protocol).verdict.kind == DensityKind::Zero) {
      return Anchored{*band, n};
    }
  }
  return std::nullopt;
}

// Stage whose window (J_m, J_{m+1}] holds k, i.e. the last m with J_m < k.
const ChainStage* stage_for(const std::vector<ChainStage>& stages, Index k) {
  auto it = std::partition_point(stages.begin(), stages.end(),
                                 [k](const ChainStage& s) { return s.threshold < k; });
  if (it == stages.begin()) return nullptr;
  return &*std::prev(it);
}

}  // namespace

Band::Band(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
    throw ConfigError("band needs finite endpoints with lo < hi");
}

Band Band::around(double center, double halfwidth) {
  return Band(center - halfwidth, center + halfwidth);
}

std::optional<Band> Band::intersect(const Band& other) const {
  const double lo = std::max(lo_, other.lo_);
  const double hi = std::min(hi_, other.hi_);
  if (!(lo < hi)) return std::nullopt;
  return Band(lo, hi);
}

BandChain build_band_chain(const ScalarSequenceView& seq, int m_max,
                           const AnalysisProtocol& protocol) {
  if (m_max < 1) throw ConfigError("m_max must be >= 1");
  if (m_max > 60) throw ConfigError("m_max above 60 is below double resolution");
  const Index n_max = protocol.max_checkpoint();
  if (n_max > seq.max_index()) {
    throw ConfigError("checkpoint " + std::to_string(n_max) + " exceeds the sequence prefix budget");
  }
  const auto cached = seq.materialized(n_max);
  const auto pool = default_candidates(n_max);

  const auto seed = find_anchor(cached, 1.0, std::nullopt, pool, protocol);
  if (!seed) throw NotCauchyError("no anchor band of halfwidth 1 holds almost all values");

  BandChain chain;
  chain.seed = seed->band;
  chain.seed_anchor = seed->anchor;
  Band running = seed->band;
  for (int m = 1; m <= m_max; ++m) {
    const double halfwidth = std::ldexp(1.0, -m);
    const auto stage = find_anchor(cached, halfwidth, running, pool, protocol);
    if (!stage) {
      if (m == 1) throw NotCauchyError("no anchor band of halfwidth 1/2 holds almost all values");
      chain.stop_reason = "no anchor at stage " + std::to_string(m);
      break;
    }
    running = stage->band;
    chain.stages.push_back({m, stage->band, stage->anchor, 0});
  }
  chain.limit_estimate = chain.stages.back().band.center();
  return chain;
}

BandChain derive_thresholds(const ScalarSequenceView& seq, BandChain chain,
                            const AnalysisProtocol& protocol) {
  if (chain.stages.empty()) throw ConfigError("band chain has no stages");
  const auto& checkpoints = protocol.checkpoints();
  if (protocol.max_checkpoint() > seq.max_index()) {
    throw ConfigError("checkpoint exceeds the sequence prefix budget");
  }
  const auto cached = seq.materialized(protocol.max_checkpoint());

  Index previous = 0;
  std::size_t kept = 0;
  for (auto& stage : chain.stages) {
    const auto report = density_verdict(outside(cached, stage.band), protocol);
    // Smallest checkpoint from which every later density is < 1/m.
    std::optional<Index> threshold;
    for (std::size_t i = checkpoints.size(); i-- > 0;) {
      const auto& rec = report.checkpoints[i];
      if (static_cast<unsigned __int128>(rec.count) * static_cast<unsigned>(stage.m) >=
          static_cast<unsigned __int128>(rec.n)) {
        break;
      }
      threshold = rec.n;
    }
    if (!threshold) break;
    stage.threshold = std::max(*threshold, previous + 1);
    previous = stage.threshold;
    ++kept;
  }
  if (kept == 0) throw ThresholdError("no checkpoint brings the stage-1 outside density below 1");
  if (kept < chain.stages.size()) {
    chain.stop_reason = "no threshold for stage " + std::to_string(chain.stages[kept].m);
    chain.stages.erase(chain.stages.begin() + static_cast<std::ptrdiff_t>(kept), chain.stages.end());
    chain.limit_estimate = chain.stages.back().band.center();
  }
  return chain;
}

RepairResult repair_sequence(const ScalarSequenceView& seq, const BandChain& chain,
                             const AnalysisProtocol& protocol) {
  if (!chain.thresholds_derived()) throw ConfigError("band chain thresholds are not derived");
  auto stages = std::make_shared<const std::vector<ChainStage>>(chain.stages);
  const double limit = chain.limit_estimate;

  auto is_exceptional = [seq, stages](Index k) {
    const ChainStage* stage = stage_for(*stages, k);
    if (stage == nullptr) return false;
    const auto v = seq.value_at(k);
    return !v || !stage->band.contains(*v);
  };

  IndexPredicate exceptional(is_exceptional, "replaced indices");
  ScalarSequenceView repaired(
      [seq, is_exceptional, limit](Index k) -> std::optional<double> {
        if (is_exceptional(k)) return limit;
        return seq.value_at(k);
      },
      seq.max_index());

  auto modification = density_verdict(exceptional, protocol);
  return RepairResult{chain, std::move(exceptional), std::move(repaired), std::move(modification)};
}

RepairVerification verify_repair(const ScalarSequenceView& seq, const RepairResult& result,
                                 const AnalysisProtocol& protocol, double eps_classical) {
  if (!(std::isfinite(eps_classical) && eps_classical > 0.0))
    throw ConfigError("eps_classical must be > 0");
  RepairVerification check;
  check.modification_zero = result.modification_density.verdict.kind == DensityKind::Zero;

  const double limit = result.chain.limit_estimate;
  const auto classical =
      classical_rough_verdict(result.repaired_view, {limit, 0.0, eps_classical},
                              protocol.max_checkpoint());
  check.classical_convergence = classical.accepted;
  check.exception_count = classical.violations;
  check.last_exception = classical.witness;

  const double height = result.chain.stages.back().band.height();
  check.rough_report = rough_stat_verdict(seq, {limit, height, eps_classical}, protocol);
  check.rough_stat_accepts = check.rough_report.verdict == Verdict::Accept;

  check.threshold_bound_holds = true;
  for (const auto& rec : result.modification_density.checkpoints) {
    for (const auto& stage : result.chain.stages) {
      if (rec.n <= stage.threshold) continue;
      if (static_cast<unsigned __int128>(rec.count) * static_cast<unsigned>(stage.m) >=
          static_cast<unsigned __int128>(rec.n)) {
        check.threshold_bound_holds = false;
      }
    }
  }
  return check;
}

}  // namespace roughstat
