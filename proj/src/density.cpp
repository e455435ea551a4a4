#include "roughstat/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace roughstat {

IndexPredicate::IndexPredicate(Membership membership, std::string description)
    : membership_(std::move(membership)), description_(std::move(description)) {}

IndexPredicate IndexPredicate::complement() const {
  return IndexPredicate([m = membership_](Index k) { return !m(k); }, "not (" + description_ + ")");
}

IndexPredicate IndexPredicate::all() {
  return IndexPredicate([](Index) { return true; }, "all");
}

IndexPredicate IndexPredicate::none() {
  return IndexPredicate([](Index) { return false; }, "none");
}

IndexPredicate operator||(const IndexPredicate& a, const IndexPredicate& b) {
  return IndexPredicate([a, b](Index k) { return a(k) || b(k); },
                        "(" + a.description() + ") or (" + b.description() + ")");
}

IndexPredicate operator&&(const IndexPredicate& a, const IndexPredicate& b) {
  return IndexPredicate([a, b](Index k) { return a(k) && b(k); },
                        "(" + a.description() + ") and (" + b.description() + ")");
}

std::string Density::to_string() const {
  return std::to_string(count) + "/" + std::to_string(n);
}

bool operator==(const Density& a, const Density& b) {
  return static_cast<unsigned __int128>(a.count) * b.n == static_cast<unsigned __int128>(b.count) * a.n;
}

std::strong_ordering operator<=>(const Density& a, const Density& b) {
  const auto lhs = static_cast<unsigned __int128>(a.count) * b.n;
  const auto rhs = static_cast<unsigned __int128>(b.count) * a.n;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

AnalysisProtocol::AnalysisProtocol(std::vector<Index> checkpoints, double zero_tol,
                                   int stability_window, double positive_tol)
    : checkpoints_(std::move(checkpoints)),
      zero_tol_(zero_tol),
      stability_window_(stability_window),
      positive_tol_(positive_tol) {
  if (checkpoints_.empty()) throw ConfigError("protocol needs at least one checkpoint");
  if (checkpoints_.front() < 1) throw ConfigError("checkpoints must be >= 1");
  for (std::size_t i = 1; i < checkpoints_.size(); ++i) {
    if (checkpoints_[i] <= checkpoints_[i - 1])
      throw ConfigError("checkpoints must be strictly increasing");
  }
  if (!(zero_tol_ > 0.0 && zero_tol_ < 1.0)) throw ConfigError("zero_tol must lie in (0, 1)");
  if (!(positive_tol_ > 0.0 && positive_tol_ < 1.0))
    throw ConfigError("positive_tol must lie in (0, 1)");
  if (stability_window_ < 1 || static_cast<std::size_t>(stability_window_) > checkpoints_.size())
    throw ConfigError("stability_window must lie in [1, number of checkpoints]");
}

AnalysisProtocol AnalysisProtocol::defaults() {
  return AnalysisProtocol({1000, 10000, 100000, 1000000}, 0.01, 2, 0.02);
}

std::string to_string(DensityKind kind) {
  switch (kind) {
    case DensityKind::Zero: return "zero";
    case DensityKind::Positive: return "positive";
    case DensityKind::Undecided: return "undecided";
  }
  return "undecided";
}

std::uint64_t prefix_count(const IndexPredicate& pred, Index n) {
  std::uint64_t count = 0;
  for (Index k = 1; k <= n; ++k) {
    if (pred(k)) ++count;
  }
  return count;
}

Density empirical_density(const IndexPredicate& pred, Index n) {
  if (n < 1) throw ConfigError("prefix length must be >= 1");
  return Density{prefix_count(pred, n), static_cast<std::uint64_t>(n)};
}

DensityVerdict decide(const std::vector<Density>& densities, const AnalysisProtocol& protocol) {
  const auto w = static_cast<std::size_t>(protocol.stability_window());
  DensityVerdict verdict;
  verdict.evidence.assign(densities.end() - static_cast<std::ptrdiff_t>(w), densities.end());

  const auto& window = verdict.evidence;
  const bool all_small = std::all_of(window.begin(), window.end(), [&](const Density& d) {
    return d.value() <= protocol.zero_tol();
  });
  if (all_small) {
    verdict.kind = DensityKind::Zero;
    return verdict;
  }
  const bool all_large = std::all_of(window.begin(), window.end(), [&](const Density& d) {
    return d.value() > protocol.zero_tol();
  });
  const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
  if (all_large && hi->value() - lo->value() <= protocol.positive_tol()) {
    double sum = 0.0;
    for (const auto& d : window) sum += d.value();
    verdict.kind = DensityKind::Positive;
    verdict.estimate = sum / static_cast<double>(window.size());
    return verdict;
  }
  verdict.kind = DensityKind::Undecided;
  return verdict;
}

DensityScan scan_density(const IndexPredicate& pred, const AnalysisProtocol& protocol,
                         std::size_t max_members) {
  DensityScan scan;
  std::vector<Density> densities;
  std::uint64_t count = 0;
  Index k = 1;
  for (const Index n : protocol.checkpoints()) {
    for (; k <= n; ++k) {
      if (pred(k)) {
        ++count;
        if (scan.first_members.size() < max_members) scan.first_members.push_back(k);
      }
    }
    const Density d{count, static_cast<std::uint64_t>(n)};
    scan.report.checkpoints.push_back({n, count, d});
    densities.push_back(d);
  }
  scan.report.verdict = decide(densities, protocol);
  return scan;
}

DensityReport density_verdict(const IndexPredicate& pred, const AnalysisProtocol& protocol) {
  return scan_density(pred, protocol, 0).report;
}

}  // namespace roughstat
