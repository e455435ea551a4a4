#include "roughstat/sequence.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace roughstat {

ScalarSequenceView::ScalarSequenceView(Accessor accessor, Index max_index)
    : accessor_(std::move(accessor)), max_index_(max_index) {
  if (max_index_ < 1) throw ConfigError("sequence view needs max_index >= 1");
}

ScalarSequenceView ScalarSequenceView::materialized(Index n) const {
  if (n > max_index_) {
    throw ConfigError("cannot materialize " + std::to_string(n) + " terms of a view bounded at " +
                      std::to_string(max_index_));
  }
  auto cache = std::make_shared<std::vector<std::optional<double>>>();
  cache->reserve(static_cast<std::size_t>(n));
  for (Index k = 1; k <= n; ++k) cache->push_back(accessor_(k));
  return ScalarSequenceView(
      [cache](Index k) { return (*cache)[static_cast<std::size_t>(k - 1)]; }, n);
}

ScalarSequenceView ScalarSequenceView::affine(double c, double shift) const {
  return ScalarSequenceView(
      [inner = accessor_, c, shift](Index k) -> std::optional<double> {
        const auto v = inner(k);
        if (!v) return std::nullopt;
        return c * *v + shift;
      },
      max_index_);
}

double deviation(const std::optional<double>& x, double target) {
  if (!x || !std::isfinite(*x) || !std::isfinite(target))
    return std::numeric_limits<double>::infinity();
  return std::abs(*x - target);
}

}  // namespace roughstat
