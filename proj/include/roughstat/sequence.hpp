#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "roughstat/common.hpp"

namespace roughstat {

/// A real sequence x_1, x_2, ... read through a pure accessor.
///
/// value_at returns std::nullopt for an evaluation error; +/-infinity are
/// ordinary values. Indices outside [1, max_index] are a caller error.
class ScalarSequenceView {
 public:
  using Accessor = std::function<std::optional<double>(Index)>;

  static constexpr Index unbounded = std::numeric_limits<Index>::max();

  explicit ScalarSequenceView(Accessor accessor, Index max_index = unbounded);

  std::optional<double> value_at(Index k) const { return accessor_(k); }
  std::optional<double> operator()(Index k) const { return accessor_(k); }
  Index max_index() const { return max_index_; }

  /// Evaluates 1..n once and returns a view backed by the cached values.
  ScalarSequenceView materialized(Index n) const;

  /// k -> c * x_k + shift, errors preserved.
  ScalarSequenceView affine(double c, double shift = 0.0) const;

 private:
  Accessor accessor_;
  Index max_index_;
};

/// |x - target| with errors and non-finite values mapped to +infinity.
double deviation(const std::optional<double>& x, double target);

}  // namespace roughstat
