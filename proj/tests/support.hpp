#pragma once

// Independent oracles and generators shared by the test binaries. Nothing
// here calls into the library's evaluation paths.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roughstat/common.hpp"

namespace testsupport {

using roughstat::Index;

/// splitmix64; deterministic across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Multiple of 2^-bits in [-limit, limit]; sums and differences stay exact.
  double dyadic(int limit, int bits) {
    const auto span = static_cast<std::int64_t>(limit) << bits;
    const auto v = static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(2 * span + 1)) - span;
    return std::ldexp(static_cast<double>(v), -bits);
  }

 private:
  std::uint64_t state_;
};

/// Sieve of Eratosthenes count of primes <= n.
inline std::uint64_t sieve_prime_count(Index n) {
  std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
  std::uint64_t count = 0;
  for (Index i = 2; i <= n; ++i) {
    if (composite[static_cast<std::size_t>(i)]) continue;
    ++count;
    for (Index j = i * i; j <= n; j += i) composite[static_cast<std::size_t>(j)] = true;
  }
  return count;
}

inline bool is_prime_trial(Index k) {
  if (k < 2) return false;
  if (k % 2 == 0) return k == 2;
  if (k % 3 == 0) return k == 3;
  for (Index d = 5; d * d <= k; d += 6) {
    if (k % d == 0 || k % (d + 2) == 0) return false;
  }
  return true;
}

inline bool is_square_int(Index k) {
  auto r = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(k))));
  while (r * r > k) --r;
  while ((r + 1) * (r + 1) <= k) ++r;
  return r * r == k;
}

inline Index isqrt(Index n) {
  auto r = static_cast<Index>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline bool leading_digit_one(Index k) { return std::to_string(k).front() == '1'; }

/// The family f_k(x) = k on perfect squares, 1/(1 + x^k) elsewhere, via std::pow.
inline double example21(Index k, double x) {
  return is_square_int(k) ? static_cast<double>(k) : 1.0 / (1.0 + std::pow(x, static_cast<double>(k)));
}

/// Literal loop: |{k <= n : |x_k - target| >= threshold}|, errors count.
template <class Seq>
std::uint64_t brute_bad_count(const Seq& seq, Index n, double target, double threshold) {
  std::uint64_t count = 0;
  for (Index k = 1; k <= n; ++k) {
    const std::optional<double> v = seq(k);
    if (!v || !std::isfinite(*v) || std::abs(*v - target) >= threshold) ++count;
  }
  return count;
}

}  // namespace testsupport
