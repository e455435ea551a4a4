#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "roughstat/dsl/parser.hpp"
#include "roughstat/pointwise.hpp"
#include "roughstat/rough.hpp"
#include "support.hpp"

using namespace roughstat;
using testsupport::Rng;

namespace {

ScalarSequenceView seq_of(std::function<double(Index)> f) {
  return ScalarSequenceView([f](Index k) -> std::optional<double> { return f(k); });
}

ScalarSequenceView alternating() {
  return seq_of([](Index k) { return k % 2 == 0 ? 1.0 : -1.0; });
}

ScalarSequenceView example21_at(double x) { return dsl::builtin_program("example21").at(x); }

/// Dyadic noise on a sparse random index set, dyadic base value elsewhere.
ScalarSequenceView sparse_noise(std::uint64_t salt, double base, double rate) {
  return ScalarSequenceView([=](Index k) -> std::optional<double> {
    Rng r(salt ^ (static_cast<std::uint64_t>(k) * 0xD1B54A32D192ED03ULL));
    if (r.uniform() < rate) return r.dyadic(64, 8);
    return base + r.dyadic(1, 8) / 4.0;
  });
}

const AnalysisProtocol kSmall({1000, 10'000}, 0.01, 2, 0.02);
const AnalysisProtocol kMid({1000, 10'000, 100'000}, 0.01, 2, 0.02);

}  // namespace

TEST_CASE("bad set of the square-spiked family at the first hundred indices") {
  const auto bad = bad_index_set(example21_at(0.5), {0.0, 1.0, 0.01});
  std::vector<Index> members;
  for (Index k = 1; k <= 100; ++k) {
    if (bad(k)) members.push_back(k);
  }
  std::vector<Index> oracle;
  for (Index k = 1; k <= 100; ++k) {
    if (std::abs(testsupport::example21(k, 0.5)) >= 1.01) oracle.push_back(k);
  }
  CHECK(members == oracle);
  CHECK(members == std::vector<Index>{4, 9, 16, 25, 36, 49, 64, 81, 100});
}

TEST_CASE("rough statistical verdicts on reference sequences") {
  const auto protocol = AnalysisProtocol::defaults();
  SUBCASE("square spikes accept at degree 1") {
    const auto rep = rough_stat_verdict(example21_at(0.5), {0.0, 1.0, 0.01}, protocol);
    CHECK(rep.verdict == Verdict::Accept);
    CHECK(rep.density_report.checkpoints[3].count == 999);
    CHECK(rep.witness_bad_indices.front() == 4);
    CHECK(rep.witness_bad_indices.size() == kWitnessLimit);
  }
  SUBCASE("alternating signs accept at degree 1 and reject at 1/2") {
    CHECK(rough_stat_verdict(alternating(), {0.0, 1.0, 0.01}, protocol).verdict == Verdict::Accept);
    CHECK(rough_stat_verdict(alternating(), {0.0, 0.5, 0.01}, protocol).verdict == Verdict::Reject);
  }
  SUBCASE("errors count as bad") {
    const ScalarSequenceView broken([](Index) -> std::optional<double> { return std::nullopt; });
    CHECK(rough_stat_verdict(broken, {0.0, 100.0, 0.01}, protocol).verdict == Verdict::Reject);
  }
  SUBCASE("prefix budget") {
    const ScalarSequenceView short_seq([](Index) -> std::optional<double> { return 0.0; }, 500);
    CHECK_THROWS_AS(rough_stat_verdict(short_seq, {0.0, 0.0, 0.01}, protocol), ConfigError);
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(rough_stat_verdict(alternating(), {0.0, -1.0, 0.01}, protocol), ConfigError);
    CHECK_THROWS_AS(rough_stat_verdict(alternating(), {0.0, 1.0, 0.0}, protocol), ConfigError);
  }
}

TEST_CASE("classical rough verdict") {
  SUBCASE("harmonic sequence settles after index 100") {
    const auto v = classical_rough_verdict(seq_of([](Index k) { return 1.0 / k; }),
                                           {0.0, 0.0, 0.01}, 10'000);
    CHECK(v.accepted);
    CHECK(v.start == 101);
    CHECK(v.witness == 100);
    CHECK(v.violations == 100);
  }
  SUBCASE("square spikes never settle; last violation is the horizon itself") {
    const auto v = classical_rough_verdict(example21_at(0.5), {0.0, 1.0, 0.01}, 10'000);
    CHECK_FALSE(v.accepted);
    CHECK(v.witness == 10'000);
    CHECK(v.violations == 99);
  }
  SUBCASE("alternating signs at degree 1") {
    const auto v = classical_rough_verdict(alternating(), {0.0, 1.0, 0.01}, 1000);
    CHECK(v.accepted);
    CHECK(v.start == 1);
    CHECK_FALSE(v.witness.has_value());
  }
}

TEST_CASE("tail quantile") {
  const std::vector<double> devs{5, 1, 4, 2, 3, 0, 0, 0, 0, 0};
  CHECK(tail_quantile(devs, 0.1) == 4.0);
  CHECK(tail_quantile(devs, 0.2) == 3.0);
  CHECK(tail_quantile(devs, 0.05) == 5.0);
}

TEST_CASE("minimal roughness estimates") {
  const auto protocol = AnalysisProtocol::defaults();
  SUBCASE("alternating signs") {
    const auto est = minimal_roughness(alternating(), 0.0, protocol, 0.01);
    CHECK(est.r_hat == 1.0);
    CHECK(est.cross_check != Verdict::Reject);
  }
  SUBCASE("square spikes") {
    const auto est = minimal_roughness(example21_at(0.5), 0.0, protocol, 0.01);
    CHECK(est.r_hat >= 0.98);
    CHECK(est.r_hat <= 1.0);
    CHECK(est.bracket.first <= est.bracket.second);
    CHECK(est.cross_check == Verdict::Accept);
    REQUIRE_FALSE(est.tail_indices.empty());
    CHECK(est.tail_indices.front() == 4);
  }
  SUBCASE("constant") {
    const auto est = minimal_roughness(seq_of([](Index) { return 3.0; }), 3.0, protocol, 0.01);
    CHECK(est.r_hat == 0.0);
  }
  SUBCASE("all deviations non-finite") {
    const ScalarSequenceView broken([](Index) -> std::optional<double> { return std::nullopt; });
    CHECK_THROWS_AS(minimal_roughness(broken, 0.0, protocol, 0.01), EstimationError);
  }
}

TEST_CASE("default candidate pool") {
  const auto pool = default_candidates(1'000'000);
  REQUIRE(pool.size() >= 3);
  CHECK(pool.size() <= 8);
  CHECK(pool[0] == 250'000);
  CHECK(pool[1] == 500'000);
  CHECK(pool[2] == 750'000);
  CHECK(pool == default_candidates(1'000'000));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    CHECK(pool[i] >= 1);
    CHECK(pool[i] <= 1'000'000);
    for (std::size_t j = 0; j < i; ++j) CHECK(pool[i] != pool[j]);
  }
}

TEST_CASE("rough Cauchy verdicts") {
  const auto protocol = AnalysisProtocol::defaults();
  SUBCASE("square spikes: the square candidate fails, the next one witnesses") {
    const auto rep = rough_cauchy_verdict(example21_at(0.5), 0.0, 0.01, protocol);
    CHECK(rep.verdict == Verdict::Accept);
    CHECK(rep.witness_n == 500'000);
    REQUIRE(rep.per_candidate.size() == 2);
    CHECK(rep.per_candidate[0].density_report.verdict.kind == DensityKind::Positive);
  }
  SUBCASE("alternating signs: degree 2 accepts, degree 1 rejects") {
    CHECK(rough_cauchy_verdict(alternating(), 2.0, 0.01, protocol).verdict == Verdict::Accept);
    const auto rej = rough_cauchy_verdict(alternating(), 1.0, 0.01, protocol);
    CHECK(rej.verdict == Verdict::Reject);
    CHECK(rej.candidates_tried.size() == default_candidates(1'000'000).size());
  }
  SUBCASE("no finite candidate") {
    const ScalarSequenceView broken([](Index) -> std::optional<double> { return std::nullopt; });
    CHECK_THROWS_AS(rough_cauchy_verdict(broken, 0.0, 0.01, protocol), CandidateError);
  }
  SUBCASE("explicit candidates") {
    const std::vector<Index> cands{100, 400};
    const auto rep = rough_cauchy_verdict(example21_at(0.5), 0.0, 0.01, cands, protocol);
    CHECK(rep.verdict == Verdict::Reject);
    const std::vector<Index> sq_then_not{100, 101};
    CHECK(rough_cauchy_verdict(example21_at(0.5), 0.0, 0.01, sq_then_not, protocol).witness_n ==
          101);
  }
}

TEST_CASE("property: checkpoint counts match a brute-force oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto seq = sparse_noise(rng.next(), rng.dyadic(4, 4), rng.uniform() * 0.2);
    const RoughParams p{rng.dyadic(4, 4), std::abs(rng.dyadic(2, 6)), 0.01 + rng.uniform()};
    const auto rep = rough_stat_verdict(seq, p, kSmall);
    for (const auto& rec : rep.density_report.checkpoints) {
      CHECK(rec.count == testsupport::brute_bad_count(seq, rec.n, p.target, p.r + p.eps));
    }
  }
}

TEST_CASE("property: larger degree or slack never adds bad indices") {
  Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const auto seq = sparse_noise(rng.next(), 0.0, rng.uniform() * 0.1);
    const double r1 = std::abs(rng.dyadic(2, 6));
    const double r2 = r1 + std::abs(rng.dyadic(1, 6));
    const double e1 = 0.01 + rng.uniform() * 0.1;
    const double e2 = e1 + rng.uniform() * 0.1;
    const auto a = rough_stat_verdict(seq, {0.0, r1, e1}, kSmall);
    const auto b = rough_stat_verdict(seq, {0.0, r2, e1}, kSmall);
    const auto c = rough_stat_verdict(seq, {0.0, r1, e2}, kSmall);
    for (std::size_t i = 0; i < a.density_report.checkpoints.size(); ++i) {
      CHECK(b.density_report.checkpoints[i].count <= a.density_report.checkpoints[i].count);
      CHECK(c.density_report.checkpoints[i].count <= a.density_report.checkpoints[i].count);
    }
    if (a.verdict == Verdict::Accept) {
      CHECK(b.verdict == Verdict::Accept);
      CHECK(c.verdict == Verdict::Accept);
    }
  }
}

TEST_CASE("property: power-of-two scaling preserves bad sets exactly") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto seq = sparse_noise(rng.next(), rng.dyadic(4, 4), rng.uniform() * 0.3);
    const double c = std::ldexp(rng.below(2) ? 1.0 : -1.0, rng.below(9) - 4);
    const RoughParams p{rng.dyadic(4, 4), std::abs(rng.dyadic(2, 6)), std::ldexp(1.0, -rng.below(8))};
    const RoughParams q{c * p.target, std::abs(c) * p.r, std::abs(c) * p.eps};
    const auto a = rough_stat_verdict(seq, p, kSmall);
    const auto b = rough_stat_verdict(seq.affine(c), q, kSmall);
    CHECK(a.verdict == b.verdict);
    CHECK(a.witness_bad_indices == b.witness_bad_indices);
    for (std::size_t i = 0; i < a.density_report.checkpoints.size(); ++i) {
      CHECK(a.density_report.checkpoints[i].count == b.density_report.checkpoints[i].count);
    }
  }
}

TEST_CASE("property: dyadic translation preserves bad sets exactly") {
  Rng rng(24);
  for (int trial = 0; trial < 100; ++trial) {
    const auto seq = sparse_noise(rng.next(), rng.dyadic(4, 4), rng.uniform() * 0.3);
    const double s = rng.dyadic(16, 8);
    const RoughParams p{rng.dyadic(4, 4), std::abs(rng.dyadic(2, 6)), std::ldexp(1.0, -rng.below(8))};
    const RoughParams q{p.target + s, p.r, p.eps};
    const auto a = rough_stat_verdict(seq, p, kSmall);
    const auto b = rough_stat_verdict(seq.affine(1.0, s), q, kSmall);
    CHECK(a.verdict == b.verdict);
    for (std::size_t i = 0; i < a.density_report.checkpoints.size(); ++i) {
      CHECK(a.density_report.checkpoints[i].count == b.density_report.checkpoints[i].count);
    }
  }
}

TEST_CASE("property: classical convergence implies statistical convergence") {
  Rng rng(25);
  for (int trial = 0; trial < 100; ++trial) {
    // Arbitrary values before a settling index no larger than zero_tol * 1000.
    const Index settle = 1 + rng.below(10);
    const auto noise = sparse_noise(rng.next(), 0.0, 0.5);
    const double r = std::abs(rng.dyadic(1, 6));
    const ScalarSequenceView seq([=](Index k) -> std::optional<double> {
      if (k < settle) return noise(k);
      return r * 0.5;
    });
    const RoughParams p{0.0, r, 0.01};
    const auto classical = classical_rough_verdict(seq, p, kSmall.max_checkpoint());
    REQUIRE(classical.accepted);
    if (static_cast<double>(classical.start - 1) <= kSmall.zero_tol() * 1000.0) {
      CHECK(rough_stat_verdict(seq, p, kSmall).verdict == Verdict::Accept);
    }
  }
}

TEST_CASE("property: convergence at degree r implies Cauchy at degree 2r") {
  Rng rng(26);
  for (int trial = 0; trial < 100; ++trial) {
    const auto seq = sparse_noise(rng.next(), rng.dyadic(2, 4), rng.uniform() * 0.005);
    const double r = std::abs(rng.dyadic(1, 6));
    const double eps = 0.02;
    // Base values vary by at most 1/4 around the base, so r >= 1/4 is needed
    // for convergence; shift r accordingly.
    const double rr = r + 0.25;
    Index anchor = 0;
    for (Index n = 5000; n < 5100; ++n) {
      if (std::abs(*seq(n) - *seq(5000)) < 0.26) {
        anchor = n;
        break;
      }
    }
    REQUIRE(anchor > 0);
    const double target = *seq(anchor);
    const auto conv = rough_stat_verdict(seq, {target, rr, eps / 2}, kSmall);
    if (conv.verdict != Verdict::Accept) continue;
    const std::vector<Index> cands{anchor};
    const auto cauchy = rough_cauchy_verdict(seq, 2 * rr, eps, cands, kSmall);
    CHECK(cauchy.verdict == Verdict::Accept);
  }
}

TEST_CASE("pointwise reports over a grid") {
  const auto program = dsl::builtin_program("example21");
  const auto zero = dsl::parse_program("0");
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const auto rep = pointwise_report(program, zero, grid, 1.0, 0.01, kMid);
  REQUIRE(rep.points.size() == 3);
  CHECK(rep.overall == Verdict::Accept);
  CHECK(rep.points[1].x == 0.5);
  const auto tight = pointwise_report(program, zero, grid, 0.0, 0.01, kMid);
  CHECK(tight.points[0].report.verdict == Verdict::Reject);
  CHECK(tight.overall == Verdict::Reject);

  CHECK_THROWS_AS(pointwise_report(program, dsl::parse_program("k"), grid, 1.0, 0.01, kMid),
                  dsl::ProgramError);
  const std::vector<double> outside{2.0};
  CHECK_THROWS_AS(pointwise_report(program, zero, outside, 1.0, 0.01, kMid), ConfigError);
}

TEST_CASE("pointwise results do not depend on the worker count") {
  const auto program = dsl::builtin_program("example21");
  const auto target = dsl::parse_program("1/(1+x)");
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  const auto a = pointwise_report(program, target, grid, 0.5, 0.01, kMid, 1);
  const auto b = pointwise_report(program, target, grid, 0.5, 0.01, kMid, 4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(a.points[i].report.verdict == b.points[i].report.verdict);
    CHECK(a.points[i].report.witness_bad_indices == b.points[i].report.witness_bad_indices);
  }
}

TEST_CASE("linearity of rough limits") {
  const AnalysisProtocol kLoose({1000, 10'000, 100'000}, 0.02, 2, 0.02);
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  LinearityInputs in{dsl::builtin_program("example21"), dsl::parse_program("x + 1/k^2"),
                     dsl::parse_program("0"),           dsl::parse_program("x"),
                     2.0,  -1.0, 1.0, 0.0, 0.01};
  const auto res = linearity_check(in, grid, kLoose);
  CHECK(res.premise_holds);
  CHECK(res.combined_r == 2.0);
  CHECK(res.combined == Verdict::Accept);
  CHECK_FALSE(res.same_degree.has_value());
  CHECK(res.passed());

  in.alpha = 0.5;
  in.beta = 0.5;
  const auto half = linearity_check(in, grid, kLoose);
  REQUIRE(half.same_degree.has_value());
  CHECK(*half.same_degree == Verdict::Accept);
  CHECK(half.passed());
}
