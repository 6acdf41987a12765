#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "curvemax/dilation_sets.hpp"
#include "oracles.hpp"

using namespace curvemax;
using namespace curvemax::dilation;

TEST_CASE("rescale: powers of two at r=1") {
  const auto u = DilationSet::lacunary(2.0);
  const auto e = rescale(u, 1.0, 1.0 / 8);
  REQUIRE(e.components.size() == 2);
  CHECK(e.components[0].lo == 1.0);
  CHECK(e.components[1].lo == 2.0);
  CHECK(e.cells() == std::vector<std::int64_t>{0, 8});
}

TEST_CASE("rescale: [1,4] at r=2 fills [1,2]") {
  const auto e = rescale(DilationSet::interval(1.0, 4.0), 2.0, 1.0 / 8);
  REQUIRE(e.components.size() == 1);
  CHECK(e.components[0].lo == 1.0);
  CHECK(e.components[0].hi == 2.0);
  CHECK(e.cells().size() == 8);
}

TEST_CASE("rescale: middle-thirds level-3 cells") {
  const auto e = rescale(DilationSet::cantor(2, 3.0, 3), 1.0, 1.0 / 27);
  CHECK(e.cells() == oracle::middle_thirds_cells(3));
}

TEST_CASE("rescale: below the resolution floor names the generator") {
  const auto u = DilationSet::cantor(2, 3.0, 3);
  try {
    (void)rescale(u, 1.0, 1.0 / 100);
    FAIL("expected ResolutionError");
  } catch (const ResolutionError& e) {
    CHECK(std::string(e.what()).find("cantor") != std::string::npos);
  }
  CHECK_THROWS_AS((void)rescale(u, -1.0, 0.1), ParameterError);
}

TEST_CASE("rescale composes multiplicatively") {
  const auto u = DilationSet::cantor(2, 3.0, 6);
  for (double r : {0.7, 1.0, 1.3}) {
    for (double rp : {0.8, 1.1}) {
      const auto direct = rescale(u, r * rp, 0.01);
      const auto composed = rescale(u.dilate(1.0 / r), rp, 0.01);
      REQUIRE(direct.components.size() == composed.components.size());
      for (std::size_t i = 0; i < direct.components.size(); ++i) {
        CHECK(direct.components[i].lo == doctest::Approx(composed.components[i].lo).epsilon(1e-13));
        CHECK(direct.components[i].hi == doctest::Approx(composed.components[i].hi).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("covering_number examples") {
  RescaledSet two{1.0, 0.25, {{1.0, 1.0}, {2.0, 2.0}}};
  CHECK(covering_number(two, 0.25).count == 2);
  RescaledSet full{1.0, 0.25, {{1.0, 2.0}}};
  CHECK(covering_number(full, 0.25).count == 4);

  RescaledSet none{1.0, 0.25, {}};
  const auto c = covering_number(none, 0.25);
  CHECK(c.count == 0);
  CHECK(c.empty_set);
  CHECK_THROWS_AS(covering_number(full, 0.1), ResolutionError);
}

TEST_CASE("covering_number on middle-thirds matches exhaustive placement") {
  const auto e = rescale(DilationSet::cantor(2, 3.0, 3), 1.0, 1.0 / 27);
  // Dense samples of each construction interval, endpoints included.
  std::vector<double> samples;
  for (const auto& p : e.components)
    for (int i = 0; i <= 16; ++i) samples.push_back(p.lo + (p.hi - p.lo) * i / 16.0);
  const auto brute = oracle::exhaustive_cover(samples, 1.0 / 27);
  CHECK(brute == 8);
  CHECK(covering_number(e, 1.0 / 27).count == brute);
}

TEST_CASE("greedy equals exhaustive optimum on random finite sets") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(1.0, 2.0);
  std::uniform_int_distribution<int> size(1, 200);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> pts(static_cast<std::size_t>(size(rng)));
    for (auto& p : pts) p = unif(rng);
    const auto u = DilationSet::points(pts);
    const auto e = rescale(u, 1.0, 1.0 / 1024);
    for (int k = 3; k <= 10; ++k) {
      const double d = std::ldexp(1.0, -k);
      CHECK(covering_number(e, d).count == oracle::exhaustive_cover(pts, d));
    }
  }
}

TEST_CASE("covering is monotone in delta and capped by ceil(1/delta)+1") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(1.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> pts(150);
    for (auto& p : pts) p = unif(rng);
    const auto e = rescale(DilationSet::points(pts), 1.0, 1e-4);
    std::int64_t prev = 0;
    for (double d = 0.5; d > 1e-3; d *= 0.8) {
      const auto n = covering_number(e, d).count;
      CHECK(n >= prev);
      CHECK(n <= static_cast<std::int64_t>(std::ceil(1.0 / d)) + 1);
      prev = n;
    }
  }
}

TEST_CASE("sup_covering_number examples") {
  for (int l = 2; l <= 6; ++l) {
    const double d = std::ldexp(1.0, -l);
    const auto u = DilationSet::interval(1.0, 2.0);
    CHECK(sup_covering_number(u, d).count == (1 << l));
    CHECK(covering_number(rescale(u, 1.0, d), d).count == (1 << l));
  }

  // Exhaustive r sweep on a uniform grid (independent of the geometric grid).
  std::int64_t brute = 0;
  for (int i = 0; i <= 20000; ++i) {
    const double r = 1.0 + i / 20000.0;
    std::vector<double> in;
    for (int k = -3; k <= 4; ++k) {
      const double v = std::ldexp(1.0, k);
      if (v >= r && v <= 2.0 * r) in.push_back(v / r);
    }
    if (!in.empty()) brute = std::max(brute, oracle::exhaustive_cover(in, 1.0 / 8));
  }
  CHECK(brute == 2);
  CHECK(sup_covering_number(DilationSet::lacunary(2.0), 1.0 / 8).count == brute);

  const auto base = DilationSet::cantor(2, 3.0, 5);
  const auto single = DilationSet::dyadic_union(base, {0});
  for (double d : {0.1, 0.03, 0.01})
    CHECK(sup_covering_number(single, d).count == sup_covering_number(base, d).count);
}

TEST_CASE("periodic dyadic union: one period gives the global sup") {
  const auto base = DilationSet::cantor(2, 3.0, 6);
  const auto periodic = DilationSet::dyadic_union_all(base);
  const auto many = DilationSet::dyadic_union(base, {-3, -2, -1, 0, 1, 2, 3});
  for (double d : {0.05, 0.02, 0.01})
    CHECK(sup_covering_number(periodic, d).count == sup_covering_number(many, d).count);
}

TEST_CASE("grid supremum is stable under grid refinement") {
  // Halving the r-grid ratio (1+d/8 -> ~1+d/16) keeps the sup within a factor 2.
  const auto u = DilationSet::cantor(2, 3.0, 8);
  for (double d : {0.05, 0.01, 0.003}) {
    const auto coarse = sup_covering_number(u, d).count;
    std::int64_t fine = 0;
    for (double r : r_grid(u, d / 2.0))
      fine = std::max(fine, greedy_cover(u.components(r, 2 * r), r, 2 * r, r * d));
    CHECK(fine >= coarse);
    CHECK(fine <= 2 * coarse);
  }
}

TEST_CASE("kp_value examples and bounds") {
  CHECK(kp_value(DilationSet::interval(1.0, 2.0), 1.0 / 64, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kp_value(DilationSet::lacunary(2.0), 1.0 / 64, 2.0) ==
        doctest::Approx(0.125 * std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(kp_value(DilationSet::lacunary(2.0), 0.1, 1.0), ParameterError);
  CHECK_THROWS_AS(kp_value(DilationSet::lacunary(2.0), 0.1, 2.5), ParameterError);

  // S_1 at delta = 1e-4: enumerate {1+1/n} directly at the witnessing r and
  // cover it exhaustively; r = 1 gives a lower bound for the supremum.
  const double d = 1e-4;
  const auto s1 = DilationSet::convex_sequence(1.0, 10000);
  const auto sup = sup_covering_number(s1, d);
  auto enumerate = [](double r) {
    std::vector<double> pts;
    for (int n = 1; n <= 10000; ++n)
      if (1.0 + 1.0 / n >= r && 1.0 + 1.0 / n <= 2 * r) pts.push_back((1.0 + 1.0 / n) / r);
    if (1.0 >= r) pts.push_back(1.0 / r);
    return pts;
  };
  const auto n_witness = oracle::exhaustive_cover(enumerate(sup.witness_r), d);
  const auto n_unit = oracle::exhaustive_cover(enumerate(1.0), d);
  CHECK(sup.count == n_witness);
  CHECK(sup.count >= n_unit);
  CHECK(kp_value(s1, d, 2.0) == doctest::Approx(std::sqrt(d * static_cast<double>(n_witness))).epsilon(1e-12));

  for (const auto& u : {DilationSet::interval(1, 3), DilationSet::cantor(3, 5.0, 5), DilationSet::lacunary(1.5)})
    for (double p : {1.2, 1.5, 2.0})
      for (double dd : {0.1, 0.02})
        CHECK(kp_value(u, dd, p) <= std::pow(dd, 1 - 2 / p) * std::pow(2.0, 1 / p) * (1 + 1e-12));
}

TEST_CASE("shell_count examples") {
  CHECK(shell_count(DilationSet::points({1.5})).value == 2);
  CHECK(shell_count(DilationSet::points({1.0})).value == 3);
  CHECK(shell_count(DilationSet::points({1.5, 3.0, 100.0})).value == 4);
  CHECK(shell_count(DilationSet::interval(0.0, 2.0)).infinite);
  CHECK(shell_count(DilationSet::interval(1.0, std::numeric_limits<double>::infinity())).infinite);
  CHECK(shell_count(DilationSet::lacunary(2.0)).infinite);
  CHECK(shell_count(DilationSet::lacunary(2.0, 0, 3)).value == 1 + 5);  // n = -1..3
}

TEST_CASE("pcr_estimate") {
  const auto interval = pcr_estimate(DilationSet::interval(1.0, 2.0), 1e-4, 1e-1, 4);
  CHECK(interval.estimate == doctest::Approx(2.0).epsilon(0.02));
  CHECK(interval.deltas.size() >= 5);

  const auto lac = pcr_estimate(DilationSet::lacunary(2.0), std::ldexp(1.0, -12), 0.25, 4);
  CHECK(lac.flat);
  CHECK(lac.estimate == 1.0);
  const auto lac3 = pcr_estimate(DilationSet::lacunary(3.0), std::ldexp(1.0, -12), 0.25, 4);
  CHECK(lac3.estimate == doctest::Approx(1.0).epsilon(0.05));

  const auto cantor = pcr_estimate(DilationSet::cantor(2, 3.0, 9), std::pow(3.0, -7), 1.0 / 3, 6);
  CHECK(std::abs(cantor.estimate - (1 + std::log(2.0) / std::log(3.0))) < 0.05);

  CHECK_THROWS_AS(pcr_estimate(DilationSet::cantor(2, 3.0, 3), 1e-3, 0.1, 4), ResolutionError);
}

TEST_CASE("covering profile CSV") {
  const double ds[] = {0.25, 0.125};
  const auto prof = covering_profile(DilationSet::interval(1.0, 2.0), ds);
  std::ostringstream os;
  write_covering_profile_csv(os, prof);
  const auto s = os.str();
  CHECK(s.rfind("delta,sup_count,witness_r\n", 0) == 0);
  CHECK(s.find("\n0.25,4,") != std::string::npos);
  CHECK(s.find("\n0.125,8,") != std::string::npos);
}
