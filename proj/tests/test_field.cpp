#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "curvemax/fourier.hpp"

using namespace curvemax;

TEST_CASE("grid geometry puts the origin at index n/2") {
  SampledField2D f(8, 4.0);
  CHECK(f.h() == 0.5);
  CHECK(f.coord(4) == 0.0);
  CHECK(f.coord(0) == -2.0);
  CHECK_THROWS_AS(SampledField2D(0, 1.0), ParameterError);
  CHECK_THROWS_AS(SampledField2D(4, -1.0), ParameterError);
}

TEST_CASE("bilinear sampler: exact on constants and on cell-affine data, periodic") {
  const SampledField2D c(16, 2.0, 3.25);
  const BilinearSampler sc(c);
  for (double x : {-7.3, 0.0, 0.013, 1.999, 5.5}) CHECK(sc(x, -x * 0.7) == 3.25);

  const auto g = SampledField2D::from_function(16, 2.0, [](double a, double b) { return 2 * a - b + 0.5; });
  const BilinearSampler sg(g);
  CHECK(sg(0.11, 0.37) == doctest::Approx(2 * 0.11 - 0.37 + 0.5).epsilon(1e-13));
  CHECK(sg(g.coord(3), g.coord(9)) == doctest::Approx(g.at(3, 9)).epsilon(1e-14));
  CHECK(sg(g.coord(3) + 2.0, g.coord(9) - 4.0) == doctest::Approx(g.at(3, 9)).epsilon(1e-14));
}

TEST_CASE("lp norm is the Riemann sum") {
  const SampledField2D one(32, 2.0, 1.0);
  CHECK(one.lp_norm(2.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(one.lp_norm(1.5) == doctest::Approx(std::pow(4.0, 1 / 1.5)).epsilon(1e-14));
}

TEST_CASE("binary field round trip and line cut") {
  auto f = SampledField2D::from_function(8, 3.0, [](double a, double b) { return a * a - 0.1 * b; });
  const std::string path = "field_roundtrip.bin";
  write_field(path, f);
  const auto g = read_field(path);
  CHECK(g.n == 8);
  CHECK(g.L == 3.0);
  CHECK(g.periodic);
  CHECK(g.values == f.values);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_field("missing_field.bin"), DataError);

  std::ostringstream os;
  write_line_cut_csv(os, f, 0, 4);
  CHECK(os.str().rfind("x,value\n-1.5,", 0) == 0);
}

TEST_CASE("fft round trip and frequency layout") {
  const auto xi = grid_frequencies(8, 2 * std::numbers::pi);
  CHECK(xi[0] == 0.0);
  CHECK(xi[3] == doctest::Approx(3.0));
  CHECK(xi[4] == doctest::Approx(-4.0));
  CHECK(xi[7] == doctest::Approx(-1.0));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  SampledField2D f(32, 5.0);
  for (auto& v : f.values) v = nd(rng);
  const auto back = ifft2_real(fft2(f), f.n, f.L);
  for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(back.values[i] == doctest::Approx(f.values[i]).epsilon(1e-12));
}

TEST_CASE("apply_multiplier: identity, zero, single-mode eigenvalue, grid mismatch") {
  const std::size_t n = 32;
  const double L = 2 * std::numbers::pi;
  const auto f = SampledField2D::from_function(n, L, [](double a, double b) { return std::cos(3 * a - 2 * b); });
  const Spectrum ones(n * n, 1.0), zeros(n * n, 0.0);
  const auto same = apply_multiplier(f, ones);
  for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(same.values[i] == doctest::Approx(f.values[i]).epsilon(1e-12));
  CHECK(apply_multiplier(f, zeros).max_abs() == 0.0);

  // m(xi) = i xi_1 differentiates in x1: d/dx1 cos(3a-2b) = -3 sin(3a-2b).
  const auto xi = grid_frequencies(n, L);
  Spectrum d(n * n);
  for (std::size_t k1 = 0; k1 < n; ++k1)
    for (std::size_t k2 = 0; k2 < n; ++k2) d[k1 * n + k2] = std::complex<double>(0.0, xi[k1]);
  const auto df = apply_multiplier(f, d);
  for (std::size_t i1 = 0; i1 < n; i1 += 5)
    for (std::size_t i2 = 0; i2 < n; i2 += 3)
      CHECK(df.at(i1, i2) == doctest::Approx(-3 * std::sin(3 * f.coord(i1) - 2 * f.coord(i2))).epsilon(1e-10).scale(1));

  CHECK_THROWS_AS(apply_multiplier(f, Spectrum(10)), GridMismatchError);
}
