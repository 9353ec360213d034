#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fwdiss/core.hpp"
#include "fwdiss/error.hpp"
#include "oracles.hpp"

using namespace fwdiss;

TEST_CASE("params validation") {
  CHECK_NOTHROW(Params{}.validate());
  CHECK_THROWS_AS((Params{2.0, 1, 1, 1}.validate()), ConfigError);
  CHECK_THROWS_AS((Params{3.0, 0, 1, 1}.validate()), ConfigError);
  CHECK_THROWS_AS((Params{3.0, 1, -1, 1}.validate()), ConfigError);
  CHECK_THROWS_AS((Params{3.0, 1, 1, 0}.validate()), ConfigError);
  CHECK(Params{3.0, 1.5, 0.5, 1}.drift_speed() == doctest::Approx(6.0));
}

TEST_CASE("grid layout") {
  const Grid g(10.0, 16);
  CHECK(g.dx() == doctest::Approx(1.25));
  CHECK(g.x(0) == -10.0);
  CHECK(g.x(15) == doctest::Approx(8.75));
  CHECK(g.xi(3) == doctest::Approx(3.0 * oracle::pi / 10.0));
  CHECK(g.xi_max() == doctest::Approx(8.0 * oracle::pi / 10.0));
  CHECK_THROWS_AS(Grid(10.0, 24), ConfigError);
  CHECK_THROWS_AS(Grid(10.0, 4), ConfigError);
  CHECK_THROWS_AS(Grid(-1.0, 16), ConfigError);
  CHECK(parse_frame("lab") == Frame::lab);
  CHECK(parse_frame("comoving") == Frame::comoving);
  CHECK_THROWS_AS((void)parse_frame("rotating"), ConfigError);
}

TEST_CASE("field invariants") {
  const Grid g(5.0, 8);
  CHECK_THROWS_AS(Field(g, std::vector<double>(7)), ConfigError);
  std::vector<double> bad(8, 0.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(Field(g, bad), ConsistencyError);
  const Field a = Field::sample(g, [](double x) { return x; });
  const Field b = 2.0 * a - a;
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(b[j] == a[j]);
}

TEST_CASE("transform of zero is zero") {
  const Grid g(10.0, 64);
  const Spectrum s = transform(Field::zeros(g));
  for (const auto& c : s.coeffs()) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("transform round trip on random field") {
  const Grid g(17.0, 1024);
  const Field f(g, oracle::random_values(g.size(), 7));
  const Field back = inverse_transform(transform(f));
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    err = std::max(err, std::abs(back[j] - f[j]));
    ref = std::max(ref, std::abs(f[j]));
  }
  CHECK(err <= 1e-12 * ref);
}

TEST_CASE("transform approximates the continuous Gaussian transform") {
  // G(x,1) with mu = 1 has transform (2 pi)^{-1/2} exp(-xi^2).
  const Grid g(40.0, 4096);
  const Field f = Field::sample(g, [](double x) { return oracle::heat(x, 1.0, 1.0); });
  const Spectrum s = transform(f);
  double err = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double xi = s.wavenumber(i);
    const std::complex<double> expected(std::exp(-xi * xi) / std::sqrt(2.0 * oracle::pi), 0.0);
    err = std::max(err, std::abs(s.coeffs()[i] - expected));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("transform of a shifted Gaussian carries the phase") {
  const Grid g(40.0, 2048);
  const double c = 3.0;
  const Field f = Field::sample(g, [&](double x) { return oracle::heat(x - c, 1.0, 1.0); });
  const Spectrum s = transform(f);
  for (std::ptrdiff_t k : {1, 5, 40, -13}) {
    const double xi = g.xi(k);
    const auto expected =
        std::polar(std::exp(-xi * xi) / std::sqrt(2.0 * oracle::pi), -xi * c);
    CHECK(std::abs(s.at(k) - expected) < 1e-10);
  }
}

TEST_CASE("Parseval identity") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const Grid g(8.0 + seed, 512);
    const Field f(g, oracle::random_values(g.size(), seed));
    const Spectrum s = transform(f);
    double lhs = 0.0;
    for (const auto& c : s.coeffs()) lhs += std::norm(c) * g.dxi();
    double rhs = 0.0;
    for (double v : f.values()) rhs += v * v * g.dx();
    CHECK(std::abs(lhs - rhs) <= 1e-10 * rhs);
  }
}

TEST_CASE("spectrum of real field is conjugate symmetric") {
  const Grid g(10.0, 256);
  const Field f(g, oracle::random_values(g.size(), 11));
  const Spectrum s = transform(f);
  for (std::ptrdiff_t k = 1; k < 128; ++k) {
    CHECK(std::abs(s.at(-k) - std::conj(s.at(k))) < 1e-13);
  }
}

TEST_CASE("lq_norm examples") {
  const Grid g(40.0, 4096);
  CHECK(lq_norm(Field::zeros(g), 2.0) == 0.0);
  CHECK(lq_norm(Field::zeros(g), kInf) == 0.0);
  CHECK(lq_norm(Field::zeros(g), 3.5) == 0.0);
  const Field f = Field::sample(g, [](double x) { return oracle::heat(x, 1.0, 1.0); });
  CHECK(lq_norm(f, kInf) == doctest::Approx(1.0 / std::sqrt(4.0 * oracle::pi)).epsilon(1e-14));
  const double l2_ref = std::sqrt(oracle::integrate(
      [](double x) { return std::pow(oracle::heat(x, 1.0, 1.0), 2); }, -kInf, kInf));
  CHECK(l2_ref == doctest::Approx(std::pow(8.0 * oracle::pi, -0.25)).epsilon(1e-12));
  CHECK(lq_norm(f, 2.0) == doctest::Approx(l2_ref).epsilon(1e-12));
  CHECK_THROWS_AS((void)lq_norm(f, 0.5), DomainError);
  CHECK_THROWS_AS((void)lq_norm(f, std::nan("")), DomainError);
}

TEST_CASE("lq_norm homogeneity and interpolation") {
  const Grid g(12.0, 512);
  for (unsigned seed : {4u, 5u, 6u}) {
    const Field f(g, oracle::random_values(g.size(), seed));
    for (double q : {1.0, 2.0, 3.0, 7.5, kInf}) {
      for (double c : {-3.0, 0.25, 1e5}) {
        CHECK(lq_norm(c * f, q) == doctest::Approx(std::abs(c) * lq_norm(f, q)).epsilon(1e-14));
      }
    }
    const double inf = lq_norm(f, kInf);
    const double two = lq_norm(f, 2.0);
    for (double q : {2.5, 4.0, 10.0, 50.0}) {
      CHECK(lq_norm(f, q) <= std::pow(inf, 1.0 - 2.0 / q) * std::pow(two, 2.0 / q) * (1 + 1e-14));
    }
  }
}

TEST_CASE("moment examples") {
  const Grid g(40.0, 4096);
  // G0(., 1) in the comoving frame is the heat kernel on the grid coordinate.
  const Field g0 = Field::sample(g, [](double x) { return oracle::heat(x, 1.0, 1.0); });
  const auto m0 = moment(g0, 0);
  CHECK(m0.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_FALSE(m0.truncation_warning);

  const Field dg = Field::sample(
      g, [](double x) { return oracle::fd1([](double y) { return oracle::heat(y, 1.0, 1.0); }, x, 1e-4); });
  CHECK(std::abs(moment(dg, 0).value) < 1e-10);

  const Field xg = Field::sample(g, [](double x) { return x * oracle::heat(x, 1.0, 1.0); });
  const double second = oracle::integrate(
      [](double x) { return x * x * oracle::heat(x, 1.0, 1.0); }, -kInf, kInf);
  CHECK(second == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(moment(xg, 1).value == doctest::Approx(second).epsilon(1e-10));
  CHECK_THROWS_AS((void)moment(g0, 2), DomainError);
}

TEST_CASE("moment flags truncated fields") {
  const Grid g(5.0, 256);
  const Field wide = Field::sample(g, [](double x) { return oracle::heat(x, 4.0, 1.0); });
  CHECK(moment(wide, 0).truncation_warning);
  CHECK(moment(Field::zeros(g), 0).value == 0.0);
  CHECK_FALSE(moment(Field::zeros(g), 0).truncation_warning);
}
