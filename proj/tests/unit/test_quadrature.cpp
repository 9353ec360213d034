#include <doctest.h>

#include <cmath>

#include "fwdiss/error.hpp"
#include "fwdiss/quadrature.hpp"
#include "oracles.hpp"

using namespace fwdiss;

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 2, 5, 16, 33}) {
    const auto& rule = quad::gauss_legendre(n);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      const double exact = (deg % 2 == 1) ? 0.0 : 2.0 / (deg + 1);
      const double got =
          quad::fixed_gauss_legendre([&](double x) { return std::pow(x, deg); }, -1.0, 1.0, rule);
      CHECK(std::abs(got - exact) < 1e-13);
    }
  }
  CHECK_THROWS_AS((void)quad::gauss_legendre(0), DomainError);
}

TEST_CASE("adaptive quadrature matches an independent integrator") {
  const auto f = [](double x) { return std::exp(-x * x) * std::cos(3.0 * x) + 1.0 / (1.0 + 100.0 * x * x); };
  const double ref = oracle::integrate(f, -2.0, 5.0);
  const auto res = quad::integrate_adaptive(f, -2.0, 5.0);
  CHECK(std::abs(res.value - ref) < 1e-10);
  CHECK(res.error_estimate < 1e-10);
}

TEST_CASE("adaptive quadrature handles integrable endpoint singularities") {
  const auto f = [](double s) { return std::pow(s, -0.25); };
  const auto res = quad::integrate_adaptive(f, 0.0, 1.0);
  CHECK(std::abs(res.value - 4.0 / 3.0) < 1e-9);
}

TEST_CASE("adaptive quadrature rejects divergent integrals") {
  const auto f = [](double s) { return 1.0 / s; };
  CHECK_THROWS_AS((void)quad::integrate_adaptive(f, 0.0, 1.0), AccuracyError);
  const auto g = [](double s) { return std::pow(s, -1.5); };
  CHECK_THROWS_AS((void)quad::integrate_adaptive(g, 0.0, 1.0), AccuracyError);
}
