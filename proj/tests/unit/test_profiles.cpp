#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "fwdiss/error.hpp"
#include "fwdiss/kernel.hpp"
#include "fwdiss/profiles.hpp"
#include "fwdiss/quadrature.hpp"
#include "oracles.hpp"

using namespace fwdiss;
using namespace fwdiss::profiles;

using oracle::brute_force_w;

TEST_CASE("regime classification") {
  CHECK(regime_for(2.5) == Regime::subcritical);
  CHECK(regime_for(3.0) == Regime::critical);
  CHECK(regime_for(4.0) == Regime::supercritical);
  CHECK_THROWS_AS((void)regime_for(2.0), ConfigError);
  CHECK(parse_regime(to_string(Regime::critical)) == Regime::critical);
  ProfileSpec bad{Params{2.5, 1, 1, 1}, 1.0, 0.0, 0.0, Regime::critical};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS((void)make_spec(Params{4.0, 1, 1, 1}, 1.0, 0.0, std::nan("")), ConfigError);
}

TEST_CASE("Gaussian power mass") {
  for (double mu : {1.0, 0.3}) {
    for (double tau : {0.5, 1.0, 2.0}) {
      const double stated = 1.0 / (tau * 4.0 * std::sqrt(3.0) * oracle::pi * mu);
      CHECK(gaussian_power_mass(3.0, tau, mu) == doctest::Approx(stated).epsilon(1e-14));
      for (double p : {2.5, 3.0, 4.0}) {
        const double numeric = oracle::integrate(
            [&](double y) { return std::pow(oracle::heat(y, tau, mu), p); }, -50.0, 50.0);
        CHECK(gaussian_power_mass(p, tau, mu) == doctest::Approx(numeric).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("w_p is odd and has zero mean") {
  const Params pr{2.5, 1.0, 1.0, 1.0};
  CHECK(w_p(0.0, pr) == 0.0);
  for (double x : {0.3, 1.0, 2.7}) CHECK(w_p(-x, pr) == doctest::Approx(-w_p(x, pr)).epsilon(1e-13));
  const Field w = sample_w_p(Grid(20.0, 2048), pr);
  CHECK(std::abs(moment(w, 0).value) < 1e-12);
  CHECK(w_p(0.0, Params{3.0, 1, 1, 1}) == 0.0);
  CHECK(w_p(0.0, Params{4.0, 1, 1, 1}) == 0.0);
}

TEST_CASE("reduced w_p matches the brute-force definition") {
  for (double mu : {1.0, 0.5}) {
    const Params pr{2.5, 1.0, 1.0, mu};
    for (double x : {0.5, 1.0, -2.0}) {
      CAPTURE(x);
      CHECK(std::abs(w_p(x, pr) - brute_force_w(x, 2.5, mu)) < 1e-7);
    }
  }
  const Params pr{2.2, 1.0, 1.0, 1.0};
  CHECK(std::abs(w_p(1.0, pr) - brute_force_w(1.0, 2.2, 1.0)) < 1e-7);
}

TEST_CASE("definitional w_p agrees with the reduced form and the oracle") {
  const Params pr{2.5, 1.0, 1.0, 1.0};
  for (double x : {0.0, 0.5, -1.0, 2.0}) {
    CAPTURE(x);
    const double d = w_p_definitional(x, pr);
    CHECK(std::abs(d - w_p(x, pr)) < 1e-7);
    if (x != 0.0) CHECK(std::abs(d - brute_force_w(x, 2.5, 1.0)) < 1e-7);
  }
  CHECK_THROWS_AS((void)w_p_definitional(1.0, Params{3.0, 1, 1, 1}), AccuracyError);
  CHECK_THROWS_AS((void)w_p_definitional(-0.5, Params{4.0, 1, 1, 1}), AccuracyError);
}

TEST_CASE("w_p primitive differentiates to w_p") {
  const Params pr{2.5, 1.0, 1.0, 1.0};
  for (double x : {-1.5, 0.4, 2.0}) {
    const double fd = oracle::fd1([&](double y) { return w_p_primitive(y, pr); }, x, 1e-4);
    CHECK(std::abs(fd - w_p(x, pr)) < 1e-8);
  }
}

TEST_CASE("w_p diverges for p >= 3 away from the origin") {
  for (double p : {3.0, 4.0}) {
    CHECK_THROWS_AS((void)w_p(1.0, Params{p, 1, 1, 1}), AccuracyError);
  }
}

TEST_CASE("W_p scaling") {
  const Params pr{2.5, 1.0, 1.0, 1.0};
  const double alpha = pr.drift_speed();
  for (double t : {0.5, 3.0}) CHECK(W_p(alpha * t, t, pr) == 0.0);
  for (double y : {-1.2, 0.7}) CHECK(W_p(alpha + y, 1.0, pr) == doctest::Approx(w_p(y, pr)).epsilon(1e-15));
  for (double lambda : {0.25, 4.0}) {
    for (double x : {1.0, 5.5}) {
      const double t = 2.0;
      const double lhs = W_p(x, lambda * t, pr) * std::pow(lambda, (pr.p - 1.0) / 2.0);
      const double rhs = std::pow(t, -(pr.p - 1.0) / 2.0) *
                         w_p((x - alpha * lambda * t) / std::sqrt(lambda * t), pr);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
  }
  // ||W_p(., t)||_q = t^{-(1/2)(1-1/q)-(p-2)/2} ||w_p||_q on a fine grid.
  const Grid g(120.0, 16384);
  for (double q : {2.0, kInf}) {
    const double ref = w_p_norm(pr, q);
    for (double t : {1.0, 9.0}) {
      const double scaled = lq_norm(sample_W_p(g, t, pr), q) *
                            std::pow(t, kernel::heat_rate(q) + (pr.p - 2.0) / 2.0);
      CHECK(scaled == doctest::Approx(ref).epsilon(q == 2.0 ? 1e-9 : 1e-3));
    }
  }
}

TEST_CASE("theorem profile examples") {
  for (double p : {2.5, 3.0, 4.0}) {
    const ProfileSpec spec = make_spec(Params{p, 1, 1, 1}, 0.0, 0.0, 0.0);
    for (double x : {-1.0, 0.0, 2.5}) CHECK(theorem_profile(x, 2.0, spec) == 0.0);
  }
  {
    const Params pr{4.0, 1e-10, 1.0, 1.0};
    const ProfileSpec spec = make_spec(pr, 0.7, 0.3, -0.3);
    for (double x : {-1.0, 0.4, 3.0}) {
      CHECK(theorem_profile(x, 5.0, spec) ==
            doctest::Approx(0.7 * kernel::g0_deriv(x, 5.0, pr, 0)).epsilon(1e-9));
    }
  }
  {
    // Critical correction at t = e: (1/(4 sqrt 3 pi)) max |d_x G0(., e)|.
    const Params pr{3.0, 1.0, 1.0, 1.0};
    const ProfileSpec spec = make_spec(pr, 1.0);
    const double t = std::exp(1.0);
    const Grid g(60.0, 65536, Frame::lab);
    double peak = 0.0;
    double dg_peak = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double x = g.x(j);
      peak = std::max(peak, std::abs(profile_correction(x, t, spec)));
      const double y = x - 2.0 * t;
      dg_peak = std::max(dg_peak, std::abs(-y / (2.0 * t) * oracle::heat(y, t, 1.0)));
    }
    CHECK(peak == doctest::Approx(dg_peak / (4.0 * std::sqrt(3.0) * oracle::pi)).epsilon(1e-12));
    CHECK_THROWS_AS((void)theorem_profile(0.0, 1.0, spec), DomainError);
  }
  {
    // Supercritical pieces combine as stated.
    const Params pr{4.0, 1.3, 0.8, 1.1};
    const ProfileSpec spec = make_spec(pr, 0.2, -0.1, 0.05);
    const double x = 7.0;
    const double t = 3.0;
    const double expected = 0.2 * kernel::g0_deriv(x, t, pr, 0) - (-0.1 + 0.05) * kernel::g0_deriv(x, t, pr, 1) -
                            2.0 * 1.3 * 0.2 / (0.8 * 0.8 * 0.8) * t * kernel::g0_deriv(x, t, pr, 3);
    CHECK(theorem_profile(x, t, spec) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("Duhamel self-similarity check") {
  const Params pr{2.5, 1.0, 1.0, 1.0};
  const Grid g(64.0, 8192);
  CHECK(duhamel_selfsim_check(4.0, make_spec(pr, 0.0), g).distance == 0.0);
  const auto res = duhamel_selfsim_check(4.0, make_spec(pr, 0.1), g);
  MESSAGE("relative distance at t=4: " << res.relative);
  CHECK(res.relative < 1e-4);
  CHECK(res.singularity_warning);
  CHECK_THROWS_AS((void)duhamel_selfsim_check(4.0, make_spec(Params{3.0, 1, 1, 1}, 0.1), g),
                  AccuracyError);
  // Same identity on a lab-frame grid.
  const Grid lab(64.0, 8192, Frame::lab);
  CHECK(duhamel_selfsim_check(4.0, make_spec(pr, 0.1), lab).relative < 1e-4);
}

TEST_CASE("Duhamel primitive identity at t in {1, 4, 16}") {
  const Params pr{2.5, 1.0, 1.0, 1.0};
  const Grid g(64.0, 8192);
  for (double t : {1.0, 4.0, 16.0}) {
    const auto res = duhamel_primitive_check(t, pr, g);
    CAPTURE(t);
    CHECK(res.relative < 1e-5);
  }
}

TEST_CASE("Duhamel check error does not grow with t") {
  const Params pr{2.5, 1.0, 1.0, 1.0};
  const Grid g(64.0, 8192);
  const auto spec = make_spec(pr, 0.1);
  const double d1 = duhamel_selfsim_check(1.0, spec, g).relative;
  const double d4 = duhamel_selfsim_check(4.0, spec, g).relative;
  const double d16 = duhamel_selfsim_check(16.0, spec, g).relative;
  MESSAGE("relative distances " << d1 << " " << d4 << " " << d16);
  CHECK(d4 < 1e-4);
  CHECK(d16 < 1e-4);
  CHECK(d16 <= 2.0 * d1);
}
