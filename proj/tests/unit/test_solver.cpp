#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "fwdiss/error.hpp"
#include "fwdiss/kernel.hpp"
#include "fwdiss/solver.hpp"
#include "oracles.hpp"

using namespace fwdiss;
using namespace fwdiss::solver;

namespace {

Field gaussian(const Grid& g, double amplitude, double mu = 1.0, double width = 1.0) {
  return Field::sample(g, [&](double x) { return amplitude * oracle::heat(x, width, mu); });
}

double max_abs(const Field& f) { return lq_norm(f, kInf); }

SolveConfig make_config(const Params& pr, const Grid& g, double t_end, double dt) {
  SolveConfig c;
  c.params = pr;
  c.grid = g;
  c.t_end = t_end;
  c.dt = dt;
  c.snapshot_times = {t_end};
  return c;
}

}  // namespace

TEST_CASE("solve config validation") {
  SolveConfig c = make_config(Params{}, Grid(32.0, 256), 1.0, 0.1);
  CHECK_NOTHROW(c.validate());
  c.dt = 2.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.dt = 0.1;
  c.dealias = 0.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.dealias = 2.0 / 3.0;
  c.snapshot_times = {0.5, 0.2};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.snapshot_times = {0.5, 1.5};
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("nonlinear term examples") {
  const Params pr{3.0, 1.0, 1.0, 1.0};
  const Grid g(40.0, 4096);
  CHECK(max_abs(nonlinear_term(Field::zeros(g), pr)) == 0.0);
  const Field c(g, std::vector<double>(g.size(), 0.3));
  CHECK(max_abs(nonlinear_term(c, pr)) < 1e-15);

  const double eps = 1e-3;
  const Field u = gaussian(g, eps);
  const Field n = nonlinear_term(u, pr);
  const auto cube = [&](double x) { return std::pow(eps * oracle::heat(x, 1.0, 1.0), 3); };
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double fd = -oracle::fd1(cube, g.x(j), 1e-4);
    err = std::max(err, std::abs(n[j] - fd));
    ref = std::max(ref, std::abs(fd));
  }
  CHECK(err <= 1e-8 * ref);

  // Odd power of a sign-changing field.
  const Params frac{2.5, 1.0, 1.0, 1.0};
  const Field dip = Field::sample(g, [](double x) { return -x * oracle::heat(x, 1.0, 1.0); });
  const Field nd = nonlinear_term(dip, frac);
  for (std::size_t j = 1; j < g.size() / 2; ++j) {
    // -d/dx of an odd function is even about x = 0.
    CHECK(std::abs(nd[g.size() / 2 + j] - nd[g.size() / 2 - j]) < 1e-12);
  }
}

TEST_CASE("zero data stays zero") {
  const Grid g(32.0, 512);
  const auto traj = integrate(Field::zeros(g), make_config(Params{}, g, 2.0, 0.1));
  REQUIRE(traj.snapshots.size() == 1);
  CHECK(max_abs(traj.snapshots[0].field) == 0.0);
}

TEST_CASE("linear propagation is exact for any dt") {
  const Params pr{2.5, 1.0, 1.0, 1.0};
  for (Frame frame : {Frame::comoving, Frame::lab}) {
    const Grid g(64.0, 1024, frame);
    const Field u0 = gaussian(g, 0.7);
    for (double dt : {0.05, 0.7, 3.0}) {
      SolveConfig c = make_config(pr, g, 3.0, dt);
      c.nonlinear = false;
      const auto traj = integrate(u0, c);
      const Field exact = kernel::apply_semigroup(u0, 3.0, pr);
      CHECK(lq_norm(traj.snapshots.back().field - exact, kInf) <= 1e-10 * max_abs(exact));
    }
  }
}

TEST_CASE("snapshots land on requested times and mass is conserved") {
  const Params pr{2.5, 1.0, 1.0, 1.0};
  const Grid g(64.0, 1024);
  SolveConfig c = make_config(pr, g, 5.0, 0.3);
  c.snapshot_times = {0.0, 0.1, 1.0, 2.345, 5.0};
  const Field u0 = gaussian(g, 0.8);
  const auto traj = integrate(u0, c);
  REQUIRE(traj.snapshots.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(traj.snapshots[i].t == c.snapshot_times[i]);
  const double m0 = moment(u0, 0).value;
  for (const auto& s : traj.snapshots) CHECK(std::abs(moment(s.field, 0).value - m0) <= 1e-8 * m0);
  for (const auto& r : traj.diagnostics) CHECK(std::abs(r.mass - m0) <= 1e-8 * m0 + 1e-12);
  CHECK(traj.diagnostics.front().t == 0.0);
  CHECK(traj.diagnostics.back().t == 5.0);
  for (std::size_t i = 1; i < traj.diagnostics.size(); ++i) {
    CHECK(traj.diagnostics[i].t > traj.diagnostics[i - 1].t);
  }
}

TEST_CASE("fourth-order convergence under step halving") {
  const Params pr{3.0, 1.0, 1.0, 1.0};
  const Grid g(32.0, 512);
  const Field u0 = gaussian(g, 4.0);
  auto run = [&](double dt) { return integrate(u0, make_config(pr, g, 1.0, dt)).snapshots.back().field; };
  const double dt = 0.1;
  const Field ref = run(dt / 8.0);
  const double e1 = lq_norm(run(dt) - ref, 2.0);
  const double e2 = lq_norm(run(dt / 2.0) - ref, 2.0);
  MESSAGE("errors " << e1 << " " << e2 << " ratio " << e1 / e2);
  CHECK(e1 / e2 == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("Picard iteration") {
  const Params pr{2.5, 1.0, 1.0, 1.0};
  const Grid g(48.0, 1024);
  SUBCASE("zero data") {
    const auto res = picard_solve(Field::zeros(g), 1.0, pr, g, 10);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    CHECK(max_abs(res.solution) == 0.0);
  }
  SUBCASE("first iterate is cubic in the amplitude") {
    const Params cubic{3.0, 1.0, 1.0, 1.0};
    double diffs[2];
    int i = 0;
    for (double a : {1e-4, 2e-4}) {
      const Field u0 = gaussian(g, a);
      const auto res = picard_solve(u0, 1.0, cubic, g, 1);
      diffs[i++] = lq_norm(res.solution - kernel::apply_semigroup(u0, 1.0, cubic), 2.0);
    }
    CHECK(diffs[1] / diffs[0] == doctest::Approx(8.0).epsilon(1e-3));
  }
  SUBCASE("agrees with the time stepper") {
    const Field u0 = gaussian(g, 0.05);
    const auto res = picard_solve(u0, 2.0, pr, g, 50);
    CHECK(res.converged);
    for (double r : res.contraction_ratios) CHECK(r < 1.0);
    const Field etd = integrate(u0, make_config(pr, g, 2.0, 0.01)).snapshots.back().field;
    const double rel = relative_l2(res.solution, etd);
    MESSAGE("picard vs etd relative L2: " << rel << " after " << res.iterations << " iterations");
    CHECK(rel < 1e-5);
  }
  SUBCASE("large data diverges") {
    const Field u0 = gaussian(g, 40.0);
    CHECK_THROWS_AS((void)picard_solve(u0, 2.0, Params{3.0, 1, 1, 1}, g, 60), DivergenceError);
  }
}

TEST_CASE("oversized steps on large data are caught") {
  const Params pr{3.0, 1.0, 1.0, 1.0};
  const Grid g(32.0, 512);
  const Field u0 = gaussian(g, 60.0);
  try {
    (void)integrate(u0, make_config(pr, g, 20.0, 2.0));
    FAIL("expected a stability error");
  } catch (const StabilityError& e) {
    CHECK(e.suggested_dt() == doctest::Approx(0.5));
  }
}

TEST_CASE("unresolved initial data is rejected") {
  const Grid g(32.0, 64);
  Field spike = Field::zeros(g);
  spike.values()[32] = 1.0;
  CHECK_THROWS_AS((void)integrate(spike, make_config(Params{}, g, 1.0, 0.1)), ResolutionError);
}

TEST_CASE("decay of small subcritical data") {
  const Params pr{2.5, 1.0, 1.0, 1.0};
  const Grid g(256.0, 4096);
  SolveConfig c = make_config(pr, g, 500.0, 0.1);
  c.snapshot_times = oracle::log_times(1.0, 500.0, 25);
  const auto traj = integrate(gaussian(g, 0.05), c);
  double lo = kInf;
  double hi = 0.0;
  for (const auto& s : traj.snapshots) {
    const double scaled = max_abs(s.field) * std::sqrt(1.0 + s.t);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  CHECK(hi / lo < 1.5);
}

TEST_CASE("nonlinear mass for p = 4 small data") {
  const Params pr{4.0, 1.0, 1.0, 1.0};
  const Grid g(256.0, 4096);
  SolveConfig c = make_config(pr, g, 300.0, 0.1);
  c.accumulate_calM = true;
  const double M = 0.05;
  const auto traj = integrate(gaussian(g, M), c);
  // Small data: u ~ M G(., t+1), so int u^4 ~ M^4 4^{-1/2} (4 pi (t+1))^{-3/2}
  // and the integral over (0, inf) is M^4 (4 pi)^{-3/2}.
  const double linear_estimate = std::pow(M, 4) * std::pow(4.0 * oracle::pi, -1.5);
  CHECK(std::isfinite(traj.calM_tail));
  CHECK(traj.calM_tail > 0.0);
  const double analytic_tail = std::pow(M, 4) * 0.5 * std::pow(4.0 * oracle::pi, -1.5) * 2.0 /
                               std::sqrt(301.0);
  CHECK(traj.calM_tail == doctest::Approx(analytic_tail).epsilon(0.05));
  CHECK(traj.calM() == doctest::Approx(linear_estimate).epsilon(0.05));
  CHECK(traj.diagnostics.back().calM_partial == traj.calM_partial);
  SolveConfig sub = c;
  sub.params.p = 2.5;
  CHECK(std::isnan(integrate(gaussian(g, M), sub).calM_tail));
}

TEST_CASE("trajectory directory round trip") {
  const Params pr{2.5, 1.0, 1.0, 1.0};
  const Grid g(32.0, 256);
  SolveConfig c = make_config(pr, g, 1.0, 0.25);
  c.snapshot_times = {0.0, 0.5, 1.0};
  const auto traj = integrate(gaussian(g, 0.3), c);
  const auto dir = std::filesystem::temp_directory_path() / "fwdiss_traj_test";
  std::filesystem::remove_all(dir);
  save_trajectory(dir, traj);
  const auto back = load_trajectory(dir);
  std::filesystem::remove_all(dir);
  CHECK(back.config.grid == c.grid);
  CHECK(back.config.snapshot_times == c.snapshot_times);
  CHECK(back.config.dt == c.dt);
  REQUIRE(back.snapshots.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.snapshots[i].t == traj.snapshots[i].t);
    CHECK(lq_norm(back.snapshots[i].field - traj.snapshots[i].field, kInf) == 0.0);
  }
  REQUIRE(back.diagnostics.size() == traj.diagnostics.size());
  CHECK(back.diagnostics.back().l2 == traj.diagnostics.back().l2);
}
