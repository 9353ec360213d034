#pragma once

#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "fwdiss/error.hpp"

namespace fwdiss::quad {

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached rule; nodes from Newton iteration on P_n, accurate to roundoff.
[[nodiscard]] const GaussLegendreRule& gauss_legendre(int n);

template <class F>
double fixed_gauss_legendre(F&& f, double a, double b, const GaussLegendreRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return sum * half;
}

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  /// A result whose refinement estimate stays above this relative level is
  /// rejected with AccuracyError.
  double rel_tol = 1e-9;
  int order = 16;
  int max_panels = 4000;
};

struct AdaptiveResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels = 0;
};

/// Globally adaptive Gauss-Legendre: the panel with the largest
/// |I_panel - (I_left + I_right)| is bisected until the summed estimate drops
/// below abs_tol (or rel_tol |I|). Throws AccuracyError on exhaustion.
template <class F>
AdaptiveResult integrate_adaptive(F&& f, double a, double b, const AdaptiveOptions& opt = {}) {
  const GaussLegendreRule& rule = gauss_legendre(opt.order);
  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto make_panel = [&](double lo, double hi) {
    const double whole = fixed_gauss_legendre(f, lo, hi, rule);
    const double mid = 0.5 * (lo + hi);
    const double split =
        fixed_gauss_legendre(f, lo, mid, rule) + fixed_gauss_legendre(f, mid, hi, rule);
    return Panel{lo, hi, split, std::abs(split - whole)};
  };

  std::priority_queue<Panel> heap;
  heap.push(make_panel(a, b));
  double total = heap.top().value;
  double error = heap.top().error;
  int panels = 1;
  while (error > opt.abs_tol && error > opt.rel_tol * 1e-3 * std::abs(total)) {
    if (panels >= opt.max_panels) break;
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = make_panel(worst.a, mid);
    const Panel right = make_panel(mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  // Re-sum to shed accumulated update roundoff.
  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  if (!std::isfinite(value) || (err > opt.abs_tol && err > opt.rel_tol * std::abs(value))) {
    std::ostringstream msg;
    msg << "adaptive quadrature on [" << a << ", " << b << "] did not converge: estimate " << value
        << ", refinement difference " << err << " after " << panels << " panels";
    throw AccuracyError(msg.str());
  }
  return {value, err, panels};
}

}  // namespace fwdiss::quad
