#pragma once

// Composite Gauss-Legendre quadrature for operator-valued integrands.

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "bbgky/error.hpp"

namespace bbgky {

/// Nodes and weights of the 10-point rule on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  static const GaussLegendreRule& ten_point() {
    static const GaussLegendreRule rule = [] {
      using G = boost::math::quadrature::gauss<double, 10>;
      GaussLegendreRule r;
      const auto& x = G::abscissa();
      const auto& w = G::weights();
      for (std::size_t i = x.size(); i-- > 0;) {
        r.nodes.push_back(-x[i]);
        r.weights.push_back(w[i]);
      }
      for (std::size_t i = 0; i < x.size(); ++i) {
        r.nodes.push_back(x[i]);
        r.weights.push_back(w[i]);
      }
      return r;
    }();
    return rule;
  }

  std::size_t size() const { return nodes.size(); }
};

/// One point of a composite rule on [a, b].
struct QuadraturePoint {
  double x;
  double w;
};

inline std::vector<QuadraturePoint> composite_points(double a, double b, int panels) {
  if (panels < 1) throw PreconditionError("composite_points: need at least one panel");
  const auto& rule = GaussLegendreRule::ten_point();
  std::vector<QuadraturePoint> pts;
  pts.reserve(rule.size() * static_cast<std::size_t>(panels));
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    for (std::size_t i = 0; i < rule.size(); ++i)
      pts.push_back({lo + 0.5 * h * (rule.nodes[i] + 1.0), 0.5 * h * rule.weights[i]});
  }
  return pts;
}

/// Integral of f over [a, b] with `panels` equal panels. T must support
/// T + T and double * T; `zero` is the additive identity.
template <class T, class F>
T integrate_composite(F&& f, double a, double b, int panels, T zero) {
  T acc = std::move(zero);
  for (const auto& q : composite_points(a, b, panels)) acc = acc + q.w * f(q.x);
  return acc;
}

struct AdaptiveOptions {
  double tol = 1e-9;
  int initial_panels = 1;
  int max_panels = 256;
};

template <class T>
struct AdaptiveResult {
  T value;
  double error_estimate;
  int panels;
};

/// Doubles the panel count until successive values differ (by `dist`) below tol.
/// `evaluate(panels)` computes the whole quadrature at a given refinement, which
/// lets nested integrals refine all levels together.
template <class T, class Eval, class Dist>
AdaptiveResult<T> refine_until_converged(Eval&& evaluate, Dist&& dist, const AdaptiveOptions& opt) {
  int panels = std::max(1, opt.initial_panels);
  T prev = evaluate(panels);
  double err = 0.0;
  while (true) {
    if (2 * panels > opt.max_panels) break;
    panels *= 2;
    T next = evaluate(panels);
    err = dist(next, prev);
    prev = std::move(next);
    if (err < opt.tol) return {std::move(prev), err, panels};
  }
  if (err >= opt.tol)
    throw IntegrationError("quadrature did not converge: last difference " + std::to_string(err) + " at " +
                           std::to_string(panels) + " panels");
  return {std::move(prev), err, panels};
}

}  // namespace bbgky
