#pragma once

// Classical fourth-order Runge-Kutta with step-doubling error control.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "bbgky/error.hpp"

namespace bbgky::rk4 {

struct Options {
  double tol = 1e-8;        // local error bound per step
  double initial_step = 0.05;
  double min_step = 1e-9;
  double max_step = 0.25;
  bool adaptive = true;     // false: fixed step = initial_step
};

struct Stats {
  int accepted = 0;
  int rejected = 0;
  double max_local_error = 0.0;
};

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  Stats stats;
};

/// One classical RK4 step. State needs State + State and double * State.
template <class State, class Rhs>
State step(const Rhs& rhs, double t, const State& y, double h) {
  const State k1 = rhs(t, y);
  const State k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1);
  const State k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2);
  const State k4 = rhs(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Integrates y' = rhs(t, y) from t0 through every time in `outputs`
/// (ascending, >= t0) and records the state at each of them.
///
/// Adaptive mode compares one step of size h with two of size h/2; the
/// Richardson estimate |y_h/2 - y_h| / 15 must stay below tol or the step is
/// rejected and shrunk. `norm` measures a State.
template <class State, class Rhs, class Norm>
Trajectory<State> integrate(const Rhs& rhs, State y, double t0, const std::vector<double>& outputs, const Norm& norm,
                            const Options& opt = {}) {
  Trajectory<State> out;
  double t = t0;
  double h = opt.initial_step;
  for (double target : outputs) {
    if (target < t - 1e-15) throw IntegrationError("rk4::integrate: output times must be ascending");
    while (t < target - 1e-14) {
      double hs = std::min({h, target - t, opt.max_step});
      if (!opt.adaptive) {
        y = step(rhs, t, y, hs);
        t += hs;
        ++out.stats.accepted;
        continue;
      }
      const State full = step(rhs, t, y, hs);
      const State half = step(rhs, t, y, 0.5 * hs);
      const State two = step(rhs, t + 0.5 * hs, half, 0.5 * hs);
      const double err = norm(two + (-1.0) * full) / 15.0;
      if (!std::isfinite(err)) throw IntegrationError("rk4::integrate: non-finite state at t=" + std::to_string(t));
      if (err <= opt.tol) {
        y = two;
        t += hs;
        ++out.stats.accepted;
        out.stats.max_local_error = std::max(out.stats.max_local_error, err);
        const double grow = err > 0.0 ? 0.9 * std::pow(opt.tol / err, 0.2) : 2.0;
        // only grow from a step that was not clipped by the output grid
        if (hs == h) h = std::min(opt.max_step, hs * std::clamp(grow, 1.0, 2.0));
      } else {
        ++out.stats.rejected;
        h = hs * std::clamp(0.9 * std::pow(opt.tol / err, 0.2), 0.1, 0.5);
        if (h < opt.min_step)
          throw IntegrationError("rk4::integrate: step size underflow at t=" + std::to_string(t) +
                                 " (local error " + std::to_string(err) + ")");
      }
    }
    out.times.push_back(target);
    out.states.push_back(y);
  }
  return out;
}

}  // namespace bbgky::rk4
