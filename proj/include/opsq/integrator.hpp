#pragma once

// Classical fourth-order Runge-Kutta with step-doubling error control.
//
// Each step of size h is taken once as a full step and once as two half
// steps; the half-step result is accepted when the two differ by at most
// `abs_tol` (entrywise), otherwise h is halved. The nominal step is
// 1 / steps_per_unit and is never exceeded, so results are deterministic
// for a given policy.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "opsq/errors.hpp"
#include "opsq/linalg.hpp"

namespace opsq {

struct StepPolicy {
  double steps_per_unit = 1000.0;
  double abs_tol = 1e-10;
  double min_step = 1e-12;
};

namespace detail {

template <class State, class Rhs>
State rk4_step(Rhs& rhs, double t, const State& y, double h) {
  const State k1 = rhs(t, y);
  const State k2 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k1));
  const State k3 = rhs(t + 0.5 * h, State(y + (0.5 * h) * k2));
  const State k4 = rhs(t + h, State(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct NoObserver {
  template <class State>
  void operator()(double, const State&) const {}
};

}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 to t1 (t1 >= t0).
///
/// `breakpoints` split the interval into segments on which the right-hand
/// side is continuous. Inside a segment [a, b] the right-hand side is never
/// evaluated at b itself but at the largest double below it, so
/// piecewise-constant coefficients are read from the segment they belong to.
/// `observe(t, y)` is called after every accepted step.
template <class State, class Rhs, class Observer = detail::NoObserver>
State integrate_rk4(Rhs&& rhs, State y, double t0, double t1, const StepPolicy& policy,
                    const std::vector<double>& breakpoints = {},
                    Observer&& observe = Observer{}) {
  if (!(t1 >= t0)) throw ValidationError("time_order", "integration end precedes start");
  if (t1 == t0) return y;
  const double nominal = 1.0 / policy.steps_per_unit;

  std::vector<double> edges{t0};
  for (double b : breakpoints)
    if (b > t0 && b < t1) edges.push_back(b);
  std::sort(edges.begin() + 1, edges.end());
  edges.push_back(t1);

  for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
    const double a = edges[seg];
    const double b = edges[seg + 1];
    if (b <= a) continue;
    const double b_inside = std::nextafter(b, a);
    auto seg_rhs = [&](double t, const State& s) { return rhs(std::min(t, b_inside), s); };

    // Largest step not above nominal that divides the segment evenly.
    const double len = b - a;
    const double n_steps = std::max(1.0, std::ceil(len / nominal - 1e-9));
    const double h_nominal = len / n_steps;
    double h = h_nominal;
    double t = a;
    while (t < b) {
      const double remaining = b - t;
      if (remaining <= 1e-14 * std::max(1.0, std::abs(b))) break;
      const double h_try = std::min(h, remaining);
      const State full = detail::rk4_step(seg_rhs, t, y, h_try);
      const State half = detail::rk4_step(seg_rhs, t, y, 0.5 * h_try);
      const State twice = detail::rk4_step(seg_rhs, t + 0.5 * h_try, half, 0.5 * h_try);
      const double err = max_abs(twice - full);
      if (!std::isfinite(err)) {
        std::ostringstream os;
        os << "integrator produced non-finite values at t = " << t;
        throw NumericalError(os.str());
      }
      if (err <= policy.abs_tol) {
        y = twice;
        t = (h_try == remaining) ? b : t + h_try;
        observe(t, y);
        if (h < h_nominal && err < policy.abs_tol / 64.0) h = std::min(2.0 * h, h_nominal);
      } else {
        h = 0.5 * h_try;
        if (h < policy.min_step) {
          std::ostringstream os;
          os << "step-size underflow (h < " << policy.min_step << ") at t = " << t
             << "; stiff or discontinuous right-hand side";
          throw NumericalError(os.str());
        }
      }
    }
  }
  return y;
}

}  // namespace opsq
