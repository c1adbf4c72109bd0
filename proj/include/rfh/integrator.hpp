#pragma once

// Adaptive Dormand-Prince 5(4) integration (Boost.Odeint) on plain
// std::vector states.

#include <cmath>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "rfh/errors.hpp"

namespace rfh {

using State = std::vector<double>;

struct IntegrationOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 1e-3;
};

namespace detail {

inline void check_finite(const State& x, const char* where) {
  for (double v : x)
    if (!std::isfinite(v))
      throw SolverError(std::string(where) + ": integration-tolerance-exceeded (non-finite state)");
}

}  // namespace detail

// Integrates dx/dt = rhs(x, dxdt, t) from t0 to t1 (either direction).
template <class Rhs>
State integrate(Rhs&& rhs, State x, double t0, double t1, const IntegrationOptions& opts = {}) {
  namespace odeint = boost::numeric::odeint;
  if (t0 == t1) return x;
  auto stepper = odeint::make_controlled(opts.atol, opts.rtol, odeint::runge_kutta_dopri5<State>());
  const double dt = (t1 > t0 ? 1.0 : -1.0) * opts.initial_step;
  try {
    odeint::integrate_adaptive(stepper, rhs, x, t0, t1, dt);
  } catch (const std::exception& e) {
    throw SolverError(std::string("integration-tolerance-exceeded: ") + e.what());
  }
  detail::check_finite(x, "integrate");
  return x;
}

// States at each requested time; times must be monotone and start at t0.
template <class Rhs>
std::vector<State> integrate_at(Rhs&& rhs, State x, const std::vector<double>& times,
                                const IntegrationOptions& opts = {}) {
  std::vector<State> out;
  out.reserve(times.size());
  if (times.empty()) return out;
  out.push_back(x);
  for (std::size_t i = 1; i < times.size(); ++i) {
    x = integrate(rhs, std::move(x), times[i - 1], times[i], opts);
    out.push_back(x);
  }
  return out;
}

}  // namespace rfh
