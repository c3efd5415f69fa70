#pragma once

// Adaptive Dormand-Prince 5(4) integration that lands exactly on a list of
// output radii and aborts on blow-up. Step control comes from
// boost::numeric::odeint; this layer owns output placement and the guard.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include <boost/numeric/odeint.hpp>

namespace hedgehog {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntegrationStatus {
  bool diverged = false;
  double r_divergence = 0.0;
  int direction = 0;       // sign of h at divergence
  std::size_t reached = 0; // number of output radii reached
  std::size_t steps = 0;
};

/// Integrates y' = f(r, y) from r0 through every radius in `outputs`
/// (ascending, > r0). `observe(i, y)` runs at each output. Integration stops
/// with `diverged` set once |y[0]| exceeds `bound`.
template <std::size_t N, class System, class Observer>
IntegrationStatus integrate_through(System&& system, std::array<double, N>& y, double r0,
                                    std::span<const double> outputs, double tol, double bound,
                                    Observer&& observe) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, N>;
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());
  auto rhs = [&system](const State& x, State& dxdt, double r) { system(r, x, dxdt); };

  IntegrationStatus status;
  double r = r0;
  double dt = outputs.empty() ? 0.0 : std::min(1e-3, 0.01 * (outputs.back() - r0));
  dt = std::max(dt, 1e-3 * r0);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const double target = outputs[i];
    if (target < r) throw std::invalid_argument("integrate_through: outputs must be ascending");
    int failures = 0;
    while (r < target) {
      const bool clamp = r + dt >= target;
      double step = clamp ? target - r : dt;
      const double nominal = dt;
      double r_try = r;
      const auto result = stepper.try_step(rhs, y, r_try, step);
      if (result == odeint::success) {
        ++status.steps;
        failures = 0;
        r = clamp ? target : r_try;
        // try_step proposes the next step size; a clamped step must not shrink it.
        dt = clamp ? std::max(nominal, step) : step;
        if (!std::isfinite(y[0]) || std::abs(y[0]) > bound) {
          status.diverged = true;
          status.r_divergence = r;
          status.direction = (std::isnan(y[0]) || y[0] > 0.0) ? 1 : -1;
          return status;
        }
      } else {
        dt = step;
        if (++failures > 200 || dt < 1e-15 * std::max(1.0, r)) {
          // Step size collapsed: treat as a finite-r singularity.
          status.diverged = true;
          status.r_divergence = r;
          status.direction = y[0] >= 0.0 ? 1 : -1;
          return status;
        }
      }
    }
    observe(i, static_cast<const State&>(y));
    status.reached = i + 1;
  }
  return status;
}

}  // namespace hedgehog
