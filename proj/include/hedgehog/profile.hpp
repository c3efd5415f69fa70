#pragma once

// Radial hedgehog profile: the singular ODE, the discretized reduced energy
// and its exact first and second derivatives.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hedgehog/grid.hpp"
#include "hedgehog/potential.hpp"

namespace hedgehog {

/// h'' from the Euler-Lagrange ODE h'' + 2h'/r - 6h/r^2 = g'(h).
inline double ode_rhs(double r, double h, double h1, double t) {
  if (!(r > 0.0)) throw std::domain_error("ode_rhs: r must be positive (r = 0 is handled by the local solver)");
  return g_prime(h, t) - 2.0 * h1 / r + 6.0 * h / (r * r);
}

/// Symmetric tridiagonal matrix; off[i] couples i and i+1.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;
};

/// Nodal discretization of
///   I(h) = int_0^R ( r^2 h'^2 / 2 + 3 h^2 + r^2 g(h) ) dr
/// with h' the centered difference on each interval, weighted by the product
/// r_i r_{i+1} of its endpoint radii, and the remaining terms by the
/// trapezoidal rule. On uniform grids the resulting Euler-Lagrange equations
/// coincide with the three-point stencil of h'' + 2h'/r - 6h/r^2 = g'(h).
class DiscreteEnergy {
 public:
  DiscreteEnergy(const RadialGrid& grid, double t) : grid_(grid), bulk_(t) {
    const std::size_t n = grid.size();
    stiffness_.resize(n - 1);
    weight_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double dr = grid.spacing(i);
      stiffness_[i] = grid[i] * grid[i + 1] / dr;
      weight_[i] += 0.5 * dr;
      weight_[i + 1] += 0.5 * dr;
    }
  }

  const RadialGrid& grid() const { return grid_; }
  const BulkPotential& bulk() const { return bulk_; }

  double value(const std::vector<double>& h) const {
    check(h);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < h.size(); ++i) {
      const double d = h[i + 1] - h[i];
      acc += 0.5 * stiffness_[i] * d * d;
    }
    for (std::size_t i = 0; i < h.size(); ++i) {
      const double r = grid_[i];
      acc += weight_[i] * (3.0 * h[i] * h[i] + r * r * bulk_.value(h[i]));
    }
    return acc;
  }

  /// Gradient with respect to every nodal value (boundary entries included).
  std::vector<double> gradient(const std::vector<double>& h) const {
    check(h);
    const std::size_t n = h.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double flux = stiffness_[i] * (h[i + 1] - h[i]);
      out[i] -= flux;
      out[i + 1] += flux;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double r = grid_[i];
      out[i] += weight_[i] * (6.0 * h[i] + r * r * bulk_.slope(h[i]));
    }
    return out;
  }

  Tridiagonal hessian(const std::vector<double>& h) const {
    check(h);
    const std::size_t n = h.size();
    Tridiagonal H{std::vector<double>(n, 0.0), std::vector<double>(n - 1, 0.0)};
    for (std::size_t i = 0; i + 1 < n; ++i) {
      H.diag[i] += stiffness_[i];
      H.diag[i + 1] += stiffness_[i];
      H.off[i] = -stiffness_[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double r = grid_[i];
      H.diag[i] += weight_[i] * (6.0 + r * r * bulk_.curvature(h[i]));
    }
    return H;
  }

  /// psi^T H(h) psi, the discrete second variation.
  double quadratic_form(const std::vector<double>& h, const std::vector<double>& psi) const {
    check(h);
    check(psi);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < psi.size(); ++i) {
      const double d = psi[i + 1] - psi[i];
      acc += stiffness_[i] * d * d;
    }
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const double r = grid_[i];
      acc += weight_[i] * (6.0 + r * r * bulk_.curvature(h[i])) * psi[i] * psi[i];
    }
    return acc;
  }

 private:
  void check(const std::vector<double>& v) const {
    if (v.size() != grid_.size()) throw std::invalid_argument("DiscreteEnergy: vector size does not match grid");
  }

  RadialGrid grid_;
  BulkPotential bulk_;
  std::vector<double> stiffness_;  // r_i r_{i+1} / dr_i
  std::vector<double> weight_;     // trapezoidal weights
};

inline double energy(const RadialProfile& p, double t) { return DiscreteEnergy(p.grid(), t).value(p.h()); }

/// Exact gradient of `energy` with respect to the interior nodal values.
inline std::vector<double> discrete_gradient(const RadialProfile& p, double t) {
  const auto full = DiscreteEnergy(p.grid(), t).gradient(p.h());
  return {full.begin() + 1, full.end() - 1};
}

/// I''(h)(psi, psi) on the grid; psi must vanish at r = R.
inline double second_variation(const RadialProfile& p, const std::vector<double>& psi, double t) {
  if (psi.size() != p.size()) throw std::invalid_argument("second_variation: psi size does not match the grid");
  if (psi.back() != 0.0) throw std::invalid_argument("second_variation: psi must vanish at r = R");
  return DiscreteEnergy(p.grid(), t).quadratic_form(p.h(), psi);
}

}  // namespace hedgehog
