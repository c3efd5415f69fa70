#pragma once

// Direct minimization of the discretized reduced energy over interior nodal
// values, with h(0) = 0 and h(R) = h_plus held fixed and iterates projected
// onto the box [0, h_plus].

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hedgehog/grid.hpp"
#include "hedgehog/potential.hpp"
#include "hedgehog/profile.hpp"

namespace hedgehog {

class MinimizationError : public std::runtime_error {
 public:
  MinimizationError(const std::string& what, double gradient_norm, int iterations)
      : std::runtime_error(what), gradient_norm_(gradient_norm), iterations_(iterations) {}
  double gradient_norm() const { return gradient_norm_; }
  int iterations() const { return iterations_; }

 private:
  double gradient_norm_;
  int iterations_;
};

struct MinimizeOptions {
  double tol = 1e-8;     // max-norm of the projected discrete gradient
  int max_iters = 500;
};

namespace minimize_detail {

// Solves (T + shift I) x = b for a symmetric tridiagonal T; returns false if a
// pivot is not positive.
inline bool solve_spd_tridiagonal(const std::vector<double>& diag, const std::vector<double>& off, double shift,
                                  const std::vector<double>& b, std::vector<double>& x) {
  const std::size_t n = diag.size();
  std::vector<double> d(n), l(n, 0.0);
  x = b;
  d[0] = diag[0] + shift;
  if (!(d[0] > 0.0)) return false;
  for (std::size_t i = 1; i < n; ++i) {
    l[i] = off[i - 1] / d[i - 1];
    d[i] = diag[i] + shift - l[i] * off[i - 1];
    if (!(d[i] > 0.0)) return false;
  }
  for (std::size_t i = 1; i < n; ++i) x[i] -= l[i] * x[i - 1];
  for (std::size_t i = 0; i < n; ++i) x[i] /= d[i];
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= l[i + 1] * x[i + 1];
  return true;
}

}  // namespace minimize_detail

/// Projected Newton descent with an Armijo backtracking line search. The
/// Newton system uses the exact tridiagonal Hessian, shifted when it is not
/// positive definite.
inline RadialProfile minimize_energy(double t, const RadialGrid& grid, const std::optional<RadialProfile>& init = {},
                                     const MinimizeOptions& opt = {}) {
  if (!(t < 1.0)) throw std::domain_error("minimize_energy: requires t < 1");
  const DiscreteEnergy energy_fn(grid, t);
  const double hp = energy_fn.bulk().h_plus();
  const double R = grid.R();
  const std::size_t n = grid.size();
  const std::size_t m = n - 2;  // interior unknowns

  std::vector<double> h(n);
  if (init) {
    if (!(init->grid() == grid)) throw std::invalid_argument("minimize_energy: init profile is on a different grid");
    h = init->h();
  } else {
    for (std::size_t i = 0; i < n; ++i) h[i] = hp * (grid[i] / R) * (grid[i] / R);
  }
  h.front() = 0.0;
  h.back() = hp;
  auto project = [hp](double v) { return std::clamp(v, 0.0, hp); };
  for (std::size_t i = 1; i + 1 < n; ++i) h[i] = project(h[i]);

  auto projected_gradient = [&](const std::vector<double>& grad_full, std::vector<bool>& active) {
    double norm = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = k + 1;
      const double gk = grad_full[i];
      active[k] = (h[i] <= 0.0 && gk > 0.0) || (h[i] >= hp && gk < 0.0);
      if (!active[k]) norm = std::max(norm, std::abs(gk));
    }
    return norm;
  };

  double E = energy_fn.value(h);
  std::vector<bool> active(m, false);
  std::vector<double> grad = energy_fn.gradient(h);
  double gnorm = projected_gradient(grad, active);
  int iter = 0;
  for (; iter < opt.max_iters && gnorm > opt.tol; ++iter) {
    const Tridiagonal H = energy_fn.hessian(h);
    std::vector<double> diag(m), off(m > 0 ? m - 1 : 0), rhs(m), dir;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = k + 1;
      diag[k] = active[k] ? 1.0 : H.diag[i];
      rhs[k] = active[k] ? 0.0 : -grad[i];
      if (k + 1 < m) off[k] = (active[k] || active[k + 1]) ? 0.0 : H.off[i];
    }
    double scale = 0.0;
    for (double d : diag) scale = std::max(scale, std::abs(d));
    double shift = 0.0;
    while (!minimize_detail::solve_spd_tridiagonal(diag, off, shift, rhs, dir)) {
      shift = shift == 0.0 ? 1e-10 * scale : 4.0 * shift;
      if (shift > 1e6 * scale) {
        throw MinimizationError("minimize_energy: could not build a descent direction", gnorm, iter);
      }
    }

    // Armijo backtracking on the projected path; the slack absorbs rounding in E.
    const double slack = 1e-14 * std::max(1.0, std::abs(E));
    std::vector<double> trial(h);
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      double decrease = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = k + 1;
        trial[i] = project(h[i] + step * dir[k]);
        decrease += grad[i] * (trial[i] - h[i]);
      }
      const double E_trial = energy_fn.value(trial);
      if (E_trial <= E + 1e-4 * decrease + slack) {
        accepted = true;
        E = E_trial;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Rounding floor: accept the full step if it still shrinks the gradient.
      for (std::size_t k = 0; k < m; ++k) trial[k + 1] = project(h[k + 1] + dir[k]);
      std::vector<bool> trial_active(m, false);
      const std::vector<double> trial_grad = energy_fn.gradient(trial);
      std::swap(h, trial);
      const double trial_norm = projected_gradient(trial_grad, trial_active);
      if (!(trial_norm < 0.5 * gnorm)) {
        std::swap(h, trial);
        throw MinimizationError("minimize_energy: line search failed", gnorm, iter);
      }
      E = energy_fn.value(h);
    } else {
      std::swap(h, trial);
    }
    grad = energy_fn.gradient(h);
    gnorm = projected_gradient(grad, active);
  }
  if (gnorm > opt.tol) {
    throw MinimizationError("minimize_energy: no convergence after " + std::to_string(iter) +
                                " iterations (gradient norm " + std::to_string(gnorm) + ")",
                            gnorm, iter);
  }
  ProfileMeta meta{"minimization", 0.0, iter, false};
  return RadialProfile(grid, std::move(h), std::move(meta));
}

}  // namespace hedgehog
