#pragma once

// Local solver for the singular Cauchy problem
//
//   d/dr [ r^alpha d/dr ( r^beta h ) ] = r^(alpha+beta) F(h),   h(r) / r^gamma -> a  (r -> 0)
//
// with gamma = 1 - alpha - beta >= 0 and alpha < 1, by Picard iteration of the
// equivalent integral equation
//
//   h(r) = a r^gamma + r^-beta int_0^r rho^-alpha int_0^rho s^(alpha+beta) F(h(s)) ds drho.
//
// Polynomial nonlinearities with integer gamma are iterated as truncated power
// series, which the double integral maps monomial by monomial:
//   r^m  ->  r^(m+2) / ((m + alpha + beta + 1)(m + beta + 2)).
// Anything else is iterated on a geometric grid with nested quadrature.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hedgehog/potential.hpp"

namespace hedgehog {

class PicardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularCauchyProblem {
 public:
  using Nonlinearity = std::function<double(double)>;

  static SingularCauchyProblem general(double alpha, double beta, Nonlinearity F, double K, double a) {
    SingularCauchyProblem p(alpha, beta, std::move(F), {}, K, a);
    p.validate();
    return p;
  }

  /// F(h) = sum_k coeffs[k] h^k; coeffs[0] must vanish.
  static SingularCauchyProblem polynomial(double alpha, double beta, std::vector<double> coeffs,
                                          double K, double a) {
    auto F = [c = coeffs](double h) {
      double acc = 0.0;
      for (std::size_t k = c.size(); k-- > 0;) acc = acc * h + c[k];
      return acc;
    };
    SingularCauchyProblem p(alpha, beta, std::move(F), std::move(coeffs), K, a);
    p.validate();
    return p;
  }

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double gamma() const { return 1.0 - alpha_ - beta_; }
  double K() const { return K_; }
  double a() const { return a_; }
  double F(double h) const { return F_(h); }
  const Nonlinearity& nonlinearity() const { return F_; }
  const std::vector<double>& polynomial_coefficients() const { return coeffs_; }
  bool is_polynomial() const { return !coeffs_.empty(); }

  /// C = K / (6 - 2 alpha), the ratio in the iterate-gap bound.
  double picard_constant() const { return K_ / (6.0 - 2.0 * alpha_); }

 private:
  SingularCauchyProblem(double alpha, double beta, Nonlinearity F, std::vector<double> coeffs,
                        double K, double a)
      : alpha_(alpha), beta_(beta), F_(std::move(F)), coeffs_(std::move(coeffs)), K_(K), a_(a) {}

  void validate() const {
    if (!(alpha_ < 1.0)) throw std::invalid_argument("SingularCauchyProblem: alpha must be < 1");
    if (!(gamma() >= 0.0)) throw std::invalid_argument("SingularCauchyProblem: gamma = 1 - alpha - beta must be >= 0");
    if (!F_) throw std::invalid_argument("SingularCauchyProblem: missing nonlinearity");
    if (!coeffs_.empty() && coeffs_[0] != 0.0) {
      throw std::invalid_argument("SingularCauchyProblem: polynomial F must have zero constant term");
    }
    if (std::abs(F_(0.0)) > 1e-14) throw std::invalid_argument("SingularCauchyProblem: F(0) must vanish");
  }

  double alpha_;
  double beta_;
  Nonlinearity F_;
  std::vector<double> coeffs_;
  double K_;
  double a_;
};

/// epsilon = min(delta, 1), delta = sqrt(2(3 - alpha) / ((1 + |a|) K)).
inline double contraction_radius(const SingularCauchyProblem& p) {
  if (!(p.K() > 0.0)) throw std::invalid_argument("contraction_radius: K must be positive");
  const double delta = std::sqrt(2.0 * (3.0 - p.alpha()) / ((1.0 + std::abs(p.a())) * p.K()));
  return std::min(delta, 1.0);
}

/// Upper bound on sup |h - h_n| / r^gamma over (0, r] after n iterations,
/// obtained by summing the factorial gap bound from n onwards.
inline double picard_tail_bound(const SingularCauchyProblem& p, std::size_t n, double r) {
  const double x = p.picard_constant() * r * r;
  double term = 1.0;
  for (std::size_t k = 1; k <= n; ++k) term *= x / static_cast<double>(k);
  double sum = 0.0;
  for (std::size_t k = n; k < n + 400; ++k) {
    sum += term;
    if (term <= 1e-18 * sum) break;
    term *= x / static_cast<double>(k + 1);
  }
  return (1.0 + std::abs(p.a())) * sum;
}

struct PicardOptions {
  std::size_t series_order = 20;         // number of r^2 steps kept beyond r^gamma
  std::size_t quadrature_nodes = 4000;   // geometric grid size for general F
  double quadrature_span = 1e-12;        // r_min / r_max of that grid
  bool force_quadrature = false;
};

struct LocalState {
  double h = 0.0;
  double h1 = 0.0;
};

namespace picard_detail {

using Series = std::vector<double>;  // coefficient of r^j at index j

inline double horner(const Series& c, double r) {
  double acc = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) acc = acc * r + c[j];
  return acc;
}

inline double horner_derivative(const Series& c, double r) {
  double acc = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) acc = acc * r + static_cast<double>(j) * c[j];
  return acc;
}

inline Series multiply(const Series& x, const Series& y, std::size_t degree) {
  Series out(degree + 1, 0.0);
  for (std::size_t i = 0; i < x.size() && i <= degree; ++i) {
    if (x[i] == 0.0) continue;
    for (std::size_t j = 0; j < y.size() && i + j <= degree; ++j) out[i + j] += x[i] * y[j];
  }
  return out;
}

class SeriesOperator {
 public:
  SeriesOperator(const SingularCauchyProblem& p, std::size_t degree)
      : p_(p), gamma_(static_cast<std::size_t>(std::lround(p.gamma()))), degree_(degree) {}

  std::size_t degree() const { return degree_; }

  Series seed() const {
    Series h(degree_ + 1, 0.0);
    h[gamma_] = p_.a();
    return h;
  }

  /// One Picard step, truncated at `degree` (defaults to the operator's degree).
  Series apply(const Series& h, std::optional<std::size_t> degree = std::nullopt) const {
    const std::size_t D = degree.value_or(degree_);
    const auto& f = p_.polynomial_coefficients();
    Series Fh(D + 1, 0.0);
    Series power(D + 1, 0.0);
    power[0] = 1.0;
    for (std::size_t k = 1; k < f.size(); ++k) {
      power = multiply(power, h, D);
      if (f[k] == 0.0) continue;
      for (std::size_t j = 0; j <= D; ++j) Fh[j] += f[k] * power[j];
    }
    Series out(D + 1, 0.0);
    out[gamma_] = p_.a();
    const double ab = p_.alpha() + p_.beta();
    for (std::size_t m = 0; m + 2 <= D; ++m) {
      if (Fh[m] == 0.0) continue;
      const double md = static_cast<double>(m);
      out[m + 2] += Fh[m] / ((md + ab + 1.0) * (md + p_.beta() + 2.0));
    }
    return out;
  }

  /// sum_j |d_j| r^(j - gamma): an upper bound on sup_{(0,r]} |d(s)| / s^gamma.
  double weighted_bound(const Series& d, double r) const {
    double acc = 0.0;
    for (std::size_t j = gamma_; j < d.size(); ++j) {
      acc += std::abs(d[j]) * std::pow(r, static_cast<double>(j - gamma_));
    }
    return acc;
  }

 private:
  const SingularCauchyProblem& p_;
  std::size_t gamma_;
  std::size_t degree_;
};

inline Series subtract(const Series& x, const Series& y) {
  Series out(std::max(x.size(), y.size()), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += x[i];
  for (std::size_t i = 0; i < y.size(); ++i) out[i] -= y[i];
  return out;
}

// Sup of |d| over a sample of (0, r].
inline double sampled_sup(const Series& d, double r) {
  double best = 0.0;
  constexpr int kSamples = 256;
  for (int i = 1; i <= kSamples; ++i) best = std::max(best, std::abs(horner(d, r * i / kSamples)));
  return best;
}

struct Sampled {
  std::vector<double> r;
  std::vector<double> h;
  std::vector<double> h1;
};

// Cumulative integral of f over a uniform grid in u, third order per interval.
inline std::vector<double> cumulative_integral(const std::vector<double>& f, double du, double start) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  out[0] = start;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double piece;
    if (k + 2 < n) {
      piece = du / 12.0 * (5.0 * f[k] + 8.0 * f[k + 1] - f[k + 2]);
    } else if (k >= 1) {
      piece = du / 12.0 * (-f[k - 1] + 8.0 * f[k] + 5.0 * f[k + 1]);
    } else {
      piece = 0.5 * du * (f[k] + f[k + 1]);
    }
    out[k + 1] = out[k] + piece;
  }
  return out;
}

// Integral over (-inf, u_0] assuming power-law decay of f toward r = 0.
inline double power_law_tail(const std::vector<double>& f, double du) {
  if (f.size() < 2 || f[0] == 0.0 || f[1] == 0.0 || (f[0] > 0.0) != (f[1] > 0.0)) return 0.0;
  const double p = std::log(f[1] / f[0]) / du;
  return p > 0.5 ? f[0] / p : 0.0;
}

}  // namespace picard_detail

class LocalSolution {
 public:
  using Series = picard_detail::Series;
  using Sampled = picard_detail::Sampled;

  LocalSolution(double r_valid, double a, double gamma, int n_iters, std::vector<double> gaps,
                double residual, std::variant<Series, Sampled> rep)
      : r_valid_(r_valid),
        a_(a),
        gamma_(gamma),
        n_iters_(n_iters),
        gaps_(std::move(gaps)),
        residual_(residual),
        rep_(std::move(rep)) {}

  double r_valid() const { return r_valid_; }
  int n_iters() const { return n_iters_; }
  /// gaps[n] = sup over (0, r_valid] of |h_{n+1} - h_n|.
  const std::vector<double>& iterate_gaps() const { return gaps_; }
  /// Weighted sup of the integral-equation residual of the returned solution.
  double residual() const { return residual_; }
  bool is_series() const { return std::holds_alternative<Series>(rep_); }
  const Series* series() const { return std::get_if<Series>(&rep_); }

  LocalState eval(double r) const {
    if (!(r > 0.0) || r > r_valid_ * (1.0 + 1e-12)) {
      throw std::out_of_range("LocalSolution::eval: r outside (0, r_valid]");
    }
    if (const auto* s = std::get_if<Series>(&rep_)) {
      return {picard_detail::horner(*s, r), picard_detail::horner_derivative(*s, r)};
    }
    const auto& g = std::get<Sampled>(rep_);
    if (r <= g.r.front()) {
      return {a_ * std::pow(r, gamma_), gamma_ == 0.0 ? 0.0 : a_ * gamma_ * std::pow(r, gamma_ - 1.0)};
    }
    auto it = std::upper_bound(g.r.begin(), g.r.end(), r);
    std::size_t k = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - g.r.begin(), g.r.size() - 1));
    const std::size_t k0 = k - 1;
    // Cubic Hermite interpolation in r.
    const double dr = g.r[k] - g.r[k0];
    const double s = (r - g.r[k0]) / dr;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    const double h = h00 * g.h[k0] + h10 * dr * g.h1[k0] + h01 * g.h[k] + h11 * dr * g.h1[k];
    const double d00 = (6 * s2 - 6 * s) / dr, d10 = 3 * s2 - 4 * s + 1, d01 = (-6 * s2 + 6 * s) / dr,
                 d11 = 3 * s2 - 2 * s;
    const double h1 = d00 * g.h[k0] + d10 * g.h1[k0] + d01 * g.h[k] + d11 * g.h1[k];
    return {h, h1};
  }

 private:
  double r_valid_;
  double a_;
  double gamma_;
  int n_iters_;
  std::vector<double> gaps_;
  double residual_;
  std::variant<Series, Sampled> rep_;
};

namespace picard_detail {

inline bool integer_gamma(const SingularCauchyProblem& p) {
  const double g = p.gamma();
  return std::abs(g - std::round(g)) < 1e-12 && g < 64.0;
}

inline LocalSolution solve_series(const SingularCauchyProblem& p, double r_max, double tol, int n_max,
                                  const PicardOptions& opt) {
  const std::size_t gamma = static_cast<std::size_t>(std::lround(p.gamma()));
  const std::size_t degree = gamma + 2 * opt.series_order;
  SeriesOperator op(p, degree);
  Series h = op.seed();
  std::vector<double> gaps;
  int n = 0;
  bool converged = false;
  while (n < n_max) {
    Series next = op.apply(h);
    const Series d = subtract(next, h);
    gaps.push_back(sampled_sup(d, r_max));
    h = std::move(next);
    ++n;
    if (op.weighted_bound(d, r_max) <= tol || picard_tail_bound(p, static_cast<std::size_t>(n), r_max) <= tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw PicardError("picard_solve: no convergence after " + std::to_string(n_max) + " iterations");
  }
  // Residual against a less truncated operator exposes the truncation error.
  const std::size_t wide = 3 * degree + 2;
  Series h_wide = h;
  h_wide.resize(wide + 1, 0.0);
  const double residual = op.weighted_bound(subtract(op.apply(h_wide, wide), h_wide), r_max);
  if (residual > 10.0 * tol) {
    throw PicardError("picard_solve: integral-equation residual " + std::to_string(residual) +
                      " exceeds 10*tol; increase series_order");
  }
  return LocalSolution(r_max, p.a(), p.gamma(), n, std::move(gaps), residual, std::move(h));
}

class QuadratureOperator {
 public:
  QuadratureOperator(const SingularCauchyProblem& p, double r_max, const PicardOptions& opt) : p_(p) {
    const std::size_t M = std::max<std::size_t>(opt.quadrature_nodes, 16);
    const double u0 = std::log(r_max * opt.quadrature_span);
    const double u1 = std::log(r_max);
    du_ = (u1 - u0) / static_cast<double>(M - 1);
    r_.resize(M);
    for (std::size_t k = 0; k < M; ++k) r_[k] = std::exp(u0 + du_ * static_cast<double>(k));
    r_.back() = r_max;
  }

  const std::vector<double>& nodes() const { return r_; }

  Sampled seed() const {
    Sampled s{r_, {}, {}};
    const double g = p_.gamma();
    for (double r : r_) {
      s.h.push_back(p_.a() * std::pow(r, g));
      s.h1.push_back(g == 0.0 ? 0.0 : p_.a() * g * std::pow(r, g - 1.0));
    }
    return s;
  }

  Sampled apply(const Sampled& cur) const {
    const std::size_t M = r_.size();
    const double al = p_.alpha(), be = p_.beta(), g = p_.gamma();
    std::vector<double> inner(M), outer(M);
    for (std::size_t k = 0; k < M; ++k) inner[k] = std::pow(r_[k], al + be + 1.0) * p_.F(cur.h[k]);
    const std::vector<double> J = cumulative_integral(inner, du_, power_law_tail(inner, du_));
    for (std::size_t k = 0; k < M; ++k) outer[k] = std::pow(r_[k], 1.0 - al) * J[k];
    const std::vector<double> Phi = cumulative_integral(outer, du_, power_law_tail(outer, du_));
    Sampled next{r_, std::vector<double>(M), std::vector<double>(M)};
    for (std::size_t k = 0; k < M; ++k) {
      const double r = r_[k];
      next.h[k] = p_.a() * std::pow(r, g) + std::pow(r, -be) * Phi[k];
      next.h1[k] = (g == 0.0 ? 0.0 : p_.a() * g * std::pow(r, g - 1.0)) - be * std::pow(r, -be - 1.0) * Phi[k] +
                   std::pow(r, -be - al) * J[k];
    }
    return next;
  }

  double weighted_gap(const Sampled& x, const Sampled& y) const {
    double best = 0.0;
    for (std::size_t k = 0; k < r_.size(); ++k) {
      best = std::max(best, std::abs(x.h[k] - y.h[k]) / std::pow(r_[k], p_.gamma()));
    }
    return best;
  }

  static double gap(const Sampled& x, const Sampled& y) {
    double best = 0.0;
    for (std::size_t k = 0; k < x.h.size(); ++k) best = std::max(best, std::abs(x.h[k] - y.h[k]));
    return best;
  }

 private:
  const SingularCauchyProblem& p_;
  std::vector<double> r_;
  double du_ = 0.0;
};

inline LocalSolution solve_quadrature(const SingularCauchyProblem& p, double r_max, double tol, int n_max,
                                      const PicardOptions& opt) {
  QuadratureOperator op(p, r_max, opt);
  Sampled h = op.seed();
  std::vector<double> gaps;
  int n = 0;
  bool converged = false;
  while (n < n_max) {
    Sampled next = op.apply(h);
    const double weighted = op.weighted_gap(next, h);
    gaps.push_back(QuadratureOperator::gap(next, h));
    h = std::move(next);
    ++n;
    if (weighted <= tol || picard_tail_bound(p, static_cast<std::size_t>(n), r_max) <= tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw PicardError("picard_solve: no convergence after " + std::to_string(n_max) + " iterations");
  }
  const double residual = op.weighted_gap(op.apply(h), h);
  if (residual > 10.0 * tol) {
    throw PicardError("picard_solve: integral-equation residual " + std::to_string(residual) + " exceeds 10*tol");
  }
  return LocalSolution(r_max, p.a(), p.gamma(), n, std::move(gaps), residual, std::move(h));
}

}  // namespace picard_detail

/// Picard iteration from h_0 = a r^gamma on (0, r_max]. Stops once successive
/// iterates differ by less than tol (sup norm weighted by r^-gamma) or the
/// factorial tail bound guarantees tol.
inline LocalSolution picard_solve(const SingularCauchyProblem& p, double r_max, double tol, int n_max,
                                  const PicardOptions& opt = {}) {
  if (!(tol > 0.0)) throw std::invalid_argument("picard_solve: tol must be positive");
  if (!(r_max > 0.0)) throw std::invalid_argument("picard_solve: r_max must be positive");
  const double eps = contraction_radius(p);
  if (r_max > eps * (1.0 + 1e-12)) {
    throw PicardError("picard_solve: r_max = " + std::to_string(r_max) + " exceeds the contraction radius " +
                      std::to_string(eps));
  }
  if (p.is_polynomial() && picard_detail::integer_gamma(p) && !opt.force_quadrature) {
    return picard_detail::solve_series(p, r_max, tol, n_max, opt);
  }
  return picard_detail::solve_quadrature(p, r_max, tol, n_max, opt);
}

// Hedgehog instance: alpha = -4, beta = 3 (gamma = 2), F = g'(., t).

/// Lipschitz constant of g'(., t) on [-(|a|+1), |a|+1], i.e. max |g''| there.
inline double hedgehog_lipschitz(double t, double a) {
  const double m = std::abs(a) + 1.0;
  return std::max({std::abs(g_second(-m, t)), std::abs(g_second(m, t)), std::abs(g_second(0.5, t))});
}

inline SingularCauchyProblem hedgehog_problem(double t, double a) {
  return SingularCauchyProblem::polynomial(-4.0, 3.0, {0.0, t, -3.0, 2.0}, hedgehog_lipschitz(t, a), a);
}

inline double hedgehog_contraction_radius(double t, double a) {
  return contraction_radius(hedgehog_problem(t, a));
}

/// (h, h') at r0 of the local solution with h(r) / r^2 -> a.
inline LocalState hedgehog_local(double t, double a, double r0, double tol = 1e-15) {
  if (!(t <= kSuperheatingT)) throw std::domain_error("hedgehog_local: t exceeds 9/8");
  const auto p = hedgehog_problem(t, a);
  return picard_solve(p, r0, tol, 200).eval(r0);
}

}  // namespace hedgehog
