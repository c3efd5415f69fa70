#pragma once

// Certificates evaluated on computed profiles: the bounds 0 <= h <= h_plus,
// monotonicity, the radially reduced Pohozaev identity, the two-solution
// difference identity, ODE residuals, the second variation along random test
// functions, and a multi-start uniqueness probe.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hedgehog/grid.hpp"
#include "hedgehog/minimize.hpp"
#include "hedgehog/parallel.hpp"
#include "hedgehog/potential.hpp"
#include "hedgehog/profile.hpp"
#include "hedgehog/shooting.hpp"

namespace hedgehog {

class GridMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BoundsCheck {
  bool ok = true;
  double max_violation = 0.0;  // distance outside [0, h_plus], 0 when inside
};

struct MonotoneCheck {
  bool ok = true;
  double min_slope = 0.0;  // smallest forward difference beyond the first interval
};

/// Passes iff -tol <= h[i] <= h_plus + tol everywhere.
inline BoundsCheck check_bounds(const RadialProfile& p, double t, double tol) {
  const double hp = h_plus(t);
  BoundsCheck out;
  for (double v : p.h()) out.max_violation = std::max({out.max_violation, -v, v - hp});
  out.ok = out.max_violation <= tol;
  return out;
}

/// Every forward difference must exceed -tol, and those beyond the first
/// interval (where h'(0) = 0 allows a flat start) must be strictly positive.
inline MonotoneCheck check_monotone(const RadialProfile& p, double tol) {
  const auto& h = p.h();
  const auto& grid = p.grid();
  MonotoneCheck out;
  out.min_slope = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < h.size(); ++i) {
    const double slope = (h[i + 1] - h[i]) / grid.spacing(i);
    if (!(slope > -tol)) out.ok = false;
    if (i == 0) continue;
    out.min_slope = std::min(out.min_slope, slope);
    if (!(slope > 0.0)) out.ok = false;
  }
  return out;
}

namespace diagnostics_detail {

inline double trapezoid(const RadialGrid& grid, const std::vector<double>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) acc += 0.5 * grid.spacing(i) * (f[i] + f[i + 1]);
  return acc;
}

}  // namespace diagnostics_detail

/// Both sides of the radial Pohozaev identity
///   I(h) + 2 int r^2 g(h) dr = 3 R h(R)^2 - (R^3 / 2) h'(R)^2,
/// with I from the trapezoidal rule on the full density using the profile's
/// derivative column.
struct PohozaevTerms {
  double energy = 0.0;         // I(h)
  double bulk_integral = 0.0;  // int_0^R r^2 g(h) dr
  double boundary = 0.0;       // right-hand side
  double lhs() const { return energy + 2.0 * bulk_integral; }
  double residual() const { return std::abs(lhs() - boundary); }
  double scale() const { return std::abs(energy) + 2.0 * std::abs(bulk_integral) + std::abs(boundary); }
};

inline PohozaevTerms pohozaev_terms(const RadialProfile& p, double t) {
  const BulkPotential bulk(t);
  const auto& grid = p.grid();
  const auto& h = p.h();
  const auto& h1 = p.h1();
  const std::size_t n = h.size();
  std::vector<double> density(n), bulk_density(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid[i];
    bulk_density[i] = r * r * bulk.value(h[i]);
    density[i] = 0.5 * r * r * h1[i] * h1[i] + 3.0 * h[i] * h[i] + bulk_density[i];
  }
  PohozaevTerms out;
  out.energy = diagnostics_detail::trapezoid(grid, density);
  out.bulk_integral = diagnostics_detail::trapezoid(grid, bulk_density);
  const double R = p.R();
  const double hR = h.back(), h1R = h1.back();
  out.boundary = 3.0 * R * hR * hR - 0.5 * R * R * R * h1R * h1R;
  return out;
}

inline double pohozaev_residual(const RadialProfile& p, double t) { return pohozaev_terms(p, t).residual(); }

/// The two sides of 8 pi int r^2 (g(h1) - g(h2)) dr = 2 pi R^3 (h2'(R)^2 - h1'(R)^2),
/// which holds for two minimizers of equal energy.
struct DifferenceIdentityTerms {
  double bulk_side = 0.0;
  double boundary_side = 0.0;
  double residual() const { return std::abs(bulk_side - boundary_side); }
};

inline DifferenceIdentityTerms difference_identity_terms(const RadialProfile& p1, const RadialProfile& p2, double t) {
  if (!(p1.grid() == p2.grid())) {
    throw GridMismatchError("difference_identity_residual: profiles live on different grids; resample first");
  }
  const BulkPotential bulk(t);
  const auto& grid = p1.grid();
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = grid[i];
    f[i] = r * r * (bulk.value(p1.h()[i]) - bulk.value(p2.h()[i]));
  }
  const double pi = std::numbers::pi;
  const double R = grid.R();
  const double s1 = p1.boundary_slope(), s2 = p2.boundary_slope();
  return {8.0 * pi * diagnostics_detail::trapezoid(grid, f), 2.0 * pi * R * R * R * (s2 * s2 - s1 * s1)};
}

inline double difference_identity_residual(const RadialProfile& p1, const RadialProfile& p2, double t) {
  return difference_identity_terms(p1, p2, t).residual();
}

/// |h'' + 2h'/r - 6h/r^2 - F(h)| at interior nodes, with three-point
/// nonuniform differences (exact for quadratics).
inline std::vector<double> ode_residual(const RadialProfile& p, const std::function<double(double)>& F) {
  const auto& grid = p.grid();
  const auto& h = p.h();
  std::vector<double> out(h.size() - 2);
  for (std::size_t i = 1; i + 1 < h.size(); ++i) {
    const double dm = grid.spacing(i - 1), dp = grid.spacing(i), r = grid[i];
    const double fm = (h[i] - h[i - 1]) / dm, fp = (h[i + 1] - h[i]) / dp;
    const double h2 = 2.0 * (fp - fm) / (dm + dp);
    const double h1 = (dm * fp + dp * fm) / (dm + dp);
    out[i - 1] = std::abs(h2 + 2.0 * h1 / r - 6.0 * h[i] / (r * r) - F(h[i]));
  }
  return out;
}

inline std::vector<double> ode_residual(const RadialProfile& p, double t) {
  return ode_residual(p, [t](double h) { return g_prime(h, t); });
}

/// Random variations vanishing at r = 0 and r = R: tents and smooth bumps at
/// random centers and widths, normalized so that
/// int r^2 (psi'^2 + 6 psi^2 / r^2) dr = 1 on the grid.
inline std::vector<std::vector<double>> random_test_functions(const RadialGrid& grid, std::size_t count,
                                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double R = grid.R();
  const std::size_t n = grid.size();
  std::vector<std::vector<double>> out;
  out.reserve(count);
  while (out.size() < count) {
    const bool tent = out.size() % 2 == 0;
    const double width = R * (0.02 + 0.48 * unit(rng));
    const double center = width + (R - 2.0 * width) * unit(rng);
    std::vector<double> psi(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double x = (grid[i] - center) / width;
      if (std::abs(x) >= 1.0) continue;
      psi[i] = tent ? 1.0 - std::abs(x) : std::exp(1.0 - 1.0 / (1.0 - x * x));
    }
    double q = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double d = psi[i + 1] - psi[i];
      q += grid[i] * grid[i + 1] * d * d / grid.spacing(i);
    }
    for (std::size_t i = 1; i + 1 < n; ++i) q += 3.0 * (grid.spacing(i - 1) + grid.spacing(i)) * psi[i] * psi[i];
    if (!(q > 0.0)) continue;  // support fell between nodes
    const double s = 1.0 / std::sqrt(q);
    for (auto& v : psi) v *= s;
    out.push_back(std::move(psi));
  }
  return out;
}

/// Smallest I''(h)(psi, psi) over `count` random test functions.
inline double second_variation_min(const RadialProfile& p, double t, std::size_t count, std::uint64_t seed) {
  const DiscreteEnergy energy_fn(p.grid(), t);
  double m = std::numeric_limits<double>::infinity();
  for (const auto& psi : random_test_functions(p.grid(), count, seed)) {
    m = std::min(m, energy_fn.quadratic_form(p.h(), psi));
  }
  return m;
}

struct UniquenessOptions {
  std::size_t n_starts = 10;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  double shoot_tol = 1e-10;
  MinimizeOptions minimize{};
  double a_min = 1e-4;  // logarithmic a-scan
  double a_max = 1e3;
  std::size_t scan_points = 161;
  // Profiles closer than distinct_tol * h_plus count as the same solution;
  // discretization differences between solvers stay far below it.
  double distinct_tol = 1e-2;
};

struct UniquenessRecord {
  std::size_t n_starts = 0;
  std::size_t n_failed = 0;
  double max_pairwise_distance = 0.0;  // among converged minimizers
  double shooting_distance = 0.0;      // shooting profile vs the farthest minimizer
  int shooting_root_count = 0;
  std::optional<bool> verdict;         // only for t < 0
  std::vector<RadialProfile> minimizers;
};

namespace diagnostics_detail {

inline double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Random admissible start: a power ramp with a random low-frequency
// perturbation, clipped to [0, h_plus], endpoints fixed.
inline std::vector<double> random_start(const RadialGrid& grid, double hp, std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(index)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double power = 0.5 + 3.5 * unit(rng);
  const double amp = 0.4 * unit(rng);
  const double freq = 1.0 + std::floor(5.0 * unit(rng));
  const double phase = 2.0 * std::numbers::pi * unit(rng);
  const double noise = 0.1 * unit(rng);
  const double R = grid.R();
  std::vector<double> h(grid.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = grid[i] / R;
    const double v = std::pow(x, power) + amp * std::sin(freq * std::numbers::pi * x + phase) + noise * (unit(rng) - 0.5);
    h[i] = hp * std::clamp(v, 0.0, 1.0);
  }
  h.front() = 0.0;
  h.back() = hp;
  return h;
}

}  // namespace diagnostics_detail

/// Multi-start minimization plus shooting on `grid`. Starts are seeded by
/// (seed, index), so results do not depend on scheduling.
inline UniquenessRecord uniqueness_probe(double t, const RadialGrid& grid, const UniquenessOptions& opt = {}) {
  using diagnostics_detail::sup_distance;
  if (opt.n_starts == 0) throw std::invalid_argument("uniqueness_probe: n_starts must be positive");
  const double hp = h_plus(t);
  std::vector<std::optional<RadialProfile>> results(opt.n_starts);
  parallel_for(opt.n_starts, opt.workers, [&](std::size_t i) {
    RadialProfile init(grid, diagnostics_detail::random_start(grid, hp, opt.seed, i));
    try {
      results[i] = minimize_energy(t, grid, init, opt.minimize);
    } catch (const MinimizationError&) {
    }
  });

  UniquenessRecord rec;
  rec.n_starts = opt.n_starts;
  for (auto& r : results) {
    if (r) {
      rec.minimizers.push_back(std::move(*r));
    } else {
      ++rec.n_failed;
    }
  }
  for (std::size_t i = 0; i < rec.minimizers.size(); ++i) {
    for (std::size_t j = i + 1; j < rec.minimizers.size(); ++j) {
      rec.max_pairwise_distance =
          std::max(rec.max_pairwise_distance, sup_distance(rec.minimizers[i].h(), rec.minimizers[j].h()));
    }
  }
  bool shooting_ok = true;
  try {
    const auto shot = find_shooting_param(t, grid, opt.shoot_tol);
    for (const auto& m : rec.minimizers) {
      rec.shooting_distance = std::max(rec.shooting_distance, sup_distance(m.h(), shot.profile.h()));
    }
  } catch (const std::runtime_error&) {
    shooting_ok = false;
  }
  ShootingOptions scan_opt;
  rec.shooting_root_count = count_shooting_roots(t, grid.R(), opt.a_min, opt.a_max, opt.scan_points, scan_opt);
  if (t < 0.0) {
    const double limit = opt.distinct_tol * hp;
    rec.verdict = shooting_ok && rec.n_failed == 0 && rec.shooting_root_count == 1 &&
                  rec.max_pairwise_distance <= limit && rec.shooting_distance <= limit;
  }
  return rec;
}

struct DiagnosticsOptions {
  double tol = 1e-6;               // bounds and monotonicity slack
  double pohozaev_tol = 1e-4;      // relative to PohozaevTerms::scale()
  double second_variation_floor = -1e-8;
  std::size_t n_test_functions = 100;
  std::uint64_t seed = 0;
  bool run_uniqueness = true;
  UniquenessOptions uniqueness{};
};

struct DiagnosticsReport {
  double t = 0.0;
  double R = 0.0;
  BoundsCheck bounds;
  MonotoneCheck monotone;
  double boundary_slope = 0.0;
  double pohozaev_residual = 0.0;
  double pohozaev_relative = 0.0;
  bool pohozaev_ok = true;
  double ode_residual_max = 0.0;
  double second_variation_min = 0.0;
  bool second_variation_ok = true;
  std::optional<UniquenessRecord> uniqueness;

  /// Certificates that apply: bounds, monotonicity, positive h'(R), Pohozaev,
  /// second variation, and the uniqueness verdict where one is attached.
  bool certified() const {
    bool ok = bounds.ok && monotone.ok && boundary_slope > 0.0 && pohozaev_ok && second_variation_ok;
    if (uniqueness && uniqueness->verdict) ok = ok && *uniqueness->verdict;
    return ok;
  }
};

inline DiagnosticsReport diagnose(const RadialProfile& p, double t, const DiagnosticsOptions& opt = {}) {
  DiagnosticsReport rep;
  rep.t = t;
  rep.R = p.R();
  rep.bounds = check_bounds(p, t, opt.tol);
  rep.monotone = check_monotone(p, opt.tol);
  rep.boundary_slope = p.boundary_slope();
  const PohozaevTerms poh = pohozaev_terms(p, t);
  rep.pohozaev_residual = poh.residual();
  rep.pohozaev_relative = poh.scale() > 0.0 ? poh.residual() / poh.scale() : poh.residual();
  rep.pohozaev_ok = rep.pohozaev_relative <= opt.pohozaev_tol;
  const auto res = ode_residual(p, t);
  rep.ode_residual_max = res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
  rep.second_variation_min = second_variation_min(p, t, opt.n_test_functions, opt.seed);
  rep.second_variation_ok = rep.second_variation_min >= opt.second_variation_floor;
  if (opt.run_uniqueness) {
    rep.uniqueness = uniqueness_probe(t, p.grid(), opt.uniqueness);
    rep.uniqueness->minimizers.clear();
  }
  return rep;
}

}  // namespace hedgehog
