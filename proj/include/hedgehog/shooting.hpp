#pragma once

// Shooting on the seed a = lim h(r)/r^2. Trajectories start from the Picard
// local solution at a small handoff radius and are continued by adaptive RK.
//
// Away from the origin the linearization about h_plus grows like
// exp(sqrt(g''(h_plus)) r), so for large droplets a single trajectory cannot
// resolve the endpoint condition in double precision. The root is therefore
// bracketed and bisected on the sign of h(R; a) - h_plus (blow-up counts as a
// sign), and then, if needed, polished by multiple shooting: the interval is
// cut into segments of length ~3/sqrt(g''(h_plus)) whose start states are
// Newton unknowns alongside a.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hedgehog/cauchy.hpp"
#include "hedgehog/grid.hpp"
#include "hedgehog/integrator.hpp"
#include "hedgehog/potential.hpp"
#include "hedgehog/profile.hpp"

namespace hedgehog {

class ShootingDivergence : public std::runtime_error {
 public:
  ShootingDivergence(double r, int direction)
      : std::runtime_error("shoot: trajectory diverged at r = " + std::to_string(r)),
        r_(r),
        direction_(direction) {}
  double r() const { return r_; }
  int direction() const { return direction_; }

 private:
  double r_;
  int direction_;
};

class NoBracketError : public std::runtime_error {
 public:
  NoBracketError(double a_lo, double a_hi)
      : std::runtime_error("find_shooting_param: no sign change of h(R;a) - h_plus for a in [" +
                           std::to_string(a_lo) + ", " + std::to_string(a_hi) + "]"),
        a_lo_(a_lo),
        a_hi_(a_hi) {}
  double a_lo() const { return a_lo_; }
  double a_hi() const { return a_hi_; }

 private:
  double a_lo_;
  double a_hi_;
};

class ShootingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ShootingOptions {
  double rk_tol = 1e-10;
  std::optional<double> handoff_r;  // defaults to min(eps, R/100, 1e-2)
  double kappa0 = 10.0;             // initial bracket [0, kappa0 * h_plus / R^2]
  double a_cap = 1e6;
  int max_bisections = 200;
  int max_newton = 60;
  double segment_growth = 3.0;      // e-folds of the unstable mode per segment
};

struct ShotResult {
  double h_R = 0.0;
  double h1_R = 0.0;
  RadialProfile profile;
};

struct ShootingResult {
  double a_star = 0.0;
  RadialProfile profile;
  double endpoint_miss = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  int segments = 1;
  int newton_iterations = 0;
  double continuity_defect = 0.0;
};

/// Classification of one trajectory at r = R.
struct ShotOutcome {
  bool diverged = false;
  double r_divergence = 0.0;
  int direction = 0;
  double h_R = 0.0;
  double h1_R = 0.0;

  /// h(R) - h_plus, with +-infinity for trajectories that blew up.
  double miss(double hp) const {
    if (diverged) return direction > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    return h_R - hp;
  }
};

inline double divergence_bound(double t) { return 10.0 * (1.0 + h_plus(t)); }

inline double default_handoff(double t, double R, double a) {
  return std::min({hedgehog_contraction_radius(t, a), R / 100.0, 1e-2});
}

namespace shooting_detail {

using State2 = std::array<double, 2>;
using State6 = std::array<double, 6>;

inline double picard_tol(double a) { return 1e-15 * (1.0 + std::abs(a)); }

inline LocalSolution local_solution(double t, double a, double r_h) {
  return picard_solve(hedgehog_problem(t, a), r_h, picard_tol(a), 200);
}

struct HedgehogSystem {
  double t;
  void operator()(double r, const State2& y, State2& dy) const {
    dy[0] = y[1];
    dy[1] = ode_rhs(r, y[0], y[1], t);
  }
};

// State augmented with the 2x2 sensitivity matrix (column-major in y[2..5]).
struct VariationalSystem {
  double t;
  void operator()(double r, const State6& y, State6& dy) const {
    dy[0] = y[1];
    dy[1] = ode_rhs(r, y[0], y[1], t);
    const double k = g_second(y[0], t) + 6.0 / (r * r);
    for (int c = 0; c < 2; ++c) {
      const double dh = y[2 + 2 * c], dh1 = y[3 + 2 * c];
      dy[2 + 2 * c] = dh1;
      dy[3 + 2 * c] = k * dh - 2.0 * dh1 / r;
    }
  }
};

inline double resolve_handoff(double t, double R, double a, const ShootingOptions& opt) {
  const double r_h = opt.handoff_r.value_or(default_handoff(t, R, a));
  if (!(r_h > 0.0) || !(r_h < R)) throw std::invalid_argument("shoot: handoff radius must lie in (0, R)");
  return r_h;
}

}  // namespace shooting_detail

namespace shooting_detail {

// Integrates through `outputs` (ascending, last = R), recording each state.
template <class Record>
ShotOutcome run_trajectory(double t, double a, double r_h, std::span<const double> outputs, double rk_tol,
                           Record&& record) {
  ShotOutcome out;
  const LocalState s = hedgehog_local(t, a, r_h, picard_tol(a));
  State2 y{s.h, s.h1};
  const auto status = integrate_through<2>(HedgehogSystem{t}, y, r_h, outputs, rk_tol, divergence_bound(t), record);
  if (status.diverged) {
    out.diverged = true;
    out.r_divergence = status.r_divergence;
    out.direction = status.direction;
    return out;
  }
  out.h_R = y[0];
  out.h1_R = y[1];
  return out;
}

inline std::vector<double> outputs_beyond(const RadialGrid& grid, double r_h) {
  std::vector<double> out;
  for (double r : grid.nodes()) {
    if (r > r_h) out.push_back(r);
  }
  return out;
}

}  // namespace shooting_detail

/// Single trajectory from the origin to R; outcome only. With a grid, the
/// integrator stops at every node, reproducing `shoot` bit for bit.
inline ShotOutcome shoot_outcome(double t, double R, double a, const ShootingOptions& opt = {}) {
  using namespace shooting_detail;
  if (a == 0.0) return {};  // h == 0 is an exact solution
  const double r_h = resolve_handoff(t, R, a, opt);
  const std::array<double, 1> outputs{R};
  return run_trajectory(t, a, r_h, std::span<const double>(outputs), opt.rk_tol, [](std::size_t, const State2&) {});
}

inline ShotOutcome shoot_outcome(double t, const RadialGrid& grid, double a, const ShootingOptions& opt = {}) {
  using namespace shooting_detail;
  if (a == 0.0) return {};
  const double r_h = resolve_handoff(t, grid.R(), a, opt);
  const auto outputs = outputs_beyond(grid, r_h);
  return run_trajectory(t, a, r_h, std::span<const double>(outputs), opt.rk_tol, [](std::size_t, const State2&) {});
}

/// Trajectory sampled on every grid node; throws ShootingDivergence on blow-up.
inline ShotResult shoot(double t, const RadialGrid& grid, double a, const ShootingOptions& opt = {}) {
  using namespace shooting_detail;
  if (!(t < 1.0)) throw std::domain_error("shoot: requires t < 1");
  const std::size_t n = grid.size();
  std::vector<double> h(n, 0.0), h1(n, 0.0);
  ProfileMeta meta{"shooting", a, 0, true};
  if (a == 0.0) return {0.0, 0.0, RadialProfile(grid, std::move(h), std::move(h1), meta)};

  const double R = grid.R();
  const double r_h = resolve_handoff(t, R, a, opt);
  const LocalSolution local = local_solution(t, a, r_h);
  std::size_t first = 1;
  for (; first < n && grid[first] <= r_h; ++first) {
    const LocalState s = local.eval(grid[first]);
    h[first] = s.h;
    h1[first] = s.h1;
  }
  const auto outputs = outputs_beyond(grid, r_h);
  const auto out = run_trajectory(t, a, r_h, std::span<const double>(outputs), opt.rk_tol,
                                  [&](std::size_t i, const State2& st) {
                                    h[first + i] = st[0];
                                    h1[first + i] = st[1];
                                  });
  if (out.diverged) throw ShootingDivergence(out.r_divergence, out.direction);
  const double hR = h.back(), h1R = h1.back();
  return {hR, h1R, RadialProfile(grid, std::move(h), std::move(h1), meta)};
}

namespace shooting_detail {

struct Segment {
  double start = 0.0;
  double end = 0.0;
  std::size_t end_node = 0;  // grid index of `end`
};

inline std::vector<Segment> make_segments(const RadialGrid& grid, double r_h, double length) {
  std::vector<Segment> segs;
  double start = r_h;
  const double R = grid.R();
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (grid[i] <= r_h) continue;
    if (grid[i] - start >= length && R - grid[i] >= 0.5 * length) {
      segs.push_back({start, grid[i], i});
      start = grid[i];
    }
  }
  segs.push_back({start, R, grid.size() - 1});
  return segs;
}

// End state and sensitivity of one segment. Returns false on divergence.
inline bool propagate(double t, const Segment& seg, const State2& y0, double tol, double bound, State2& y_end,
                      Eigen::Matrix2d& jac) {
  State6 y{y0[0], y0[1], 1.0, 0.0, 0.0, 1.0};
  const std::array<double, 1> outputs{seg.end};
  const auto status = integrate_through<6>(VariationalSystem{t}, y, seg.start, std::span<const double>(outputs), tol,
                                           bound, [](std::size_t, const State6&) {});
  if (status.diverged) return false;
  y_end = {y[0], y[1]};
  jac << y[2], y[4], y[3], y[5];
  return true;
}

// Boundary states of a trajectory; entries past a blow-up stay empty.
inline std::vector<std::optional<State2>> boundary_states(double t, double a, double r_h,
                                                          const std::vector<Segment>& segs, double tol) {
  std::vector<std::optional<State2>> out(segs.size());
  const LocalState s = hedgehog_local(t, a, r_h, picard_tol(a));
  State2 y{s.h, s.h1};
  std::vector<double> outputs;
  for (const auto& seg : segs) outputs.push_back(seg.end);
  integrate_through<2>(HedgehogSystem{t}, y, r_h, std::span<const double>(outputs), tol, divergence_bound(t),
                       [&](std::size_t i, const State2& st) { out[i] = st; });
  return out;
}

}  // namespace shooting_detail

/// Finds a* with |h(R; a*) - h_plus| <= tol and returns the converged profile
/// sampled on `grid`.
inline ShootingResult find_shooting_param(double t, const RadialGrid& grid, double tol, const ShootingOptions& opt = {}) {
  using namespace shooting_detail;
  if (!(t < 1.0)) throw std::domain_error("find_shooting_param: requires t < 1");
  if (!(tol > 0.0)) throw std::invalid_argument("find_shooting_param: tol must be positive");
  const double R = grid.R();
  const double hp = h_plus(t);

  // Bracket: h(R; 0) - h_plus = -h_plus < 0.
  double lo = 0.0;
  double hi = opt.kappa0 * hp / (R * R);
  ShotOutcome hi_out = shoot_outcome(t, grid, hi, opt);
  while (hi_out.miss(hp) < 0.0) {
    lo = hi;
    hi *= 10.0;
    if (hi > opt.a_cap) throw NoBracketError(0.0, opt.a_cap);
    hi_out = shoot_outcome(t, grid, hi, opt);
  }

  // Bisection on the sign.
  std::optional<double> converged;
  ShotOutcome best_out;
  for (int it = 0; it < opt.max_bisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const ShotOutcome out = shoot_outcome(t, grid, mid, opt);
    const double miss = out.miss(hp);
    if (!out.diverged && std::abs(miss) <= tol) {
      converged = mid;
      best_out = out;
      break;
    }
    (miss < 0.0 ? lo : hi) = mid;
  }

  if (converged) {
    ShotResult shot = shoot(t, grid, *converged, opt);
    ShootingResult res{*converged, std::move(shot.profile), std::abs(shot.h_R - hp), {lo, hi}, 1, 0, 0.0};
    return res;
  }

  // Multiple-shooting polish.
  const double kappa = std::sqrt(std::max({1.0, t, g_second(hp, t)}));
  const double a_guess = 0.5 * (lo + hi);
  const double r_h = opt.handoff_r.value_or(std::min({hedgehog_contraction_radius(t, 2.0 * hi), R / 100.0, 1e-2}));
  const auto segs = make_segments(grid, r_h, opt.segment_growth / kappa);
  const std::size_t M = segs.size();
  const std::size_t nx = 1 + 2 * (M - 1);
  const double bound = divergence_bound(t);

  Eigen::VectorXd x(nx);
  x[0] = a_guess;
  {
    const auto lo_states = boundary_states(t, lo, r_h, segs, opt.rk_tol);
    const auto hi_states = boundary_states(t, hi, r_h, segs, opt.rk_tol);
    // Follow the bracketing trajectories while they agree and stay in [0, h_plus];
    // past that point use the far-field balance g''(h_plus)(h - h_plus) = -6 h_plus / r^2.
    const double curvature = g_second(hp, t);
    bool trusted = true;
    for (std::size_t k = 1; k < M; ++k) {
      const auto& a_state = lo_states[k - 1];
      const auto& b_state = hi_states[k - 1];
      const double r = segs[k].start;
      State2 guess{std::max(0.0, hp - 6.0 * hp / (curvature * r * r)), 12.0 * hp / (curvature * r * r * r)};
      if (trusted && a_state && b_state) {
        const State2 avg{0.5 * ((*a_state)[0] + (*b_state)[0]), 0.5 * ((*a_state)[1] + (*b_state)[1])};
        trusted = std::abs((*a_state)[0] - (*b_state)[0]) <= 1e-3 * hp && avg[0] >= 0.0 && avg[0] <= hp && avg[1] >= 0.0;
        if (trusted) guess = avg;
      } else {
        trusted = false;
      }
      x[static_cast<Eigen::Index>(1 + 2 * (k - 1))] = guess[0];
      x[static_cast<Eigen::Index>(2 + 2 * (k - 1))] = guess[1];
    }
  }

  // Residual and Jacobian of the matching conditions; false if any segment blows up.
  auto evaluate = [&](const Eigen::VectorXd& xv, Eigen::VectorXd& F, Eigen::MatrixXd* J) {
    const double a = xv[0];
    if (!(a > 0.0) || a > 2.0 * hi) return false;
    const LocalState s0 = hedgehog_local(t, a, r_h, picard_tol(a));
    Eigen::Vector2d dy0_da;
    if (J) {
      const double da = 1e-6 * (1.0 + std::abs(a));
      const LocalState sp = hedgehog_local(t, a + da, r_h, picard_tol(a + da));
      const LocalState sm = hedgehog_local(t, a - da, r_h, picard_tol(a - da));
      dy0_da << (sp.h - sm.h) / (2.0 * da), (sp.h1 - sm.h1) / (2.0 * da);
      J->setZero(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(nx));
    }
    F.resize(static_cast<Eigen::Index>(nx));
    for (std::size_t k = 0; k < M; ++k) {
      const State2 y0 = k == 0 ? State2{s0.h, s0.h1} : State2{xv[1 + 2 * (k - 1)], xv[2 + 2 * (k - 1)]};
      State2 y_end;
      Eigen::Matrix2d phi;
      if (!propagate(t, segs[k], y0, opt.rk_tol, bound, y_end, phi)) return false;
      const Eigen::Index row = static_cast<Eigen::Index>(2 * k);
      if (k + 1 < M) {
        F[row] = y_end[0] - xv[1 + 2 * k];
        F[row + 1] = y_end[1] - xv[2 + 2 * k];
        if (J) {
          if (k == 0) {
            J->block(row, 0, 2, 1) = phi * dy0_da;
          } else {
            J->block(row, static_cast<Eigen::Index>(1 + 2 * (k - 1)), 2, 2) = phi;
          }
          (*J)(row, static_cast<Eigen::Index>(1 + 2 * k)) = -1.0;
          (*J)(row + 1, static_cast<Eigen::Index>(2 + 2 * k)) = -1.0;
        }
      } else {
        F[row] = y_end[0] - hp;
        if (J) {
          if (k == 0) {
            (*J)(row, 0) = phi.row(0) * dy0_da;
          } else {
            J->block(row, static_cast<Eigen::Index>(1 + 2 * (k - 1)), 1, 2) = phi.row(0);
          }
        }
      }
    }
    return true;
  };

  Eigen::VectorXd F;
  Eigen::MatrixXd J;
  if (!evaluate(x, F, &J)) throw ShootingError("find_shooting_param: multiple-shooting initial guess diverged");
  int iter = 0;
  for (; iter < opt.max_newton; ++iter) {
    const double fnorm = F.lpNorm<Eigen::Infinity>();
    if (fnorm <= 0.1 * tol) break;
    const Eigen::VectorXd dx = J.partialPivLu().solve(-F);
    double lambda = 1.0;
    bool accepted = false;
    Eigen::VectorXd F_trial;
    for (int damp = 0; damp < 30; ++damp) {
      const Eigen::VectorXd x_trial = x + lambda * dx;
      if (evaluate(x_trial, F_trial, nullptr) && F_trial.lpNorm<Eigen::Infinity>() < std::max(fnorm, 10.0 * tol)) {
        x = x_trial;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
    evaluate(x, F, &J);
  }
  const double fnorm = F.lpNorm<Eigen::Infinity>();
  if (!(fnorm <= tol)) {
    throw ShootingError("find_shooting_param: multiple shooting did not converge (residual " + std::to_string(fnorm) +
                        ")");
  }

  // Sample the converged trajectory segment by segment.
  const double a_star = x[0];
  const std::size_t n = grid.size();
  std::vector<double> h(n, 0.0), h1(n, 0.0);
  const LocalSolution local = local_solution(t, a_star, r_h);
  for (std::size_t i = 1; i < n && grid[i] <= r_h; ++i) {
    const LocalState s = local.eval(grid[i]);
    h[i] = s.h;
    h1[i] = s.h1;
  }
  double defect = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    State2 y;
    if (k == 0) {
      const LocalState s = local.eval(r_h);
      y = {s.h, s.h1};
    } else {
      y = {x[static_cast<Eigen::Index>(1 + 2 * (k - 1))], x[static_cast<Eigen::Index>(2 + 2 * (k - 1))]};
    }
    std::vector<double> outputs;
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i < n; ++i) {
      if (grid[i] > segs[k].start && grid[i] <= segs[k].end) {
        outputs.push_back(grid[i]);
        idx.push_back(i);
      }
    }
    State2 y_end = y;
    const auto status = integrate_through<2>(HedgehogSystem{t}, y, segs[k].start, std::span<const double>(outputs),
                                             opt.rk_tol, bound, [&](std::size_t j, const State2& st) {
                                               h[idx[j]] = st[0];
                                               h1[idx[j]] = st[1];
                                               y_end = st;
                                             });
    if (status.diverged) throw ShootingError("find_shooting_param: converged trajectory diverged on resampling");
    if (k + 1 < M) {
      const double nh = x[static_cast<Eigen::Index>(1 + 2 * k)], nh1 = x[static_cast<Eigen::Index>(2 + 2 * k)];
      defect = std::max({defect, std::abs(y_end[0] - nh), std::abs(y_end[1] - nh1)});
    }
  }
  ProfileMeta meta{"shooting", a_star, iter, true};
  const double miss = std::abs(h.back() - hp);
  return ShootingResult{a_star, RadialProfile(grid, std::move(h), std::move(h1), meta), miss, {lo, hi},
                        static_cast<int>(M), iter, defect};
}

/// Sign changes of h(R; a) - h_plus over a logarithmic scan of a.
inline int count_shooting_roots(double t, double R, double a_min, double a_max, std::size_t n_points,
                                const ShootingOptions& opt = {}) {
  if (!(a_min > 0.0) || !(a_max > a_min) || n_points < 2) {
    throw std::invalid_argument("count_shooting_roots: need 0 < a_min < a_max and at least 2 points");
  }
  const double hp = h_plus(t);
  int changes = 0;
  int prev = 0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double a = a_min * std::pow(a_max / a_min, static_cast<double>(i) / static_cast<double>(n_points - 1));
    const double miss = shoot_outcome(t, R, a, opt).miss(hp);
    const int sign = miss > 0.0 ? 1 : (miss < 0.0 ? -1 : 0);
    if (sign != 0 && prev != 0 && sign != prev) ++changes;
    if (sign != 0) prev = sign;
  }
  return changes;
}

}  // namespace hedgehog
