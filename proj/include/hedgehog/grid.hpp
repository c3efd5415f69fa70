#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hedgehog {

/// Nodes 0 = r_0 < r_1 < ... < r_N = R with N >= 16.
class RadialGrid {
 public:
  static constexpr std::size_t kMinIntervals = 16;

  explicit RadialGrid(std::vector<double> nodes) : r_(std::move(nodes)) {
    if (r_.size() < kMinIntervals + 1) {
      throw std::invalid_argument("RadialGrid: need at least " + std::to_string(kMinIntervals + 1) + " nodes");
    }
    if (r_.front() != 0.0) throw std::invalid_argument("RadialGrid: first node must be exactly 0");
    for (std::size_t i = 1; i < r_.size(); ++i) {
      if (!(r_[i] > r_[i - 1])) {
        throw std::invalid_argument("RadialGrid: nodes must be strictly increasing (index " + std::to_string(i) + ")");
      }
    }
  }

  static RadialGrid uniform(double R, std::size_t n_nodes) {
    if (!(R > 0.0)) throw std::invalid_argument("RadialGrid: R must be positive");
    if (n_nodes < 2) throw std::invalid_argument("RadialGrid: need at least 2 nodes");
    std::vector<double> r(n_nodes);
    const double n = static_cast<double>(n_nodes - 1);
    for (std::size_t i = 0; i < n_nodes; ++i) r[i] = R * static_cast<double>(i) / n;
    r.back() = R;
    return RadialGrid(std::move(r));
  }

  /// Spacing grows geometrically by `ratio` per interval, clustering nodes near r = 0.
  static RadialGrid geometric(double R, std::size_t n_nodes, double ratio) {
    if (!(R > 0.0)) throw std::invalid_argument("RadialGrid: R must be positive");
    if (!(ratio > 0.0)) throw std::invalid_argument("RadialGrid: ratio must be positive");
    if (n_nodes < 2) throw std::invalid_argument("RadialGrid: need at least 2 nodes");
    const std::size_t N = n_nodes - 1;
    std::vector<double> r(n_nodes, 0.0);
    double step = 1.0, total = 0.0;
    for (std::size_t i = 1; i <= N; ++i) {
      total += step;
      r[i] = total;
      step *= ratio;
    }
    for (auto& x : r) x *= R / total;
    r.back() = R;
    return RadialGrid(std::move(r));
  }

  std::size_t size() const { return r_.size(); }
  std::size_t intervals() const { return r_.size() - 1; }
  double operator[](std::size_t i) const { return r_[i]; }
  double R() const { return r_.back(); }
  double spacing(std::size_t i) const { return r_[i + 1] - r_[i]; }
  double max_spacing() const {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < r_.size(); ++i) m = std::max(m, spacing(i));
    return m;
  }
  const std::vector<double>& nodes() const { return r_; }

  bool operator==(const RadialGrid& other) const { return r_ == other.r_; }

 private:
  std::vector<double> r_;
};

struct ProfileMeta {
  std::string solver;      // "shooting", "minimization", "file", ...
  double seed_a = 0.0;     // shooting seed (limit of h / r^2)
  int iterations = 0;      // minimizer iterations or multiple-shooting Newton steps
  bool dense_derivative = false;  // h1 comes from the integrator rather than finite differences
};

/// Order parameter h sampled on a radial grid together with derivative data.
class RadialProfile {
 public:
  RadialProfile(RadialGrid grid, std::vector<double> h, std::vector<double> h1, ProfileMeta meta = {})
      : grid_(std::move(grid)), h_(std::move(h)), h1_(std::move(h1)), meta_(std::move(meta)) {
    if (h_.size() != grid_.size() || h1_.size() != grid_.size()) {
      throw std::invalid_argument("RadialProfile: value arrays must match the grid size");
    }
  }

  /// Builds h1 from second-order finite differences.
  RadialProfile(RadialGrid grid, std::vector<double> h, ProfileMeta meta = {})
      : RadialProfile(grid, h, finite_difference_derivative(grid, h), std::move(meta)) {}

  const RadialGrid& grid() const { return grid_; }
  const std::vector<double>& h() const { return h_; }
  const std::vector<double>& h1() const { return h1_; }
  const ProfileMeta& meta() const { return meta_; }
  std::size_t size() const { return h_.size(); }
  double R() const { return grid_.R(); }
  double r(std::size_t i) const { return grid_[i]; }

  double boundary_slope() const { return h1_.back(); }

  /// Three-point nonuniform differences; one-sided at both ends.
  static std::vector<double> finite_difference_derivative(const RadialGrid& grid, const std::vector<double>& h) {
    const std::size_t n = grid.size();
    if (h.size() != n) throw std::invalid_argument("finite_difference_derivative: size mismatch");
    std::vector<double> d(n, 0.0);
    auto three_point = [&](std::size_t i0, std::size_t i1, std::size_t i2, double x) {
      // Derivative at x of the quadratic through (r_i0, r_i1, r_i2).
      const double x0 = grid[i0], x1 = grid[i1], x2 = grid[i2];
      const double l0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
      const double l1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
      const double l2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
      return l0 * h[i0] + l1 * h[i1] + l2 * h[i2];
    };
    d[0] = three_point(0, 1, 2, grid[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = three_point(i - 1, i, i + 1, grid[i]);
    d[n - 1] = three_point(n - 3, n - 2, n - 1, grid[n - 1]);
    return d;
  }

 private:
  RadialGrid grid_;
  std::vector<double> h_;
  std::vector<double> h1_;
  ProfileMeta meta_;
};

}  // namespace hedgehog
