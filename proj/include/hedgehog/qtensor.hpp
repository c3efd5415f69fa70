#pragma once

// Symmetric traceless 3x3 order-parameter tensors and the algebra linking
// the tensor Euler-Lagrange equation to the radial hedgehog ODE.

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "hedgehog/potential.hpp"

namespace hedgehog {

class UnitVector {
 public:
  static constexpr double kTolerance = 1e-12;

  explicit UnitVector(const Eigen::Vector3d& n) : n_(n) {
    if (std::abs(n.norm() - 1.0) > kTolerance) {
      throw std::invalid_argument("UnitVector: |n| differs from 1 by more than 1e-12");
    }
  }
  UnitVector(double x, double y, double z) : UnitVector(Eigen::Vector3d(x, y, z)) {}

  /// Normalizes an arbitrary nonzero vector.
  static UnitVector normalized(const Eigen::Vector3d& v) {
    const double norm = v.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("UnitVector: cannot normalize a zero vector");
    return UnitVector(Eigen::Vector3d(v / norm));
  }

  const Eigen::Vector3d& vec() const { return n_; }
  UnitVector operator-() const { return UnitVector(Eigen::Vector3d(-n_)); }

 private:
  Eigen::Vector3d n_;
};

class QTensor {
 public:
  static constexpr double kTraceTolerance = 1e-12;

  QTensor() : m_(Eigen::Matrix3d::Zero()) {}

  /// The input is symmetrized; a trace above tolerance is a contract violation.
  explicit QTensor(const Eigen::Matrix3d& m) : m_(0.5 * (m + m.transpose())) {
    if (std::abs(m_.trace()) > kTraceTolerance * (1.0 + m_.norm())) {
      throw std::invalid_argument("QTensor: matrix is not traceless");
    }
  }

  const Eigen::Matrix3d& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.norm(); }
  double tr2() const { return (m_ * m_).trace(); }
  double tr3() const { return (m_ * m_ * m_).trace(); }

  /// U Q U^T for an orthogonal U.
  QTensor rotated(const Eigen::Matrix3d& U) const { return QTensor(U * m_ * U.transpose()); }

 private:
  Eigen::Matrix3d m_;
};

inline Eigen::Matrix3d director_projector(const UnitVector& n) {
  return n.vec() * n.vec().transpose() - Eigen::Matrix3d::Identity() / 3.0;
}

/// sqrt(3/2) h (n n^T - I/3); its Frobenius norm equals |h|.
inline QTensor uniaxial(double h, const UnitVector& n) {
  return QTensor(std::sqrt(1.5) * h * director_projector(n));
}

inline double bulk_energy(const QTensor& Q, double t) {
  const double tr2 = Q.tr2();
  return 0.5 * t * tr2 - std::sqrt(6.0) * Q.tr3() + 0.5 * tr2 * tr2 + bulk_offset(t);
}

/// Right-hand side of the tensor Euler-Lagrange equation Delta Q = el_rhs(Q, t).
inline QTensor el_rhs(const QTensor& Q, double t) {
  const Eigen::Matrix3d& m = Q.matrix();
  const double tr2 = Q.tr2();
  const Eigen::Matrix3d sq_dev = m * m - (tr2 / 3.0) * Eigen::Matrix3d::Identity();
  return QTensor(t * m - 3.0 * std::sqrt(6.0) * sq_dev + 2.0 * tr2 * m);
}

/// Scalar multiplying sqrt(3/2)(n n^T - I/3) in Delta Q_h: h'' + 2h'/r - 6h/r^2.
inline double radial_laplacian_coefficient(double h, double h1, double h2, double r) {
  if (!(r > 0.0)) throw std::domain_error("radial_laplacian_coefficient: r must be positive");
  return h2 + 2.0 * h1 / r - 6.0 * h / (r * r);
}

/// |grad Q_h|^2 = h'^2 + 6 h^2 / r^2.
inline double gradient_density(double h, double h1, double r) {
  if (!(r > 0.0)) throw std::domain_error("gradient_density: r must be positive");
  return h1 * h1 + 6.0 * h * h / (r * r);
}

}  // namespace hedgehog
