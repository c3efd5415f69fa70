#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "hedgehog/qtensor.hpp"

using namespace hedgehog;

namespace {

UnitVector random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  return UnitVector::normalized(Eigen::Vector3d(normal(rng), normal(rng), normal(rng)));
}

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::Matrix3d A;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(A);
  Eigen::Matrix3d U = qr.householderQ();
  if (U.determinant() < 0) U.col(0) *= -1.0;
  return U;
}

// Smooth test amplitude and its derivatives.
double amp(double r) { return r * r * std::exp(-r); }
double amp1(double r) { return (2 * r - r * r) * std::exp(-r); }
double amp2(double r) { return (2 - 4 * r + r * r) * std::exp(-r); }

Eigen::Matrix3d hedgehog_field(const Eigen::Vector3d& x) {
  const double r = x.norm();
  return uniaxial(amp(r), UnitVector::normalized(x)).matrix();
}

}  // namespace

TEST(UnitVector, RejectsNonUnit) {
  EXPECT_THROW(UnitVector(1.0, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(UnitVector::normalized(Eigen::Vector3d::Zero()), std::invalid_argument);
  EXPECT_NO_THROW(UnitVector(0.0, 0.0, 1.0));
}

TEST(QTensor, RejectsTrace) {
  EXPECT_THROW(QTensor(Eigen::Matrix3d::Identity()), std::invalid_argument);
}

TEST(Uniaxial, NormAndEigenvalues) {
  const UnitVector ez(0, 0, 1);
  const QTensor Q = uniaxial(1.0, ez);
  EXPECT_NEAR(Q.frobenius_norm(), 1.0, 1e-15);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(Q.matrix());
  const double s = std::sqrt(1.5);
  EXPECT_NEAR(es.eigenvalues()(0), -s / 3.0, 1e-15);
  EXPECT_NEAR(es.eigenvalues()(1), -s / 3.0, 1e-15);
  EXPECT_NEAR(es.eigenvalues()(2), 2.0 * s / 3.0, 1e-15);
  EXPECT_NEAR(Q.trace(), 0.0, 1e-15);
}

TEST(Uniaxial, NormEqualsAbsoluteAmplitude) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> hd(-3.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const double h = hd(rng);
    EXPECT_NEAR(uniaxial(h, random_direction(rng)).frobenius_norm(), std::abs(h), 1e-13);
  }
}

TEST(BulkEnergy, HalfAmplitudeExample) {
  const QTensor Q = uniaxial(0.5, UnitVector(0, 0, 1));
  EXPECT_NEAR(bulk_energy(Q, -1.0), bulk_offset(-1.0) - 0.21875, 1e-14);
}

TEST(BulkEnergy, EqualsScalarPotentialOnUniaxialStates) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> hd(-2.0, 3.0), td(-10.0, 1.1);
  for (int k = 0; k < 100; ++k) {
    const double h = hd(rng), t = td(rng);
    EXPECT_NEAR(bulk_energy(uniaxial(h, random_direction(rng)), t), g(h, t), 1e-12 * (1.0 + std::abs(g(h, t))));
  }
}

TEST(ElRhs, ReducesToScalarSlopeOnUniaxialStates) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> hd(-2.0, 3.0), td(-10.0, 1.1);
  for (int k = 0; k < 100; ++k) {
    const double h = hd(rng), t = td(rng);
    const UnitVector n = random_direction(rng);
    const Eigen::Matrix3d expected = std::sqrt(1.5) * g_prime(h, t) * director_projector(n);
    const Eigen::Matrix3d got = el_rhs(uniaxial(h, n), t).matrix();
    EXPECT_LE((got - expected).cwiseAbs().maxCoeff(), 1e-12) << "h = " << h << " t = " << t;
    EXPECT_NEAR(got.trace(), 0.0, 1e-12);
  }
}

TEST(ElRhs, MatchesTensorGradientOfBulkEnergy) {
  // Projected gradient of the bulk energy on traceless symmetric matrices, by finite differences.
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal;
  Eigen::Matrix3d A;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) A(i, j) = normal(rng);
  A = 0.5 * (A + A.transpose());
  A -= A.trace() / 3.0 * Eigen::Matrix3d::Identity();
  const QTensor Q(A);
  const double t = -0.7, step = 1e-6;
  const Eigen::Matrix3d rhs = el_rhs(Q, t).matrix();
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      Eigen::Matrix3d E = Eigen::Matrix3d::Zero();
      E(i, j) += 0.5;
      E(j, i) += 0.5;
      E -= E.trace() / 3.0 * Eigen::Matrix3d::Identity();
      const double fd = (bulk_energy(QTensor(A + step * E), t) - bulk_energy(QTensor(A - step * E), t)) / (2 * step);
      EXPECT_NEAR(fd, (rhs.array() * E.array()).sum(), 1e-7);
    }
  }
}

TEST(QTensor, FrameInvariance) {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Matrix3d U = random_rotation(rng);
    const QTensor Q = uniaxial(0.8, random_direction(rng));
    const QTensor QR = Q.rotated(U);
    EXPECT_NEAR(QR.tr2(), Q.tr2(), 1e-13);
    EXPECT_NEAR(QR.tr3(), Q.tr3(), 1e-13);
    EXPECT_NEAR(bulk_energy(QR, -2.0), bulk_energy(Q, -2.0), 1e-12);
    const Eigen::Matrix3d lhs = el_rhs(QR, -2.0).matrix();
    const Eigen::Matrix3d rhs = U * el_rhs(Q, -2.0).matrix() * U.transpose();
    EXPECT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(QTensor, DirectorSignSymmetry) {
  const UnitVector n = UnitVector::normalized(Eigen::Vector3d(1, 2, 3));
  EXPECT_LE((uniaxial(1.3, n).matrix() - uniaxial(1.3, -n).matrix()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(RadialReduction, Examples) {
  EXPECT_DOUBLE_EQ(radial_laplacian_coefficient(1.0, 0.0, 0.0, 1.0), -6.0);
  EXPECT_DOUBLE_EQ(radial_laplacian_coefficient(1.0, 2.0, 3.0, 2.0), 3.0 + 2.0 - 1.5);
  EXPECT_DOUBLE_EQ(gradient_density(1.0, 2.0, 1.0), 10.0);
  EXPECT_THROW(radial_laplacian_coefficient(1.0, 0.0, 0.0, 0.0), std::domain_error);
  EXPECT_THROW(gradient_density(1.0, 0.0, -1.0), std::domain_error);
}

TEST(RadialReduction, LaplacianOfHedgehogFieldMatchesFiniteDifferences) {
  const double step = 1e-3;
  for (const Eigen::Vector3d& x : {Eigen::Vector3d(0.7, -0.4, 1.1), Eigen::Vector3d(2.0, 0.5, 0.3)}) {
    Eigen::Matrix3d lap = -6.0 * hedgehog_field(x);
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e(k) = step;
      lap += hedgehog_field(x + e) + hedgehog_field(x - e);
    }
    lap /= step * step;
    const double r = x.norm();
    const Eigen::Matrix3d expected = std::sqrt(1.5) *
                                     radial_laplacian_coefficient(amp(r), amp1(r), amp2(r), r) *
                                     director_projector(UnitVector::normalized(x));
    EXPECT_LE((lap - expected).cwiseAbs().maxCoeff(), 1e-5);
  }
}

TEST(RadialReduction, GradientDensityMatchesFiniteDifferences) {
  const double step = 1e-5;
  const Eigen::Vector3d x(0.9, 1.2, -0.6);
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e(k) = step;
    sum += ((hedgehog_field(x + e) - hedgehog_field(x - e)) / (2 * step)).squaredNorm();
  }
  const double r = x.norm();
  EXPECT_NEAR(sum, gradient_density(amp(r), amp1(r), r), 1e-8);
}
