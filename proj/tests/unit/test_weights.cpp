#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "reference.hpp"
#include "wlt/errors.hpp"
#include "wlt/weights.hpp"

namespace {

using wlt::WeightMatrix;
using wlt::WeightSpec;

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index p) {
  std::normal_distribution<double> n01;
  Eigen::VectorXd v(p);
  for (Eigen::Index i = 0; i < p; ++i) v(i) = n01(rng);
  return v;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TEST(DefaultWeights, SingleDimension) {
  const auto s = wlt::default_weight_spec(1);
  ASSERT_EQ(s.dim(), 1u);
  EXPECT_NEAR(s.alpha[0], std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(s.omega_sq[0], 50.0 / 9.0, 1e-14);
}

TEST(DefaultWeights, AlphaAtP200MatchesHighPrecisionValue) {
  const auto s = wlt::default_weight_spec(200);
  for (double a : s.alpha) EXPECT_NEAR(a, 0.30661878175865195881, 1e-15);
  EXPECT_NEAR(s.omega_sq[199], 50.0 / 9.0, 1e-13);
  const double w1 = std::sqrt(2.0) * (1.0 + 2.0 / 600.0);
  EXPECT_NEAR(s.omega_sq[0], w1 * w1, 1e-14);
}

TEST(DefaultWeights, ZeroDimensionThrows) {
  EXPECT_THROW(wlt::default_weight_spec(0), wlt::InvalidDimension);
  EXPECT_THROW(wlt::identity_weight_spec(0), wlt::InvalidDimension);
}

TEST(IdentityWeights, Definition) {
  const auto s = wlt::identity_weight_spec(3);
  EXPECT_EQ(s.alpha, std::vector<double>(3, 0.0));
  EXPECT_EQ(s.omega_sq, std::vector<double>(3, 1.0));
  WeightMatrix w(s);
  EXPECT_TRUE(w.is_identity());
  EXPECT_TRUE(wlt::dense_weight(w).isApprox(Eigen::MatrixXd::Identity(3, 3)));
}

TEST(IdentityWeights, BilinearIsDotProduct) {
  WeightMatrix w(wlt::identity_weight_spec(2));
  const std::vector<double> x{1.0, 2.0}, y{3.0, -1.0};
  EXPECT_EQ(w.bilinear(x, y), 1.0);
  std::mt19937_64 rng(1);
  WeightMatrix w7(wlt::identity_weight_spec(7));
  const auto a = random_vector(rng, 7), b = random_vector(rng, 7);
  EXPECT_NEAR(w7.bilinear(a, b), a.dot(b), 1e-14);
}

TEST(WeightSpecValidation, RejectsBadEntries) {
  EXPECT_THROW(WeightMatrix(WeightSpec{{1.0}, {1.0, 2.0}}), wlt::InvalidDimension);
  EXPECT_THROW(WeightMatrix(WeightSpec{{}, {}}), wlt::InvalidDimension);
  EXPECT_THROW(WeightMatrix(WeightSpec{{0.0, 0.0}, {1.0, 0.0}}), wlt::InvalidArgument);
  EXPECT_THROW(WeightMatrix(WeightSpec{{0.0}, {-1.0}}), wlt::InvalidArgument);
  EXPECT_THROW(WeightMatrix(WeightSpec{{NAN}, {1.0}}), wlt::InvalidArgument);
}

TEST(Bilinear, HandExample) {
  WeightMatrix w(WeightSpec{{1.0, 1.0}, {1.0, 1.0}});
  const std::vector<double> x{1.0, 0.0}, y{0.0, 1.0};
  EXPECT_EQ(w.bilinear(x, y), 1.0);
}

TEST(Bilinear, ZeroVector) {
  WeightMatrix w(wlt::default_weight_spec(6));
  std::mt19937_64 rng(2);
  EXPECT_EQ(w.bilinear(Eigen::VectorXd::Zero(6), random_vector(rng, 6)), 0.0);
}

TEST(Bilinear, DimensionMismatchThrows) {
  WeightMatrix w(wlt::default_weight_spec(3));
  EXPECT_THROW(w.bilinear(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(4)),
               wlt::DimensionMismatch);
}

TEST(Bilinear, MatchesDenseOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0), pos(0.1, 3.0);
  for (Eigen::Index p : {1, 2, 10, 33, 64}) {
    for (int rep = 0; rep < 20; ++rep) {
      WeightSpec spec;
      for (Eigen::Index k = 0; k < p; ++k) {
        spec.alpha.push_back(u(rng));
        spec.omega_sq.push_back(pos(rng));
      }
      WeightMatrix w(spec);
      const Eigen::MatrixXd dense = wlt::dense_weight(w);
      const auto x = random_vector(rng, p), y = random_vector(rng, p);
      const double fast = w.bilinear(x, y);
      const double slow = wlt::ref::dense_bilinear(dense, x, y);
      EXPECT_LE(std::abs(fast - slow), 1e-12 * (std::abs(slow) + (x.norm() * y.norm())));
      EXPECT_EQ(fast, w.bilinear(y, x)) << "symmetry";
      EXPECT_GT(w.bilinear(x, x), 0.0) << "positive definite";
    }
  }
}

TEST(Bilinear, DefaultSpecMatchesDenseToRelative1e12) {
  std::mt19937_64 rng(4);
  WeightMatrix w(wlt::default_weight_spec(10));
  const Eigen::MatrixXd dense = wlt::dense_weight(w);
  for (int rep = 0; rep < 50; ++rep) {
    const auto x = random_vector(rng, 10), y = random_vector(rng, 10);
    EXPECT_LE(rel_err(w.bilinear(x, y), wlt::ref::dense_bilinear(dense, x, y)), 1e-12);
  }
}

TEST(DenseWeight, HandExample) {
  WeightMatrix w(WeightSpec{{1.0, 2.0}, {3.0, 4.0}});
  Eigen::Matrix2d expect;
  expect << 4.0, 2.0, 2.0, 8.0;
  EXPECT_EQ(wlt::dense_weight(w), Eigen::MatrixXd(expect));
}

TEST(DenseWeight, DefaultIsSymmetricPositiveDefinite) {
  WeightMatrix w(wlt::default_weight_spec(5));
  const Eigen::MatrixXd d = wlt::dense_weight(w);
  EXPECT_EQ(d, d.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
  const double min_omega = *std::min_element(w.spec().omega_sq.begin(), w.spec().omega_sq.end());
  EXPECT_GE(es.eigenvalues().minCoeff(), min_omega - 1e-12);
}

TEST(DenseWeight, EigenvaluesInterlaceForEqualAlpha) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (std::size_t p = 2; p <= 32; ++p) {
    WeightSpec spec;
    const double a = u(rng) - 1.0;
    for (std::size_t k = 0; k < p; ++k) {
      spec.alpha.push_back(a);
      spec.omega_sq.push_back(u(rng));
    }
    std::sort(spec.omega_sq.begin(), spec.omega_sq.end());
    WeightMatrix w(spec);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(wlt::dense_weight(w));
    const auto& lam = es.eigenvalues();
    const double tol = 1e-10 * (1.0 + spec.omega_sq.back() + p * a * a);
    for (std::size_t k = 0; k + 1 < p; ++k) {
      EXPECT_GE(lam(k), spec.omega_sq[k] - tol);
      EXPECT_LE(lam(k), spec.omega_sq[k + 1] + tol);
    }
    EXPECT_LE(std::abs(lam(p - 1) - spec.omega_sq[p - 1]), p * a * a + tol);
  }
  WeightMatrix d(wlt::default_weight_spec(20));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(wlt::dense_weight(d));
  EXPECT_LE(std::abs(es.eigenvalues()(19) - d.spec().omega_sq[19]), 20 * d.spec().alpha[0] * d.spec().alpha[0]);
}

TEST(FactorRows, ReproducesWeightedGram) {
  std::mt19937_64 rng(6);
  WeightMatrix w(wlt::default_weight_spec(9));
  Eigen::MatrixXd x(5, 9), y(4, 9);
  for (Eigen::Index i = 0; i < 5; ++i) x.row(i) = random_vector(rng, 9).transpose();
  for (Eigen::Index i = 0; i < 4; ++i) y.row(i) = random_vector(rng, 9).transpose();
  const Eigen::MatrixXd fx = w.factor_rows(x), fy = w.factor_rows(y);
  EXPECT_EQ(fx.cols(), 10);
  const Eigen::MatrixXd dense = wlt::dense_weight(w);
  EXPECT_TRUE((fx * fy.transpose()).isApprox(x * dense * y.transpose(), 1e-12));
}

TEST(ApplyAndLeftMultiply, MatchDense) {
  std::mt19937_64 rng(7);
  WeightMatrix w(wlt::default_weight_spec(12));
  const Eigen::MatrixXd dense = wlt::dense_weight(w);
  const auto x = random_vector(rng, 12);
  EXPECT_TRUE(w.apply(x).isApprox(dense * x, 1e-13));
  Eigen::MatrixXd a(12, 3);
  for (Eigen::Index c = 0; c < 3; ++c) a.col(c) = random_vector(rng, 12);
  EXPECT_TRUE(w.left_multiply(a).isApprox(dense * a, 1e-13));
}

} // namespace
