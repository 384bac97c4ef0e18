#pragma once

// Slow, obviously-correct serial implementations used as oracles by the tests
// and as the baseline in the benchmarks. Everything here works on dense W.

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wlt::ref {

double dense_bilinear(const Eigen::MatrixXd& w, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// The defining double sum over all index pairs, with no algebraic shortcuts.
double naive_tn(const std::vector<Eigen::MatrixXd>& groups, const std::vector<double>& betas,
                const Eigen::MatrixXd& w);

/// Sample covariance with divisor n - 1.
Eigen::MatrixXd sample_cov(const Eigen::MatrixXd& x);

/// Three-term estimator written with dense S and dense W.
double dense_tr_wsigma_sq(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w);

/// tr(W S_1 W S_2) with dense matrices.
double dense_tr_cross(const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2, const Eigen::MatrixXd& w);

double dense_sigma_hat_sq(const std::vector<Eigen::MatrixXd>& groups,
                          const std::vector<double>& betas, const Eigen::MatrixXd& w);

/// Population variance parts with dense W.
struct DenseVariance {
  double q1 = 0.0;
  double q2 = 0.0;
};
DenseVariance dense_theoretical_variance(const std::vector<Eigen::VectorXd>& mus,
                                         const std::vector<Eigen::MatrixXd>& sigmas,
                                         const std::vector<double>& betas,
                                         const std::vector<Eigen::Index>& ns,
                                         const Eigen::MatrixXd& w);

/// Same outputs as weighted_gram_moments, by explicit loops over every (j, k).
struct NaiveGram {
  Eigen::MatrixXd block_sq;
  Eigen::VectorXd diag;
};
NaiveGram naive_gram_moments(const Eigen::MatrixXd& stacked, std::span<const Eigen::Index> offsets);

} // namespace wlt::ref
