#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "wlt/weights.hpp"

namespace wlt {

/// q groups of p-dimensional observations (one row per observation) and the
/// linear coefficients beta of the hypothesis sum_i beta_i mu_i = 0.
///
/// Rows inside each group are stored in a canonical (lexicographic) order, so
/// two sample sets that differ only by a within-group row permutation are
/// identical and every statistic computed from them agrees bit for bit.
class SampleSet {
public:
  /// Throws InvalidArgument (q < 2, betas all zero or non-finite, count
  /// mismatch), DimensionMismatch (groups disagree on p) or InsufficientSamples
  /// (a group with fewer than 2 rows).
  SampleSet(std::vector<Eigen::MatrixXd> groups, std::vector<double> betas);

  std::size_t num_groups() const noexcept { return groups_.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(groups_.front().cols()); }
  Eigen::Index size(std::size_t i) const { return groups_[i].rows(); }
  Eigen::Index total_size() const noexcept;

  const Eigen::MatrixXd& group(std::size_t i) const { return groups_[i]; }
  const std::vector<Eigen::MatrixXd>& groups() const noexcept { return groups_; }
  const std::vector<double>& betas() const noexcept { return betas_; }
  std::vector<Eigen::Index> sizes() const;

private:
  std::vector<Eigen::MatrixXd> groups_;
  std::vector<double> betas_;
};

/// Population means and covariances, used only for validation and power
/// prediction (dense p x p covariances).
struct PopulationSpec {
  std::vector<Eigen::VectorXd> mus;
  std::vector<Eigen::MatrixXd> sigmas;
};

/// T_n: the unbiased U-statistic estimate of mu^T W mu with mu = sum beta_i mu_i.
/// Cross-group terms use group sums; within-group terms use
/// sum_{j!=k} x_j^T W x_k = s^T W s - sum_j x_j^T W x_j. Cost O(n p + q^2 p).
double compute_tn(const SampleSet& s, const WeightMatrix& w);

/// sum_i beta_i mu_i.
Eigen::VectorXd combined_mean(const PopulationSpec& pop, const std::vector<double>& betas);

/// E(T_n) = mu^T W mu.
double theoretical_mean(const PopulationSpec& pop, const std::vector<double>& betas,
                        const WeightMatrix& w);

struct VarianceParts {
  double sigma_q1_sq = 0.0;  // null-dominant part (depends on covariances only)
  double sigma_q2_sq = 0.0;  // signal-dependent part
  double total() const noexcept { return sigma_q1_sq + sigma_q2_sq; }
};

/// Var(T_n) = sigma_q1^2 + sigma_q2^2 from the population moments. A covariance
/// that is not numerically PSD is reported on stderr and the computation proceeds.
VarianceParts theoretical_variance(const PopulationSpec& pop, const std::vector<double>& betas,
                                   const std::vector<Eigen::Index>& ns, const WeightMatrix& w);

/// Checks a covariance for symmetry (1e-10) and numerical PSD (eigenvalues >= -1e-8).
bool is_numerically_psd(const Eigen::MatrixXd& sigma);

} // namespace wlt
