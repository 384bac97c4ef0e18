#pragma once

// Weight matrix W = diag(omega_sq) + alpha alpha^T induced by a product weight
// density with component means alpha_k and variances omega_k^2. W is never
// materialised on production paths; everything goes through its structure.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wlt {

struct WeightSpec {
  std::vector<double> alpha;
  std::vector<double> omega_sq;

  std::size_t dim() const noexcept { return alpha.size(); }
};

/// Throws InvalidDimension for empty or mismatched vectors and InvalidArgument
/// for a nonpositive or non-finite omega_sq entry.
void validate(const WeightSpec& spec);

/// alpha_k = sqrt(5) p^{-3/8}, omega_k = sqrt(2) (1 + 2k/(3p)) for k = 1..p.
WeightSpec default_weight_spec(std::size_t p);

/// alpha = 0, omega_sq = 1: W = I, which gives the unweighted U-statistic.
WeightSpec identity_weight_spec(std::size_t p);

class WeightMatrix {
public:
  explicit WeightMatrix(WeightSpec spec);

  const WeightSpec& spec() const noexcept { return spec_; }
  std::size_t dim() const noexcept { return spec_.dim(); }

  /// x^T W y, summed over ascending index before adding the rank-one term.
  double bilinear(std::span<const double> x, std::span<const double> y) const;
  double bilinear(const Eigen::Ref<const Eigen::VectorXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& y) const;

  /// Rows of X mapped through a factor F with W = F F^T, F = [diag(omega) | alpha].
  /// The result has p + 1 columns and (XF)(YF)^T = X W Y^T.
  Eigen::MatrixXd factor_rows(const Eigen::Ref<const Eigen::MatrixXd>& x) const;

  /// W x.
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// W A for a dense p x p (or p x k) matrix A, in O(p k).
  Eigen::MatrixXd left_multiply(const Eigen::Ref<const Eigen::MatrixXd>& a) const;

  bool is_identity() const noexcept { return identity_; }

private:
  WeightSpec spec_;
  Eigen::VectorXd omega_;   // sqrt(omega_sq)
  Eigen::VectorXd omega_sq_;
  Eigen::VectorXd alpha_;
  bool identity_ = false;
};

/// Dense p x p materialisation of W (validation and small-p tooling only).
Eigen::MatrixXd dense_weight(const WeightMatrix& w);

} // namespace wlt
