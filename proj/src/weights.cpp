#include "wlt/weights.hpp"

#include <cmath>
#include <string>

#include "wlt/errors.hpp"

namespace wlt {

void validate(const WeightSpec& spec) {
  if (spec.alpha.empty()) {
    throw InvalidDimension("weight spec has dimension 0");
  }
  if (spec.alpha.size() != spec.omega_sq.size()) {
    throw InvalidDimension("alpha has length " + std::to_string(spec.alpha.size()) +
                           " but omega_sq has length " + std::to_string(spec.omega_sq.size()));
  }
  for (std::size_t k = 0; k < spec.omega_sq.size(); ++k) {
    if (!(spec.omega_sq[k] > 0.0) || !std::isfinite(spec.omega_sq[k])) {
      throw InvalidArgument("omega_sq[" + std::to_string(k + 1) + "] must be finite and > 0");
    }
    if (!std::isfinite(spec.alpha[k])) {
      throw InvalidArgument("alpha[" + std::to_string(k + 1) + "] is not finite");
    }
  }
}

WeightSpec default_weight_spec(std::size_t p) {
  if (p == 0) {
    throw InvalidDimension("default_weight_spec: p must be >= 1");
  }
  const double pd = static_cast<double>(p);
  const double a = std::sqrt(5.0) * std::pow(pd, -0.375);
  WeightSpec spec;
  spec.alpha.assign(p, a);
  spec.omega_sq.resize(p);
  for (std::size_t k = 1; k <= p; ++k) {
    const double omega = std::sqrt(2.0) * (1.0 + 2.0 * static_cast<double>(k) / (3.0 * pd));
    spec.omega_sq[k - 1] = omega * omega;
  }
  return spec;
}

WeightSpec identity_weight_spec(std::size_t p) {
  if (p == 0) {
    throw InvalidDimension("identity_weight_spec: p must be >= 1");
  }
  return WeightSpec{std::vector<double>(p, 0.0), std::vector<double>(p, 1.0)};
}

WeightMatrix::WeightMatrix(WeightSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  const auto p = static_cast<Eigen::Index>(spec_.dim());
  omega_sq_ = Eigen::Map<const Eigen::VectorXd>(spec_.omega_sq.data(), p);
  alpha_ = Eigen::Map<const Eigen::VectorXd>(spec_.alpha.data(), p);
  omega_ = omega_sq_.cwiseSqrt();
  identity_ = alpha_.isZero(0.0) && (omega_sq_.array() == 1.0).all();
}

double WeightMatrix::bilinear(std::span<const double> x, std::span<const double> y) const {
  const std::size_t p = dim();
  if (x.size() != p || y.size() != p) {
    throw DimensionMismatch("bilinear: expected vectors of length " + std::to_string(p));
  }
  double diag = 0.0;
  double ax = 0.0;
  double ay = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    diag += spec_.omega_sq[k] * (x[k] * y[k]);
    ax += spec_.alpha[k] * x[k];
    ay += spec_.alpha[k] * y[k];
  }
  return diag + ax * ay;
}

double WeightMatrix::bilinear(const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (x.size() != y.size()) {
    throw DimensionMismatch("bilinear: vectors differ in length");
  }
  // Ref may be strided; copy only when needed.
  const Eigen::VectorXd xc = x;
  const Eigen::VectorXd yc = y;
  return bilinear(std::span<const double>(xc.data(), static_cast<std::size_t>(xc.size())),
                  std::span<const double>(yc.data(), static_cast<std::size_t>(yc.size())));
}

Eigen::MatrixXd WeightMatrix::factor_rows(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
  const auto p = static_cast<Eigen::Index>(dim());
  if (x.cols() != p) {
    throw DimensionMismatch("factor_rows: data has " + std::to_string(x.cols()) +
                            " columns, weight dimension is " + std::to_string(p));
  }
  Eigen::MatrixXd out(x.rows(), p + 1);
  out.leftCols(p) = x * omega_.asDiagonal();
  out.col(p) = x * alpha_;
  return out;
}

Eigen::VectorXd WeightMatrix::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != static_cast<Eigen::Index>(dim())) {
    throw DimensionMismatch("apply: vector length does not match weight dimension");
  }
  return omega_sq_.cwiseProduct(x) + alpha_ * alpha_.dot(x);
}

Eigen::MatrixXd WeightMatrix::left_multiply(const Eigen::Ref<const Eigen::MatrixXd>& a) const {
  if (a.rows() != static_cast<Eigen::Index>(dim())) {
    throw DimensionMismatch("left_multiply: row count does not match weight dimension");
  }
  Eigen::MatrixXd out = omega_sq_.asDiagonal() * a;
  out.noalias() += alpha_ * (alpha_.transpose() * a);
  return out;
}

Eigen::MatrixXd dense_weight(const WeightMatrix& w) {
  const auto& s = w.spec();
  const auto p = static_cast<Eigen::Index>(s.dim());
  const Eigen::Map<const Eigen::VectorXd> alpha(s.alpha.data(), p);
  Eigen::MatrixXd out = alpha * alpha.transpose();
  for (Eigen::Index k = 0; k < p; ++k) {
    out(k, k) += s.omega_sq[static_cast<std::size_t>(k)];
  }
  return out;
}

} // namespace wlt
