#include "wlt/statistic.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <string>

#include "wlt/errors.hpp"

namespace wlt {

namespace {

Eigen::MatrixXd canonical_rows(const Eigen::MatrixXd& x) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  const Eigen::Index p = x.cols();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index k = 0; k < p; ++k) {
      const double u = x(a, k);
      const double v = x(b, k);
      if (u < v) return true;
      if (v < u) return false;
    }
    return false;
  });
  bool sorted = true;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] != static_cast<Eigen::Index>(i)) {
      sorted = false;
      break;
    }
  }
  if (sorted) {
    return x;
  }
  Eigen::MatrixXd out(x.rows(), p);
  for (std::size_t i = 0; i < order.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = x.row(order[i]);
  }
  return out;
}

void check_dim(const SampleSet& s, const WeightMatrix& w, const char* who) {
  if (s.dim() != w.dim()) {
    throw DimensionMismatch(std::string(who) + ": data dimension " + std::to_string(s.dim()) +
                            " does not match weight dimension " + std::to_string(w.dim()));
  }
}

} // namespace

SampleSet::SampleSet(std::vector<Eigen::MatrixXd> groups, std::vector<double> betas)
    : betas_(std::move(betas)) {
  if (groups.size() < 2) {
    throw InvalidArgument("a sample set needs at least 2 groups");
  }
  if (groups.size() != betas_.size()) {
    throw InvalidArgument("got " + std::to_string(groups.size()) + " groups but " +
                          std::to_string(betas_.size()) + " coefficients");
  }
  bool any_nonzero = false;
  for (double b : betas_) {
    if (!std::isfinite(b)) {
      throw InvalidArgument("coefficients must be finite");
    }
    any_nonzero = any_nonzero || b != 0.0;
  }
  if (!any_nonzero) {
    throw InvalidArgument("coefficients must not all be zero");
  }
  const Eigen::Index p = groups.front().cols();
  if (p < 1) {
    throw InvalidDimension("observations must have at least one component");
  }
  groups_.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].cols() != p) {
      throw DimensionMismatch("group " + std::to_string(i + 1) + " has " +
                              std::to_string(groups[i].cols()) + " columns, expected " +
                              std::to_string(p));
    }
    if (groups[i].rows() < 2) {
      throw InsufficientSamples("group " + std::to_string(i + 1) + " has " +
                                std::to_string(groups[i].rows()) +
                                " observations; at least 2 are required");
    }
    groups_.push_back(canonical_rows(groups[i]));
  }
}

Eigen::Index SampleSet::total_size() const noexcept {
  Eigen::Index n = 0;
  for (const auto& g : groups_) n += g.rows();
  return n;
}

std::vector<Eigen::Index> SampleSet::sizes() const {
  std::vector<Eigen::Index> out;
  out.reserve(groups_.size());
  for (const auto& g : groups_) out.push_back(g.rows());
  return out;
}

double compute_tn(const SampleSet& s, const WeightMatrix& w) {
  check_dim(s, w, "compute_tn");
  const std::size_t q = s.num_groups();
  const auto& betas = s.betas();

  std::vector<Eigen::VectorXd> sums(q);
  std::vector<double> self(q, 0.0);
  for (std::size_t i = 0; i < q; ++i) {
    const Eigen::MatrixXd& x = s.group(i);
    sums[i] = x.colwise().sum().transpose();
    // sum_j x_j^T W x_j via the factor rows: squared row norms of X F.
    self[i] = w.factor_rows(x).squaredNorm();
  }

  double cross = 0.0;
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b = 0; b < q; ++b) {
      if (a == b) continue;
      const double na = static_cast<double>(s.size(a));
      const double nb = static_cast<double>(s.size(b));
      cross += betas[a] * betas[b] / (na * nb) * w.bilinear(sums[a], sums[b]);
    }
  }
  double within = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    const double n = static_cast<double>(s.size(i));
    within += betas[i] * betas[i] / (n * (n - 1.0)) * (w.bilinear(sums[i], sums[i]) - self[i]);
  }
  return cross + within;
}

Eigen::VectorXd combined_mean(const PopulationSpec& pop, const std::vector<double>& betas) {
  if (pop.mus.empty() || pop.mus.size() != betas.size()) {
    throw DimensionMismatch("combined_mean: need one coefficient per mean vector");
  }
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(pop.mus.front().size());
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (pop.mus[i].size() != mu.size()) {
      throw DimensionMismatch("combined_mean: mean vectors differ in length");
    }
    mu += betas[i] * pop.mus[i];
  }
  return mu;
}

double theoretical_mean(const PopulationSpec& pop, const std::vector<double>& betas,
                        const WeightMatrix& w) {
  const Eigen::VectorXd mu = combined_mean(pop, betas);
  if (static_cast<std::size_t>(mu.size()) != w.dim()) {
    throw DimensionMismatch("theoretical_mean: mean dimension does not match weight dimension");
  }
  return w.bilinear(mu, mu);
}

bool is_numerically_psd(const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols()) return false;
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-8;
}

VarianceParts theoretical_variance(const PopulationSpec& pop, const std::vector<double>& betas,
                                   const std::vector<Eigen::Index>& ns, const WeightMatrix& w) {
  const std::size_t q = betas.size();
  if (pop.sigmas.size() != q || ns.size() != q || pop.mus.size() != q) {
    throw DimensionMismatch("theoretical_variance: need q means, covariances and sizes");
  }
  const auto p = static_cast<Eigen::Index>(w.dim());
  std::vector<Eigen::MatrixXd> ws(q);
  for (std::size_t i = 0; i < q; ++i) {
    const auto& sig = pop.sigmas[i];
    if (sig.rows() != p || sig.cols() != p) {
      throw DimensionMismatch("theoretical_variance: covariance " + std::to_string(i + 1) +
                              " is not " + std::to_string(p) + " x " + std::to_string(p));
    }
    if (ns[i] < 2) {
      throw InsufficientSamples("theoretical_variance: group sizes must be >= 2");
    }
    if (!is_numerically_psd(sig)) {
      std::cerr << "warning: covariance " << i + 1 << " is not numerically PSD\n";
    }
    ws[i] = w.left_multiply(sig);
  }
  // tr(A B) = sum_jk A_jk B_kj.
  auto tr_prod = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.cwiseProduct(b.transpose()).sum();
  };

  VarianceParts out;
  for (std::size_t a = 0; a < q; ++a) {
    const double na = static_cast<double>(ns[a]);
    const double ba2 = betas[a] * betas[a];
    for (std::size_t b = 0; b < q; ++b) {
      if (a == b) continue;
      const double nb = static_cast<double>(ns[b]);
      out.sigma_q1_sq += 2.0 * ba2 * betas[b] * betas[b] / (na * nb) * tr_prod(ws[a], ws[b]);
    }
    out.sigma_q1_sq += 2.0 * ba2 * ba2 / (na * (na - 1.0)) * tr_prod(ws[a], ws[a]);
  }

  const Eigen::VectorXd mu = combined_mean(pop, betas);
  Eigen::MatrixXd mix = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t i = 0; i < q; ++i) {
    mix += betas[i] * betas[i] / static_cast<double>(ns[i]) * pop.sigmas[i];
  }
  const Eigen::VectorXd wmu = w.apply(mu);
  out.sigma_q2_sq = 4.0 * wmu.dot(mix * wmu);
  return out;
}

} // namespace wlt
