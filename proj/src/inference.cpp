#include "wlt/inference.hpp"

#include <array>
#include <cmath>
#include <string>

#include "wlt/errors.hpp"
#include "wlt/estimation.hpp"
#include "wlt/normal.hpp"
#include "wlt/numeric.hpp"

namespace wlt {

TestResult decide(double tn, double sigma_hat, double level) {
  const double crit = z_quantile(level);
  if (!(sigma_hat > 0.0)) {
    throw DegenerateVariance(sigma_hat * sigma_hat);
  }
  TestResult r;
  r.tn = tn;
  r.sigma_hat = sigma_hat;
  r.z = tn / sigma_hat;
  r.p_value = normal_upper_tail(r.z);
  r.reject = r.z >= crit;
  r.level = level;
  return r;
}

TestResult run_test(const SampleSet& s, const WeightMatrix& w, double level, int threads) {
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidArgument("significance level must lie in (0, 1)");
  }
  const double var = sigma_hat_sq(s, w, threads);
  return decide(compute_tn(s, w), std::sqrt(var), level);
}

double sample_size_factor(const std::vector<double>& betas, const std::vector<Eigen::Index>& ns) {
  if (betas.size() != ns.size()) {
    throw DimensionMismatch("sample_size_factor: need one size per coefficient");
  }
  double total = 0.0;
  for (std::size_t a = 0; a < betas.size(); ++a) {
    const double na = static_cast<double>(ns[a]);
    if (ns[a] < 2) {
      throw InsufficientSamples("sample_size_factor: group sizes must be >= 2");
    }
    const double ba2 = betas[a] * betas[a];
    for (std::size_t b = 0; b < betas.size(); ++b) {
      if (a == b) continue;
      total += ba2 * betas[b] * betas[b] / (na * static_cast<double>(ns[b]));
    }
    total += ba2 * ba2 / (na * (na - 1.0));
  }
  return total;
}

PowerBreakdown power_breakdown(const PowerScenario& sc) {
  const WeightMatrix w(sc.weight);
  const double crit = z_quantile(sc.level);
  PowerBreakdown out;
  out.noncentrality = theoretical_mean(sc.pop, sc.betas, w);
  out.variance = theoretical_variance(sc.pop, sc.betas, sc.ns, w);
  out.sigma = std::sqrt(out.variance.sigma_q1_sq);
  if (!(out.sigma > 0.0)) {
    throw DegenerateVariance(out.variance.sigma_q1_sq);
  }
  out.power = normal_cdf(-crit + out.noncentrality / out.sigma);
  out.power_full_variance =
      normal_cdf((out.noncentrality - crit * out.sigma) / std::sqrt(out.variance.total()));
  return out;
}

double asymptotic_power(const PowerScenario& sc) { return power_breakdown(sc).power; }

double asymptotic_power_full_variance(const PowerScenario& sc) {
  return power_breakdown(sc).power_full_variance;
}

namespace {

const Eigen::MatrixXd& common_covariance(const PowerScenario& sc) {
  if (sc.pop.sigmas.empty()) {
    throw DimensionMismatch("scenario has no covariance matrices");
  }
  const Eigen::MatrixXd& first = sc.pop.sigmas.front();
  const double scale = std::max(1.0, first.cwiseAbs().maxCoeff());
  for (const auto& s : sc.pop.sigmas) {
    if (s.rows() != first.rows() || s.cols() != first.cols() ||
        (s - first).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw UnsupportedScenario("this power formula requires equal covariance matrices");
    }
  }
  return first;
}

} // namespace

double equal_covariance_noncentrality(const PowerScenario& sc) {
  const Eigen::MatrixXd& sigma = common_covariance(sc);
  const WeightMatrix w(sc.weight);
  const Eigen::VectorXd mu = combined_mean(sc.pop, sc.betas);
  if (static_cast<std::size_t>(mu.size()) != w.dim() || sigma.rows() != mu.size()) {
    throw DimensionMismatch("equal_covariance_noncentrality: dimensions disagree");
  }
  const Eigen::MatrixXd ws = w.left_multiply(sigma);
  const double tr_ws_sq = ws.cwiseProduct(ws.transpose()).sum();
  const double b = sample_size_factor(sc.betas, sc.ns);
  return w.bilinear(mu, mu) / (std::sqrt(2.0 * tr_ws_sq) * std::sqrt(b));
}

double equal_covariance_power(const PowerScenario& sc) {
  return normal_cdf(-z_quantile(sc.level) + equal_covariance_noncentrality(sc));
}

double lower_bound_noncentrality(const PowerScenario& sc) {
  if (!sc.weak_dense) {
    throw UnsupportedScenario("lower bound needs the weak-dense signal parameters");
  }
  const WeakDenseSignal& sig = *sc.weak_dense;
  if (!(sig.delta > 0.0 && sig.delta <= 1.0) || !(sig.nu >= 0.0)) {
    throw InvalidArgument("weak-dense signal needs delta in (0, 1] and nu >= 0");
  }
  const Eigen::MatrixXd& sigma = common_covariance(sc);
  validate(sc.weight);
  const std::size_t p = sc.weight.dim();
  const double alpha = sc.weight.alpha.front();
  for (std::size_t k = 0; k < p; ++k) {
    if (std::abs(sc.weight.alpha[k] - alpha) > 1e-12 * std::max(1.0, std::abs(alpha))) {
      throw UnsupportedScenario("lower bound requires equal alpha entries");
    }
    if (k > 0 && sc.weight.omega_sq[k] < sc.weight.omega_sq[k - 1]) {
      throw UnsupportedScenario("lower bound requires nondecreasing omega");
    }
  }
  if (static_cast<std::size_t>(sigma.rows()) != p) {
    throw DimensionMismatch("lower bound: covariance dimension does not match weights");
  }
  double lambda_max = 0.0;
  if (sc.lambda_max) {
    lambda_max = *sc.lambda_max;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
    lambda_max = es.eigenvalues().maxCoeff();
  }

  const std::size_t m = std::min(p, integer_part(std::pow(static_cast<double>(p), sig.delta)));
  const double md = static_cast<double>(m);
  const double nu2 = sig.nu * sig.nu;
  double lead_omega_sq = 0.0;
  for (std::size_t k = 0; k < m; ++k) lead_omega_sq += sc.weight.omega_sq[k];
  const double numer = alpha * alpha * md * md * nu2 + nu2 * lead_omega_sq;

  double tail_omega4 = 0.0;
  for (std::size_t k = 1; k < p; ++k) tail_omega4 += sc.weight.omega_sq[k] * sc.weight.omega_sq[k];
  const double wp = sc.weight.omega_sq[p - 1];
  const double pd = static_cast<double>(p);
  const double a2 = alpha * alpha;
  const double tr_w_sq_bound = tail_omega4 + wp * wp + 2.0 * pd * wp * a2 + pd * pd * a2 * a2;
  const double denom = std::sqrt(2.0 * lambda_max * lambda_max * tr_w_sq_bound) *
                       std::sqrt(sample_size_factor(sc.betas, sc.ns));
  return numer / denom;
}

double power_lower_bound(const PowerScenario& sc) {
  return normal_cdf(-z_quantile(sc.level) + lower_bound_noncentrality(sc));
}

PopulationSpec weak_dense_population(std::size_t p, const WeakDenseSignal& signal,
                                     const Eigen::MatrixXd& sigma,
                                     const std::vector<double>& betas) {
  if (p == 0) throw InvalidDimension("weak_dense_population: p must be >= 1");
  if (betas.empty() || betas.front() == 0.0) {
    throw InvalidArgument("weak_dense_population: beta_1 must be nonzero");
  }
  if (!(signal.delta > 0.0 && signal.delta <= 1.0)) {
    throw InvalidArgument("weak_dense_population: delta must lie in (0, 1]");
  }
  const std::size_t m = std::min(p, integer_part(std::pow(static_cast<double>(p), signal.delta)));
  PopulationSpec pop;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    if (i == 0) mu.head(static_cast<Eigen::Index>(m)).setConstant(signal.nu / betas.front());
    pop.mus.push_back(std::move(mu));
    pop.sigmas.push_back(sigma);
  }
  return pop;
}

double corollary_rate_nu(const std::vector<double>& betas, const std::vector<Eigen::Index>& ns) {
  return std::pow(sample_size_factor(betas, ns), 0.25);
}

AssumptionReport assumption_diagnostics(const PopulationSpec& pop, const std::vector<double>& betas,
                                        const std::vector<Eigen::Index>& ns,
                                        const WeightMatrix& w) {
  const std::size_t q = pop.sigmas.size();
  if (q == 0 || betas.size() != q || ns.size() != q) {
    throw DimensionMismatch("assumption_diagnostics: need q covariances, coefficients and sizes");
  }
  std::vector<Eigen::MatrixXd> ws(q);
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(pop.sigmas[0].rows(), pop.sigmas[0].cols());
  for (std::size_t i = 0; i < q; ++i) {
    ws[i] = w.left_multiply(pop.sigmas[i]);
    sum += ws[i];
  }
  auto tr_prod = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.cwiseProduct(b.transpose()).sum();
  };
  std::vector<Eigen::MatrixXd> pairs(q * q);
  for (std::size_t a = 0; a < q; ++a) {
    for (std::size_t b = 0; b < q; ++b) pairs[a * q + b] = ws[a] * ws[b];
  }
  double num = 0.0;
  for (std::size_t ab = 0; ab < q * q; ++ab) {
    for (std::size_t cd = 0; cd < q * q; ++cd) {
      num = std::max(num, tr_prod(pairs[ab], pairs[cd]));
    }
  }
  const double tr_sum_sq = tr_prod(sum, sum);

  AssumptionReport out;
  out.fourth_moment_ratio = num / (tr_sum_sq * tr_sum_sq);

  const Eigen::VectorXd mu = combined_mean(pop, betas);
  Eigen::MatrixXd mix = Eigen::MatrixXd::Zero(sum.rows(), sum.cols());
  double n = 0.0;
  double rhs = 0.0;
  for (std::size_t a = 0; a < q; ++a) {
    mix += betas[a] * betas[a] * pop.sigmas[a];
    n += static_cast<double>(ns[a]);
    for (std::size_t b = 0; b < q; ++b) {
      rhs += betas[a] * betas[a] * betas[b] * betas[b] * tr_prod(ws[a], ws[b]);
    }
  }
  const Eigen::VectorXd wmu = w.apply(mu);
  const double lhs = wmu.dot(mix * wmu);
  out.local_alternative_ratio = lhs / (rhs / n);
  return out;
}

} // namespace wlt
