#pragma once

// Decision rule, p-values and power calculations for the weighted L2-norm test.

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "wlt/statistic.hpp"
#include "wlt/weights.hpp"

namespace wlt {

struct TestResult {
  double tn = 0.0;
  double sigma_hat = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  bool reject = false;
  double level = 0.05;

  bool operator==(const TestResult&) const = default;
};

/// Applies the one-sided rule: reject when z = tn / sigma_hat >= z_level.
/// The inequality is inclusive.
TestResult decide(double tn, double sigma_hat, double level);

/// T_n, sigma_hat and the decision at `level`. Propagates InsufficientSamples
/// and DegenerateVariance.
TestResult run_test(const SampleSet& s, const WeightMatrix& w, double level, int threads = 0);

/// Signal construction mu = (nu, ..., nu, 0, ..., 0) with [p^delta] leading nonzeros.
struct WeakDenseSignal {
  double delta = 0.75;
  double nu = 0.0;
};

struct PowerScenario {
  PopulationSpec pop;
  std::vector<double> betas;
  std::vector<Eigen::Index> ns;
  WeightSpec weight;
  double level = 0.05;
  std::optional<WeakDenseSignal> weak_dense;
  /// Largest eigenvalue of the common covariance; computed when absent.
  std::optional<double> lambda_max;
};

/// sum_{a!=b} b_a^2 b_b^2 / (n_a n_b) + sum_i b_i^4 / (n_i (n_i - 1)).
double sample_size_factor(const std::vector<double>& betas, const std::vector<Eigen::Index>& ns);

struct PowerBreakdown {
  double noncentrality = 0.0;  // mu^T W mu
  VarianceParts variance;
  double sigma = 0.0;          // sqrt(sigma_q1^2)
  double power = 0.0;          // Phi(-z + mu^T W mu / sigma)
  double power_full_variance = 0.0;
};

PowerBreakdown power_breakdown(const PowerScenario& sc);

/// Phi(-z_level + mu^T W mu / sigma_{n,q}) with sigma_{n,q}^2 = sigma_q1^2.
double asymptotic_power(const PowerScenario& sc);

/// Phi((mu^T W mu - z_level sigma_q1) / sqrt(sigma_q1^2 + sigma_q2^2)): same
/// limit as asymptotic_power when sigma_q2 is negligible, but keeps the
/// signal-dependent variance for finite-sample prediction.
double asymptotic_power_full_variance(const PowerScenario& sc);

/// Equal-covariance form: mu^T W mu / (sqrt(2 tr((W Sigma)^2)) sqrt(B)).
/// Throws UnsupportedScenario when the covariances differ.
double equal_covariance_noncentrality(const PowerScenario& sc);
double equal_covariance_power(const PowerScenario& sc);

/// Closed-form lower bound on the equal-covariance noncentrality under the
/// weak-dense signal, equal alpha and nondecreasing omega.
double lower_bound_noncentrality(const PowerScenario& sc);

/// Phi(-z_level + lower_bound_noncentrality(sc)).
double power_lower_bound(const PowerScenario& sc);

/// Builds means whose combination sum beta_i mu_i is the weak-dense vector:
/// mu_1 = signal / beta_1 and the other means zero. All groups share `sigma`.
PopulationSpec weak_dense_population(std::size_t p, const WeakDenseSignal& signal,
                                     const Eigen::MatrixXd& sigma,
                                     const std::vector<double>& betas);

/// nu with nu^2 = sqrt(B), the boundary rate of the power-to-one condition.
double corollary_rate_nu(const std::vector<double>& betas, const std::vector<Eigen::Index>& ns);

struct AssumptionReport {
  /// max over (a,b,c,d) of tr(W S_a W S_b W S_c W S_d) / tr^2((sum_i W S_i)^2)
  double fourth_moment_ratio = 0.0;
  /// mu^T W (sum b_i^2 S_i) W mu divided by n^{-1} sum_{a,b} b_a^2 b_b^2 tr(W S_a W S_b)
  double local_alternative_ratio = 0.0;
};

/// Reports both ratios as numbers; no threshold is applied.
AssumptionReport assumption_diagnostics(const PopulationSpec& pop, const std::vector<double>& betas,
                                        const std::vector<Eigen::Index>& ns,
                                        const WeightMatrix& w);

} // namespace wlt
