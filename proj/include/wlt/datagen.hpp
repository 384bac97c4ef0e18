#pragma once

// Synthetic data from the factor model x_ij = mu_i + Sigma_i^{1/2} z_ij with
// standardised innovations, two covariance cases and the (r, rho) mean design.

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wlt/rng.hpp"
#include "wlt/statistic.hpp"

namespace wlt {

enum class Distribution {
  normal,      // N(0, 1)
  gamma,       // (G - 4) / 2, G ~ Gamma(shape 4, scale 1)
  t5,          // T / sqrt(5/3), T ~ t(5)
  degenerate,  // all zeros; test hook, not reachable from config files
};

struct DistributionSpec {
  Distribution kind = Distribution::normal;

  /// E z^3 of the standardised law.
  double skewness() const noexcept;
  /// E z^4 of the standardised law (not excess).
  double fourth_moment() const noexcept;
};

std::string_view to_string(Distribution d) noexcept;
/// Accepts "normal", "gamma" and "t" (also "t5").
std::optional<Distribution> parse_distribution(std::string_view name);

void draw_innovations(const DistributionSpec& spec, Engine& rng, std::span<double> out);
std::vector<double> draw_innovation(const DistributionSpec& spec, Engine& rng, std::size_t count);

/// Symmetric square root by eigendecomposition; eigenvalues below zero (down
/// to -1e-10 relative) are clamped to zero.
Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& sigma);

struct CovarianceCase {
  int id = 1;
  std::size_t p = 0;
  std::array<Eigen::MatrixXd, 3> sigmas;
  std::array<Eigen::MatrixXd, 3> roots;
};

/// Case 1: Sigma_1 = Sigma_2 = Sigma_3 = (2 * 0.4^{|i-j|}).
/// Case 2: Sigma_1 = (0.5^{|i-j|} 1{|i-j| <= 1}), Sigma_2 = 1.5 Sigma_1, Sigma_3 = 2 Sigma_1.
CovarianceCase build_case(int id, std::size_t p);

inline constexpr std::array<double, 3> kSimulationBetas{2.0, -2.0, -1.0};

/// (0.5 n*, n*, 1.5 n*). n* must be even and give groups of at least 4.
std::array<Eigen::Index, 3> group_sizes_for(int n_star);

struct MeanDesign {
  std::size_t p = 0;
  double r = 0.0;
  double rho = 0.0;
  std::array<Eigen::Index, 3> ns{};
  double kappa = 0.0;
  std::size_t lead = 0;  // [p^{1 - rho}]
  std::array<Eigen::VectorXd, 3> mus;
};

/// kappa = sqrt(3 r log(p) (1/n_1 + 1/n_2 + 1/n_3)), natural log.
double design_kappa(std::size_t p, double r, const std::array<Eigen::Index, 3>& ns);

/// mu_1 = kappa 1, mu_2 = (0 x lead, kappa ...), mu_3 = (kappa x lead, 0 ...), so
/// 2 mu_1 - 2 mu_2 - mu_3 = (kappa x lead, 0 ...).
MeanDesign make_mean_design(std::size_t p, double r, double rho,
                            const std::array<Eigen::Index, 3>& ns);

struct Scenario {
  std::shared_ptr<const CovarianceCase> cov;
  DistributionSpec dist;
  std::optional<MeanDesign> mean;  // empty: null hypothesis, all means zero
  std::array<Eigen::Index, 3> ns{};
};

/// Draws one sample set. Innovations are consumed group by group, observation
/// by observation, component by component.
SampleSet gen_sampleset(const Scenario& sc, Engine& rng);

/// The population behind a scenario (means and covariances).
PopulationSpec scenario_population(const Scenario& sc);

} // namespace wlt
