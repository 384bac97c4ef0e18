#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wlt/datagen.hpp"
#include "wlt/errors.hpp"
#include "wlt/estimation.hpp"
#include "wlt/inference.hpp"
#include "wlt/normal.hpp"
#include "wlt/statistic.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Reference values from 40-digit mpmath evaluations.
TEST(Normal, CdfAgainstHighPrecision) {
  const std::pair<double, double> table[] = {
      {-8.0, 6.2209605742717841235e-16}, {-3.0, 0.0013498980316300945267},
      {-1.0, 0.15865525393145705141},    {0.0, 0.5},
      {0.5, 0.69146246127401310364},     {1.5, 0.933192798731141934},
      {3.0, 0.99865010196836990547},     {7.5, 0.99999999999996809108},
  };
  for (auto [x, v] : table) EXPECT_NEAR(wlt::normal_cdf(x), v, 1e-12) << x;
  EXPECT_EQ(wlt::normal_cdf(0.0), 0.5);
  EXPECT_NEAR(wlt::normal_upper_tail(8.0), 6.2209605742717841235e-16, 1e-28);
}

TEST(Normal, QuantileAgainstHighPrecision) {
  EXPECT_EQ(wlt::z_quantile(0.5), 0.0);
  EXPECT_NEAR(wlt::z_quantile(0.05), 1.6448536269514727149, 1e-12);
  EXPECT_NEAR(wlt::z_quantile(0.01), 2.3263478740408411009, 1e-12);
  EXPECT_NEAR(wlt::z_quantile(0.001), 3.0902323061678135415, 1e-12);
  EXPECT_NEAR(wlt::z_quantile(0.1), 1.281551565544600467, 1e-12);
  EXPECT_NEAR(wlt::z_quantile(1e-6), 4.7534243088228989482, 1e-10);
  EXPECT_NEAR(wlt::z_quantile(0.975), -1.9599639845400542355, 1e-12);
}

TEST(Normal, QuantileRoundTrip) {
  for (double v = 1e-9; v < 1.0; v = v < 0.01 ? v * 3.0 : v + 0.0173) {
    EXPECT_LE(std::abs(wlt::normal_cdf(wlt::z_quantile(v)) - (1.0 - v)), 1e-10) << v;
  }
}

TEST(Normal, InvalidLevelsThrow) {
  for (double v : {0.0, 1.0, -0.1, 1.5, double(NAN)}) {
    EXPECT_THROW(wlt::z_quantile(v), wlt::InvalidArgument) << v;
    EXPECT_THROW(wlt::normal_quantile(v), wlt::InvalidArgument) << v;
  }
}

TEST(Decide, BoundaryIsInclusive) {
  const double z = wlt::z_quantile(0.05);
  const auto r = wlt::decide(z, 1.0, 0.05);
  EXPECT_EQ(r.z, z);
  EXPECT_TRUE(r.reject);
  EXPECT_FALSE(wlt::decide(std::nextafter(z, 0.0), 1.0, 0.05).reject);
}

TEST(Decide, FieldsAndInvariants) {
  for (double tn : {-5.0, -0.2, 0.0, 0.7, 1.2, 3.3, 10.0}) {
    for (double level : {0.01, 0.05, 0.2}) {
      const auto r = wlt::decide(tn, 2.0, level);
      EXPECT_EQ(r.z, tn / 2.0);
      EXPECT_NEAR(r.p_value, 1.0 - wlt::normal_cdf(r.z), 1e-15);
      EXPECT_EQ(r.reject, r.p_value <= level);
      EXPECT_EQ(r.level, level);
    }
  }
  EXPECT_THROW(wlt::decide(1.0, 0.0, 0.05), wlt::DegenerateVariance);
  EXPECT_THROW(wlt::decide(1.0, 1.0, 1.0), wlt::InvalidArgument);
}

TEST(RunTest, DeterministicAndConsistent) {
  const auto cov = std::make_shared<const wlt::CovarianceCase>(wlt::build_case(2, 30));
  wlt::Scenario sc{cov, {wlt::Distribution::gamma}, std::nullopt, {10, 20, 30}};
  auto rng = wlt::make_stream(1, 2, 3);
  const auto s = wlt::gen_sampleset(sc, rng);
  wlt::WeightMatrix w(wlt::default_weight_spec(30));
  const auto a = wlt::run_test(s, w, 0.05);
  const auto b = wlt::run_test(s, w, 0.05, 1);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.tn, wlt::compute_tn(s, w));
  EXPECT_EQ(a.sigma_hat, std::sqrt(wlt::sigma_hat_sq(s, w)));
  EXPECT_THROW(wlt::run_test(s, w, 0.0), wlt::InvalidArgument);
}

TEST(RunTest, PropagatesErrors) {
  wlt::WeightMatrix w(wlt::default_weight_spec(2));
  EXPECT_THROW(wlt::run_test(wlt::SampleSet({MatrixXd::Ones(4, 2), MatrixXd::Ones(5, 2)}, {1.0, -1.0}), w, 0.05),
               wlt::DegenerateVariance);
  EXPECT_THROW(wlt::run_test(wlt::SampleSet({MatrixXd::Random(3, 2), MatrixXd::Random(5, 2)}, {1.0, -1.0}), w, 0.05),
               wlt::InsufficientSamples);
}

TEST(SampleSizeFactor, HandValue) {
  // beta=(1,-1), n=(2,4): 2 * 1/(2*4) + 1/(2*1) + 1/(4*3)
  EXPECT_NEAR(wlt::sample_size_factor({1.0, -1.0}, {2, 4}), 0.25 + 0.5 + 1.0 / 12.0, 1e-15);
  EXPECT_THROW(wlt::sample_size_factor({1.0}, {2, 4}), wlt::DimensionMismatch);
}

wlt::PowerScenario case_scenario(int case_id, std::size_t p, double r, double rho,
                                 wlt::WeightSpec weight) {
  const auto ns = wlt::group_sizes_for(80);
  const auto cov = wlt::build_case(case_id, p);
  const auto d = wlt::make_mean_design(p, r, rho, ns);
  wlt::PowerScenario sc;
  sc.pop.mus.assign(d.mus.begin(), d.mus.end());
  sc.pop.sigmas.assign(cov.sigmas.begin(), cov.sigmas.end());
  sc.betas.assign(wlt::kSimulationBetas.begin(), wlt::kSimulationBetas.end());
  sc.ns.assign(ns.begin(), ns.end());
  sc.weight = std::move(weight);
  return sc;
}

TEST(AsymptoticPower, NullGivesLevel) {
  for (int c : {1, 2}) {
    for (double level : {0.01, 0.05, 0.1}) {
      auto sc = case_scenario(c, 40, 0.0, 0.1, wlt::default_weight_spec(40));
      sc.level = level;
      EXPECT_NEAR(wlt::asymptotic_power(sc), level, 1e-12);
      EXPECT_NEAR(wlt::asymptotic_power_full_variance(sc), level, 1e-12);
    }
  }
}

TEST(AsymptoticPower, MonotoneInNoncentrality) {
  double prev = 0.0;
  for (double r : {0.0, 0.01, 0.02, 0.04, 0.08}) {
    const auto sc = case_scenario(2, 60, r, 0.2, wlt::default_weight_spec(60));
    const auto b = wlt::power_breakdown(sc);
    EXPECT_GE(b.power, prev);
    EXPECT_EQ(b.power, wlt::asymptotic_power(sc));
    prev = b.power;
  }
}

TEST(AsymptoticPower, GeneralAndEqualCovariancePathsAgree) {
  for (std::size_t p : {5, 40, 200}) {
    for (double r : {0.0, 0.04, 0.12}) {
      for (auto spec : {wlt::default_weight_spec(p), wlt::identity_weight_spec(p)}) {
        const auto sc = case_scenario(1, p, r, 0.1, spec);
        const double general = wlt::asymptotic_power(sc);
        const double special = wlt::equal_covariance_power(sc);
        EXPECT_LE(std::abs(general - special), 1e-10 * std::max(general, 1e-300));
        const auto b = wlt::power_breakdown(sc);
        EXPECT_LE(std::abs(b.noncentrality / b.sigma - wlt::equal_covariance_noncentrality(sc)),
                  1e-10 * std::max(1.0, b.noncentrality / b.sigma));
      }
    }
  }
}

TEST(AsymptoticPower, EqualCovariancePathRejectsUnequalCovariances) {
  const auto sc = case_scenario(2, 20, 0.04, 0.1, wlt::default_weight_spec(20));
  EXPECT_THROW(wlt::equal_covariance_power(sc), wlt::UnsupportedScenario);
}

wlt::PowerScenario weak_dense(std::size_t p, double delta, double nu, const MatrixXd& sigma) {
  wlt::PowerScenario sc;
  sc.betas.assign(wlt::kSimulationBetas.begin(), wlt::kSimulationBetas.end());
  sc.ns = {40, 80, 120};
  sc.weight = wlt::default_weight_spec(p);
  sc.weak_dense = wlt::WeakDenseSignal{delta, nu};
  sc.pop = wlt::weak_dense_population(p, *sc.weak_dense, sigma, sc.betas);
  return sc;
}

TEST(WeakDense, PopulationCombinesToSignal) {
  const auto sc = weak_dense(100, 0.5, 0.3, MatrixXd::Identity(100, 100));
  const VectorXd mu = wlt::combined_mean(sc.pop, sc.betas);
  for (Eigen::Index k = 0; k < 100; ++k) EXPECT_NEAR(mu(k), k < 10 ? 0.3 : 0.0, 1e-15);
}

TEST(LowerBound, ZeroSignalGivesLevel) {
  const auto sc = weak_dense(50, 0.75, 0.0, MatrixXd::Identity(50, 50));
  EXPECT_EQ(wlt::lower_bound_noncentrality(sc), 0.0);
  EXPECT_NEAR(wlt::power_lower_bound(sc), 0.05, 1e-12);
}

TEST(LowerBound, IncreasesToOneInNu) {
  double prev = 0.0, prev_nc = 0.0;
  for (double nu : {0.01, 0.1, 0.3, 1.0, 3.0}) {
    const auto sc = weak_dense(60, 1.0, nu, MatrixXd::Identity(60, 60));
    const double nc = wlt::lower_bound_noncentrality(sc);
    const double v = wlt::power_lower_bound(sc);
    EXPECT_GT(nc, prev_nc);
    EXPECT_GE(v, prev);
    prev = v;
    prev_nc = nc;
  }
  EXPECT_GT(prev, 0.999999);
}

TEST(LowerBound, CorollaryRateAtP400) {
  const std::vector<double> betas{2.0, -2.0, -1.0};
  const double nu = wlt::corollary_rate_nu(betas, {40, 80, 120});
  EXPECT_NEAR(nu * nu, std::sqrt(wlt::sample_size_factor(betas, {40, 80, 120})), 1e-15);
  auto sc = weak_dense(400, 0.75, nu, MatrixXd::Identity(400, 400));
  sc.lambda_max = 1.0;
  EXPECT_GE(wlt::power_lower_bound(sc), 0.99);
}

TEST(LowerBound, NeverExceedsEqualCovarianceNoncentrality) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.05, 1.5);
  for (std::size_t p : {3, 17, 64, 150}) {
    for (int c : {0, 1}) {
      const MatrixXd sigma = c == 0 ? MatrixXd(MatrixXd::Identity(p, p)) : wlt::build_case(1, p).sigmas[0];
      for (double delta : {0.3, 0.75, 1.0}) {
        const auto sc = weak_dense(p, delta, u(rng), sigma);
        EXPECT_LE(wlt::lower_bound_noncentrality(sc),
                  wlt::equal_covariance_noncentrality(sc) + 1e-9);
        EXPECT_LE(wlt::power_lower_bound(sc), wlt::equal_covariance_power(sc) + 1e-12);
      }
    }
  }
}

TEST(LowerBound, Preconditions) {
  auto sc = weak_dense(10, 0.75, 0.5, MatrixXd::Identity(10, 10));
  auto unequal = sc;
  unequal.pop.sigmas[1] *= 2.0;
  EXPECT_THROW(wlt::lower_bound_noncentrality(unequal), wlt::UnsupportedScenario);
  auto no_signal = sc;
  no_signal.weak_dense.reset();
  EXPECT_THROW(wlt::lower_bound_noncentrality(no_signal), wlt::UnsupportedScenario);
  auto bad_alpha = sc;
  bad_alpha.weight.alpha[3] += 1.0;
  EXPECT_THROW(wlt::lower_bound_noncentrality(bad_alpha), wlt::UnsupportedScenario);
  auto bad_delta = sc;
  bad_delta.weak_dense->delta = 1.5;
  EXPECT_THROW(wlt::lower_bound_noncentrality(bad_delta), wlt::InvalidArgument);
}

TEST(AssumptionDiagnostics, IdentityTwoGroups) {
  for (Eigen::Index p : {4, 25}) {
    wlt::PopulationSpec pop{{VectorXd::Zero(p), VectorXd::Zero(p)},
                            {MatrixXd::Identity(p, p), MatrixXd::Identity(p, p)}};
    wlt::WeightMatrix w(wlt::identity_weight_spec(p));
    const auto r = wlt::assumption_diagnostics(pop, {1.0, -1.0}, {10, 10}, w);
    // numerator tr(I) = p, denominator (tr((2I)^2))^2 = (4p)^2.
    EXPECT_NEAR(r.fourth_moment_ratio, 1.0 / (16.0 * double(p)), 1e-15);
    EXPECT_EQ(r.local_alternative_ratio, 0.0);
  }
}

TEST(AssumptionDiagnostics, CaseTwoAtP100IsSmall) {
  const auto cov = wlt::build_case(2, 100);
  wlt::PopulationSpec pop{{VectorXd::Zero(100), VectorXd::Zero(100), VectorXd::Zero(100)},
                          {cov.sigmas[0], cov.sigmas[1], cov.sigmas[2]}};
  wlt::WeightMatrix w(wlt::default_weight_spec(100));
  const auto r = wlt::assumption_diagnostics(pop, {2.0, -2.0, -1.0}, {40, 80, 120}, w);
  EXPECT_LE(r.fourth_moment_ratio, 0.01);
  EXPECT_GT(r.fourth_moment_ratio, 0.0);
  EXPECT_EQ(r.local_alternative_ratio, 0.0);
}

} // namespace
