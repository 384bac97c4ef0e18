#pragma once

// Ratio-consistent plug-in estimators of tr((W Sigma_i)^2) and
// tr(W Sigma_a W Sigma_b), and the variance estimate sigma_hat^2 used to
// standardise T_n. All traces are evaluated through Gram identities on the
// centred observations, so no p x p product is ever formed.

#include <vector>

#include <Eigen/Dense>

#include "wlt/statistic.hpp"
#include "wlt/weights.hpp"

namespace wlt {

struct GroupSummary {
  Eigen::VectorXd mean;
  Eigen::MatrixXd centered;  // n x p, rows x_j - mean
  Eigen::Index n = 0;
};

GroupSummary summarize(const Eigen::Ref<const Eigen::MatrixXd>& x);

/// Three-term estimator of tr((W Sigma)^2). Requires n >= 4. The value can be
/// negative in small samples.
double estimate_tr_wsigma_sq(const GroupSummary& g, const WeightMatrix& w);

/// tr(W S_1 W S_2). Requires n >= 2 in both groups; symmetric in its arguments.
double estimate_tr_cross(const GroupSummary& g1, const GroupSummary& g2, const WeightMatrix& w);

/// Scalar form of the tr((W Sigma)^2) estimator given the Gram quantities of
/// G = D W D^T: sum_j G_jj^2, trace(G) and sum_jk G_jk^2.
double tr_wsigma_sq_from_gram(Eigen::Index n, double diag_sq_sum, double trace, double frob_sq);

struct TraceEstimates {
  std::vector<double> tr_sq;  // per group estimate of tr((W Sigma_i)^2)
  Eigen::MatrixXd cross;      // (a, b), a != b: estimate of tr(W Sigma_a W Sigma_b)
  double sigma_hat_sq = 0.0;  // raw value, may be <= 0
};

/// All trace estimates of a sample set in one pass of the Gram kernel.
TraceEstimates estimate_traces(const SampleSet& s, const WeightMatrix& w, int threads = 0);

/// sigma_hat^2 = 2 sum_{a!=b} b_a^2 b_b^2/(n_a n_b) tr^(cross)
///             + 2 sum_i b_i^4/(n_i(n_i-1)) tr^((W Sigma_i)^2).
/// Throws InsufficientSamples if some n_i <= 3 and DegenerateVariance when
/// the estimate is not strictly positive.
double sigma_hat_sq(const SampleSet& s, const WeightMatrix& w, int threads = 0);

} // namespace wlt
