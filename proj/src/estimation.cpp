#include "wlt/estimation.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "wlt/errors.hpp"
#include "wlt/gram.hpp"

namespace wlt {

namespace {

void require_at_least(Eigen::Index n, Eigen::Index min, const char* who) {
  if (n < min) {
    throw InsufficientSamples(std::string(who) + ": group has " + std::to_string(n) +
                              " observations, at least " + std::to_string(min) + " required");
  }
}

// Total order on summaries so that the cross estimate is evaluated in one
// fixed orientation whichever way round the caller passes the groups.
bool ordered_before(const GroupSummary& a, const GroupSummary& b) {
  if (a.n != b.n) return a.n < b.n;
  if (a.centered.cols() != b.centered.cols()) return a.centered.cols() < b.centered.cols();
  const auto bytes = static_cast<std::size_t>(a.centered.size()) * sizeof(double);
  const int c = std::memcmp(a.centered.data(), b.centered.data(), bytes);
  return c < 0;
}

} // namespace

GroupSummary summarize(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  GroupSummary g;
  g.n = x.rows();
  if (g.n < 1) {
    throw InsufficientSamples("summarize: empty group");
  }
  g.mean = x.colwise().mean().transpose();
  g.centered = x.rowwise() - g.mean.transpose();
  return g;
}

double tr_wsigma_sq_from_gram(Eigen::Index n, double diag_sq_sum, double trace, double frob_sq) {
  const double nd = static_cast<double>(n);
  const double tr_ws = trace / (nd - 1.0);
  const double tr_ws_sq = frob_sq / ((nd - 1.0) * (nd - 1.0));
  return -diag_sq_sum / ((nd - 1.0) * (nd - 2.0)) +
         (nd - 1.0) * (nd - 1.0) / (nd * (nd - 3.0)) * tr_ws_sq +
         (nd - 1.0) / (nd * (nd - 2.0) * (nd - 3.0)) * tr_ws * tr_ws;
}

double estimate_tr_wsigma_sq(const GroupSummary& g, const WeightMatrix& w) {
  require_at_least(g.n, 4, "estimate_tr_wsigma_sq");
  const Eigen::MatrixXd f = w.factor_rows(g.centered);
  const Eigen::MatrixXd gram = f * f.transpose();
  const Eigen::VectorXd d = gram.diagonal();
  return tr_wsigma_sq_from_gram(g.n, d.squaredNorm(), d.sum(), gram.squaredNorm());
}

double estimate_tr_cross(const GroupSummary& g1, const GroupSummary& g2, const WeightMatrix& w) {
  require_at_least(g1.n, 2, "estimate_tr_cross");
  require_at_least(g2.n, 2, "estimate_tr_cross");
  if (g1.centered.cols() != g2.centered.cols()) {
    throw DimensionMismatch("estimate_tr_cross: groups differ in dimension");
  }
  const bool swap = ordered_before(g2, g1);
  const GroupSummary& a = swap ? g2 : g1;
  const GroupSummary& b = swap ? g1 : g2;
  const Eigen::MatrixXd gram = w.factor_rows(a.centered) * w.factor_rows(b.centered).transpose();
  return gram.squaredNorm() / (static_cast<double>(a.n - 1) * static_cast<double>(b.n - 1));
}

TraceEstimates estimate_traces(const SampleSet& s, const WeightMatrix& w, int threads) {
  const std::size_t q = s.num_groups();
  if (s.dim() != w.dim()) {
    throw DimensionMismatch("estimate_traces: data dimension does not match weight dimension");
  }
  std::vector<Eigen::Index> offsets(q + 1, 0);
  for (std::size_t i = 0; i < q; ++i) {
    require_at_least(s.size(i), 4, "sigma_hat_sq");
    offsets[i + 1] = offsets[i] + s.size(i);
  }
  const auto p = static_cast<Eigen::Index>(w.dim());
  Eigen::MatrixXd stacked(offsets[q], p + 1);
  for (std::size_t i = 0; i < q; ++i) {
    const Eigen::MatrixXd& x = s.group(i);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    stacked.middleRows(offsets[i], s.size(i)) = w.factor_rows(x.rowwise() - mean);
  }
  const GramMoments m = weighted_gram_moments(stacked, offsets, threads);

  TraceEstimates out;
  out.tr_sq.resize(q);
  out.cross = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
  const auto& betas = s.betas();
  double total = 0.0;
  for (std::size_t a = 0; a < q; ++a) {
    const auto ai = static_cast<Eigen::Index>(a);
    const Eigen::Index na = s.size(a);
    const auto diag = m.diag.segment(offsets[a], na);
    out.tr_sq[a] = tr_wsigma_sq_from_gram(na, diag.squaredNorm(), diag.sum(), m.block_sq(ai, ai));
    const double ba2 = betas[a] * betas[a];
    for (std::size_t b = 0; b < q; ++b) {
      if (a == b) continue;
      const auto bi = static_cast<Eigen::Index>(b);
      const Eigen::Index nb = s.size(b);
      out.cross(ai, bi) =
          m.block_sq(ai, bi) / (static_cast<double>(na - 1) * static_cast<double>(nb - 1));
      total += 2.0 * ba2 * betas[b] * betas[b] /
               (static_cast<double>(na) * static_cast<double>(nb)) * out.cross(ai, bi);
    }
    const double nd = static_cast<double>(na);
    total += 2.0 * ba2 * ba2 / (nd * (nd - 1.0)) * out.tr_sq[a];
  }
  out.sigma_hat_sq = total;
  return out;
}

double sigma_hat_sq(const SampleSet& s, const WeightMatrix& w, int threads) {
  const double v = estimate_traces(s, w, threads).sigma_hat_sq;
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DegenerateVariance(v);
  }
  return v;
}

} // namespace wlt
