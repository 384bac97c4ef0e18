#include "wlt/gram.hpp"

#include <omp.h>

#include <string>

#include "wlt/errors.hpp"

namespace wlt {

GramMoments weighted_gram_moments(const Eigen::Ref<const Eigen::MatrixXd>& stacked,
                                  std::span<const Eigen::Index> offsets, int threads) {
  if (offsets.size() < 2) {
    throw InvalidArgument("weighted_gram_moments: need at least one group");
  }
  const Eigen::Index n = stacked.rows();
  const auto q = static_cast<Eigen::Index>(offsets.size() - 1);
  if (offsets.front() != 0 || offsets.back() != n) {
    throw DimensionMismatch("weighted_gram_moments: offsets do not cover " + std::to_string(n) +
                            " rows");
  }
  std::vector<int> group_of(static_cast<std::size_t>(n));
  for (Eigen::Index g = 0; g < q; ++g) {
    if (offsets[g + 1] < offsets[g]) {
      throw InvalidArgument("weighted_gram_moments: offsets must be nondecreasing");
    }
    for (Eigen::Index r = offsets[g]; r < offsets[g + 1]; ++r) {
      group_of[static_cast<std::size_t>(r)] = static_cast<int>(g);
    }
  }

  const Eigen::Index tiles = (n + kGramTileRows - 1) / kGramTileRows;
  std::vector<Eigen::MatrixXd> partial(static_cast<std::size_t>(tiles),
                                       Eigen::MatrixXd::Zero(q, q));
  GramMoments out;
  out.diag.resize(n);

  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads) if (!omp_in_parallel() && tiles > 1)
  for (Eigen::Index t = 0; t < tiles; ++t) {
    const Eigen::Index r0 = t * kGramTileRows;
    const Eigen::Index len = std::min(kGramTileRows, n - r0);
    const Eigen::Index r1 = r0 + len;
    // Rows r0..r1 against every row up to r1: the lower triangle of this band.
    const Eigen::MatrixXd band = stacked.middleRows(r0, len) * stacked.topRows(r1).transpose();
    Eigen::MatrixXd& acc = partial[static_cast<std::size_t>(t)];
    for (Eigen::Index jj = 0; jj < len; ++jj) {
      const Eigen::Index j = r0 + jj;
      const int gj = group_of[static_cast<std::size_t>(j)];
      for (Eigen::Index k = 0; k < j; ++k) {
        const double v = band(jj, k);
        acc(gj, group_of[static_cast<std::size_t>(k)]) += 2.0 * v * v;
      }
      const double d = band(jj, j);
      acc(gj, gj) += d * d;
      out.diag(j) = d;
    }
  }

  Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(q, q);
  for (const auto& p : partial) {
    lower += p;
  }
  // Entries (a, b) with a > b collected both orientations; split them evenly.
  out.block_sq.resize(q, q);
  for (Eigen::Index a = 0; a < q; ++a) {
    out.block_sq(a, a) = lower(a, a);
    for (Eigen::Index b = 0; b < a; ++b) {
      const double total = lower(a, b) + lower(b, a);
      out.block_sq(a, b) = 0.5 * total;
      out.block_sq(b, a) = 0.5 * total;
    }
  }
  return out;
}

} // namespace wlt
