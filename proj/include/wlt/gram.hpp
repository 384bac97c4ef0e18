#pragma once

// Blocked kernel for the pairwise bilinear forms behind the trace estimators.
//
// Given the stacked factor rows Z of all groups (rows of group g occupy
// [offsets[g], offsets[g+1])), the Gram matrix G = Z Z^T holds every
// d_j^T W d_k. The kernel never stores G: it walks lower-triangular row tiles,
// accumulates per-block sums of squared entries, and keeps the diagonal.
//
// Tiles have a fixed height independent of the thread count and their partial
// sums are reduced in tile order, so results are bit-identical for any number
// of threads.

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wlt {

struct GramMoments {
  /// block_sq(a, b) = sum over j in group a, k in group b of G_jk^2 (symmetric).
  Eigen::MatrixXd block_sq;
  /// G_jj for every stacked row.
  Eigen::VectorXd diag;
};

inline constexpr Eigen::Index kGramTileRows = 64;

/// `threads` <= 0 uses the OpenMP default. Nested calls from inside a parallel
/// region run serially.
GramMoments weighted_gram_moments(const Eigen::Ref<const Eigen::MatrixXd>& stacked,
                                  std::span<const Eigen::Index> offsets, int threads = 0);

} // namespace wlt
