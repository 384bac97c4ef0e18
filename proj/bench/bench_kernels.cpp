// Structured kernels against the dense / naive reference implementations, and
// the blocked Gram kernel at different thread counts.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "reference.hpp"
#include "wlt/estimation.hpp"
#include "wlt/gram.hpp"
#include "wlt/statistic.hpp"
#include "wlt/weights.hpp"

namespace {

std::vector<Eigen::MatrixXd> make_groups(Eigen::Index p, Eigen::Index n_star) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n01;
  std::vector<Eigen::MatrixXd> groups;
  for (Eigen::Index n : {n_star / 2, n_star, 3 * n_star / 2}) {
    Eigen::MatrixXd x(n, p);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n01(rng);
    groups.push_back(std::move(x));
  }
  return groups;
}

const std::vector<double> kBetas{2.0, -2.0, -1.0};

void BM_TnStructured(benchmark::State& state) {
  const auto p = state.range(0);
  const auto groups = make_groups(p, 80);
  const wlt::WeightMatrix w(wlt::default_weight_spec(p));
  const wlt::SampleSet s(groups, kBetas);
  for (auto _ : state) benchmark::DoNotOptimize(wlt::compute_tn(s, w));
}

void BM_TnNaive(benchmark::State& state) {
  const auto p = state.range(0);
  const auto groups = make_groups(p, 80);
  const Eigen::MatrixXd dense = wlt::dense_weight(wlt::WeightMatrix(wlt::default_weight_spec(p)));
  for (auto _ : state) benchmark::DoNotOptimize(wlt::ref::naive_tn(groups, kBetas, dense));
}

struct Stacked {
  Eigen::MatrixXd rows;
  std::vector<Eigen::Index> offsets{0};
};

Stacked stack(Eigen::Index p) {
  const auto groups = make_groups(p, 80);
  const wlt::WeightMatrix w(wlt::default_weight_spec(p));
  Stacked s;
  for (const auto& g : groups) s.offsets.push_back(s.offsets.back() + g.rows());
  s.rows.resize(s.offsets.back(), p + 1);
  for (std::size_t i = 0; i < groups.size(); ++i)
    s.rows.middleRows(s.offsets[i], groups[i].rows()) = w.factor_rows(groups[i]);
  return s;
}

void BM_GramBlocked(benchmark::State& state) {
  const auto s = stack(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(wlt::weighted_gram_moments(s.rows, s.offsets, threads));
}

void BM_GramNaive(benchmark::State& state) {
  const auto s = stack(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wlt::ref::naive_gram_moments(s.rows, s.offsets));
}

void BM_SigmaHat(benchmark::State& state) {
  const auto p = state.range(0);
  const wlt::SampleSet s(make_groups(p, 80), kBetas);
  const wlt::WeightMatrix w(wlt::default_weight_spec(p));
  for (auto _ : state) benchmark::DoNotOptimize(wlt::sigma_hat_sq(s, w));
}

} // namespace

BENCHMARK(BM_TnStructured)->Arg(50)->Arg(200)->Arg(600);
BENCHMARK(BM_TnNaive)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GramBlocked)->Args({200, 1})->Args({600, 1})->Args({600, 4});
BENCHMARK(BM_GramNaive)->Arg(200)->Arg(600);
BENCHMARK(BM_SigmaHat)->Arg(200)->Arg(600);

BENCHMARK_MAIN();
