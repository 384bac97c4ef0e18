#pragma once

// Monte-Carlo runner for empirical size and power of the weighted test (TL)
// and its unweighted special case (TU).

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wlt/datagen.hpp"
#include "wlt/inference.hpp"
#include "wlt/weights.hpp"

namespace wlt {

enum class Method { TL, TU };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view name);
/// TL: default tuning weights; TU: identity weights.
WeightSpec method_weights(Method m, std::size_t p);

enum class Hypothesis { null, alternative };

struct ExperimentConfig {
  std::vector<std::size_t> p_list;
  std::vector<int> nstar_list;
  std::vector<Distribution> dists;
  int case_id = 1;
  Hypothesis mode = Hypothesis::null;
  std::vector<double> r_list;
  std::vector<double> rho_list;
  int reps = 1000;
  double level = 0.05;
  std::uint64_t seed = 20240101;
  std::vector<Method> methods{Method::TL, Method::TU};
  std::string out;
};

/// Throws InvalidArgument when the config cannot be run.
void validate(const ExperimentConfig& cfg);

/// One simulation cell; r and rho are empty under the null.
struct CellSpec {
  std::size_t p = 200;
  int n_star = 80;
  Distribution dist = Distribution::normal;
  int case_id = 1;
  std::optional<double> r;
  std::optional<double> rho;

  /// Stable textual key; its hash selects the cell's random streams.
  std::string key() const;
  bool operator==(const CellSpec&) const = default;
};

/// Cells of a config in lexicographic key order (p, n*, dist, r, rho).
std::vector<CellSpec> enumerate_cells(const ExperimentConfig& cfg);

struct MethodTally {
  Method method = Method::TL;
  int rejects = 0;
  int failures = 0;
  int reps = 0;
  /// rejects / (reps - failures); NaN when every replication failed.
  double rate() const noexcept;
};

struct CellResult {
  CellSpec cell;
  std::vector<MethodTally> tallies;  // one per requested method, request order
};

struct RunOptions {
  int threads = 0;  // <= 0: OpenMP default
  /// Called once per finished cell, from whichever thread finished it, under a lock.
  std::function<void(const CellResult&)> on_cell_done;
};

/// Runs `reps` replications of one cell and tallies each method. Never throws
/// for degenerate replications; they are counted as failures.
CellResult run_cell_tallies(const CellSpec& cell, const std::vector<Method>& methods, int reps,
                            double level, std::uint64_t seed, const RunOptions& opts = {});

/// As run_cell_tallies, but throws AllReplicationsFailed when some method
/// failed on every replication.
CellResult run_cell(const CellSpec& cell, const std::vector<Method>& methods, int reps,
                    double level, std::uint64_t seed, const RunOptions& opts = {});

/// Per-replication results of one method (empty optional: degenerate variance).
/// Uses the same streams as run_cell, so tallies agree.
std::vector<std::optional<TestResult>> replicate(const CellSpec& cell, Method method, int reps,
                                                 double level, std::uint64_t seed,
                                                 const RunOptions& opts = {});

/// The data set of one replication of a cell, exactly as the harness sees it.
SampleSet replication_data(const CellSpec& cell, std::uint64_t seed, std::uint64_t rep);

struct TableRow {
  std::size_t p = 0;
  int n_star = 0;
  Distribution dist = Distribution::normal;
  int case_id = 1;
  std::optional<double> r;
  std::optional<double> rho;
  Method method = Method::TL;
  int rejects = 0;
  int reps = 0;
  int failures = 0;

  double rate() const noexcept;
  bool operator==(const TableRow&) const = default;
};

struct ExperimentTable {
  std::vector<TableRow> rows;
  bool operator==(const ExperimentTable&) const = default;
};

/// Runs every (cell x replication) task in one parallel loop; rows come out in
/// key order whatever the schedule.
ExperimentTable run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

inline constexpr std::string_view kTableHeader = "p,n_star,dist,case,r,rho,method,rate,reps,failures";

std::string format_table(const ExperimentTable& t);
/// Writes format_table(t); throws IoError naming the path.
void emit_table(const ExperimentTable& t, const std::filesystem::path& path);

/// Inverse of format_table. Reject counts are recovered from the 4-decimal
/// rate, which is exact while reps - failures < 10000.
ExperimentTable parse_table(std::string_view csv);
ExperimentTable read_table(const std::filesystem::path& path);

} // namespace wlt
