#include "wlt/simharness.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "wlt/errors.hpp"
#include "wlt/normal.hpp"

namespace wlt {

std::string_view to_string(Method m) noexcept {
  return m == Method::TL ? "TL" : "TU";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "TL") return Method::TL;
  if (name == "TU") return Method::TU;
  return std::nullopt;
}

WeightSpec method_weights(Method m, std::size_t p) {
  return m == Method::TL ? default_weight_spec(p) : identity_weight_spec(p);
}

namespace {

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string optional_number(const std::optional<double>& v) {
  return v ? shortest(*v) : std::string();
}

} // namespace

std::string CellSpec::key() const {
  std::string k = "p=" + std::to_string(p) + "|nstar=" + std::to_string(n_star) + "|dist=" +
                  std::string(to_string(dist)) + "|case=" + std::to_string(case_id) +
                  "|r=" + optional_number(r) + "|rho=" + optional_number(rho);
  return k;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.reps < 1) throw InvalidArgument("reps must be >= 1");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw InvalidArgument("level must lie in (0, 1)");
  if (cfg.case_id != 1 && cfg.case_id != 2) throw InvalidArgument("case must be 1 or 2");
  for (auto p : cfg.p_list) {
    if (p < 1) throw InvalidArgument("every p must be >= 1");
  }
  for (int n : cfg.nstar_list) group_sizes_for(n);
  if (cfg.mode == Hypothesis::alternative) {
    if (cfg.r_list.empty() || cfg.rho_list.empty()) {
      throw InvalidArgument("alternative mode needs non-empty r_list and rho_list");
    }
    for (double r : cfg.r_list) {
      if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("r values must be finite and >= 0");
    }
    for (double rho : cfg.rho_list) {
      if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidArgument("rho values must lie in [0, 1]");
    }
  }
}

namespace {

bool cell_less(const CellSpec& a, const CellSpec& b) {
  auto tie = [](const CellSpec& c) {
    return std::make_tuple(c.p, c.n_star, to_string(c.dist), c.case_id, c.r.has_value(),
                           c.r.value_or(0.0), c.rho.has_value(), c.rho.value_or(0.0));
  };
  return tie(a) < tie(b);
}

} // namespace

std::vector<CellSpec> enumerate_cells(const ExperimentConfig& cfg) {
  std::vector<CellSpec> cells;
  for (auto p : cfg.p_list) {
    for (int n : cfg.nstar_list) {
      for (auto d : cfg.dists) {
        if (cfg.mode == Hypothesis::null) {
          cells.push_back(CellSpec{p, n, d, cfg.case_id, std::nullopt, std::nullopt});
        } else {
          for (double r : cfg.r_list) {
            for (double rho : cfg.rho_list) {
              cells.push_back(CellSpec{p, n, d, cfg.case_id, r, rho});
            }
          }
        }
      }
    }
  }
  std::sort(cells.begin(), cells.end(), cell_less);
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

double MethodTally::rate() const noexcept {
  const int valid = reps - failures;
  return valid > 0 ? static_cast<double>(rejects) / valid
                   : std::numeric_limits<double>::quiet_NaN();
}

double TableRow::rate() const noexcept {
  const int valid = reps - failures;
  return valid > 0 ? static_cast<double>(rejects) / valid
                   : std::numeric_limits<double>::quiet_NaN();
}

namespace {

struct PreparedCell {
  CellSpec cell;
  Scenario scenario;
  std::uint64_t key_hash = 0;
};

using CovCache = std::map<std::pair<int, std::size_t>, std::shared_ptr<const CovarianceCase>>;

PreparedCell prepare(const CellSpec& cell, CovCache& cache) {
  if (cell.r.has_value() != cell.rho.has_value()) {
    throw InvalidArgument("cell must set both r and rho or neither");
  }
  PreparedCell pc;
  pc.cell = cell;
  auto& cov = cache[{cell.case_id, cell.p}];
  if (!cov) cov = std::make_shared<const CovarianceCase>(build_case(cell.case_id, cell.p));
  pc.scenario.cov = cov;
  pc.scenario.dist = DistributionSpec{cell.dist};
  pc.scenario.ns = group_sizes_for(cell.n_star);
  if (cell.r) {
    pc.scenario.mean = make_mean_design(cell.p, *cell.r, *cell.rho, pc.scenario.ns);
  }
  pc.key_hash = fnv1a64(cell.key());
  return pc;
}

// Outcome codes stored per (cell, replication, method).
enum : std::uint8_t { kAccept = 0, kReject = 1, kFailed = 2 };

// Runs every (cell, replication) pair in one dynamic parallel loop. `sink` is
// called with distinct (cell, rep, method) triples, possibly concurrently.
template <typename Sink, typename CellDone>
void run_tasks(const std::vector<PreparedCell>& cells, const std::vector<Method>& methods,
               int reps, double level, std::uint64_t seed, int threads, Sink&& sink,
               CellDone&& cell_done) {
  // One weight matrix per (dimension, method).
  std::map<std::size_t, std::vector<WeightMatrix>> weights;
  for (const auto& c : cells) {
    if (weights.count(c.cell.p)) continue;
    std::vector<WeightMatrix> ws;
    for (auto m : methods) ws.emplace_back(method_weights(m, c.cell.p));
    weights.emplace(c.cell.p, std::move(ws));
  }
  std::vector<const std::vector<WeightMatrix>*> cell_weights;
  for (const auto& c : cells) cell_weights.push_back(&weights.at(c.cell.p));

  const long long total = static_cast<long long>(cells.size()) * reps;
  std::vector<std::atomic<int>> done(cells.size());
  for (auto& d : done) d.store(0);
  std::exception_ptr error;
  std::atomic<bool> failed{false};

  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
  for (long long task = 0; task < total; ++task) {
    if (failed.load(std::memory_order_relaxed)) continue;
    const auto c = static_cast<std::size_t>(task / reps);
    const auto rep = static_cast<std::uint64_t>(task % reps);
    try {
      Engine rng = make_stream(seed, cells[c].key_hash, rep);
      const SampleSet data = gen_sampleset(cells[c].scenario, rng);
      for (std::size_t m = 0; m < methods.size(); ++m) {
        std::optional<TestResult> res;
        try {
          res = run_test(data, (*cell_weights[c])[m], level, 1);
        } catch (const DegenerateVariance&) {
        }
        sink(c, rep, m, res);
      }
    } catch (...) {
#pragma omp critical(wlt_harness_error)
      {
        if (!error) error = std::current_exception();
      }
      failed.store(true);
      continue;
    }
    if (done[c].fetch_add(1, std::memory_order_acq_rel) + 1 == reps) {
#pragma omp critical(wlt_harness_progress)
      cell_done(c);
    }
  }
  if (error) std::rethrow_exception(error);
}

std::vector<PreparedCell> prepare_all(const std::vector<CellSpec>& specs) {
  CovCache cache;
  std::vector<PreparedCell> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(prepare(s, cache));
  return out;
}

CellResult tally(const CellSpec& cell, const std::vector<Method>& methods, int reps,
                 const std::vector<std::uint8_t>& outcomes, std::size_t c) {
  CellResult res;
  res.cell = cell;
  const std::size_t nm = methods.size();
  for (std::size_t m = 0; m < nm; ++m) {
    MethodTally t;
    t.method = methods[m];
    t.reps = reps;
    for (int rep = 0; rep < reps; ++rep) {
      const auto o = outcomes[(c * static_cast<std::size_t>(reps) + static_cast<std::size_t>(rep)) * nm + m];
      if (o == kReject) ++t.rejects;
      if (o == kFailed) ++t.failures;
    }
    res.tallies.push_back(t);
  }
  return res;
}

std::vector<CellResult> run_cells(const std::vector<CellSpec>& specs,
                                  const std::vector<Method>& methods, int reps, double level,
                                  std::uint64_t seed, const RunOptions& opts) {
  if (reps < 1) throw InvalidArgument("reps must be >= 1");
  z_quantile(level);  // validates the level
  const auto cells = prepare_all(specs);
  const std::size_t nm = methods.size();
  std::vector<std::uint8_t> outcomes(cells.size() * static_cast<std::size_t>(reps) * nm, kFailed);
  auto sink = [&](std::size_t c, std::uint64_t rep, std::size_t m,
                  const std::optional<TestResult>& r) {
    outcomes[(c * static_cast<std::size_t>(reps) + rep) * nm + m] =
        r ? (r->reject ? kReject : kAccept) : kFailed;
  };
  auto cell_done = [&](std::size_t c) {
    if (opts.on_cell_done) opts.on_cell_done(tally(cells[c].cell, methods, reps, outcomes, c));
  };
  if (nm > 0) {
    run_tasks(cells, methods, reps, level, seed, opts.threads, sink, cell_done);
  }
  std::vector<CellResult> out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    out.push_back(tally(cells[c].cell, methods, reps, outcomes, c));
  }
  return out;
}

} // namespace

CellResult run_cell_tallies(const CellSpec& cell, const std::vector<Method>& methods, int reps,
                            double level, std::uint64_t seed, const RunOptions& opts) {
  return run_cells({cell}, methods, reps, level, seed, opts).front();
}

CellResult run_cell(const CellSpec& cell, const std::vector<Method>& methods, int reps,
                    double level, std::uint64_t seed, const RunOptions& opts) {
  CellResult res = run_cell_tallies(cell, methods, reps, level, seed, opts);
  for (const auto& t : res.tallies) {
    if (t.failures == t.reps) {
      throw AllReplicationsFailed("every replication of cell " + cell.key() + " failed for " +
                                  std::string(to_string(t.method)));
    }
  }
  return res;
}

std::vector<std::optional<TestResult>> replicate(const CellSpec& cell, Method method, int reps,
                                                 double level, std::uint64_t seed,
                                                 const RunOptions& opts) {
  if (reps < 1) throw InvalidArgument("reps must be >= 1");
  const auto cells = prepare_all({cell});
  std::vector<std::optional<TestResult>> out(static_cast<std::size_t>(reps));
  run_tasks(
      cells, {method}, reps, level, seed, opts.threads,
      [&](std::size_t, std::uint64_t rep, std::size_t, const std::optional<TestResult>& r) {
        out[rep] = r;
      },
      [](std::size_t) {});
  return out;
}

SampleSet replication_data(const CellSpec& cell, std::uint64_t seed, std::uint64_t rep) {
  CovCache cache;
  const PreparedCell pc = prepare(cell, cache);
  Engine rng = make_stream(seed, pc.key_hash, rep);
  return gen_sampleset(pc.scenario, rng);
}

ExperimentTable run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate(cfg);
  ExperimentTable table;
  if (cfg.methods.empty()) return table;
  const auto cells = enumerate_cells(cfg);
  const auto results = run_cells(cells, cfg.methods, cfg.reps, cfg.level, cfg.seed, opts);
  for (const auto& res : results) {
    for (const auto& t : res.tallies) {
      TableRow row;
      row.p = res.cell.p;
      row.n_star = res.cell.n_star;
      row.dist = res.cell.dist;
      row.case_id = res.cell.case_id;
      row.r = res.cell.r;
      row.rho = res.cell.rho;
      row.method = t.method;
      row.rejects = t.rejects;
      row.reps = t.reps;
      row.failures = t.failures;
      table.rows.push_back(row);
    }
  }
  std::stable_sort(table.rows.begin(), table.rows.end(), [](const TableRow& a, const TableRow& b) {
    const CellSpec ca{a.p, a.n_star, a.dist, a.case_id, a.r, a.rho};
    const CellSpec cb{b.p, b.n_star, b.dist, b.case_id, b.r, b.rho};
    if (cell_less(ca, cb)) return true;
    if (cell_less(cb, ca)) return false;
    return to_string(a.method) < to_string(b.method);
  });
  return table;
}

std::string format_table(const ExperimentTable& t) {
  std::string out(kTableHeader);
  out += '\n';
  char rate[32];
  for (const auto& r : t.rows) {
    const double v = r.rate();
    if (std::isnan(v)) {
      std::snprintf(rate, sizeof rate, "NA");
    } else {
      std::snprintf(rate, sizeof rate, "%.4f", v);
    }
    out += std::to_string(r.p) + ',' + std::to_string(r.n_star) + ',' +
           std::string(to_string(r.dist)) + ',' + std::to_string(r.case_id) + ',' +
           optional_number(r.r) + ',' + optional_number(r.rho) + ',' +
           std::string(to_string(r.method)) + ',' + rate + ',' + std::to_string(r.reps) + ',' +
           std::to_string(r.failures) + '\n';
  }
  return out;
}

void emit_table(const ExperimentTable& t, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << format_table(t);
  os.flush();
  if (!os) throw IoError("failed writing " + path.string());
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, int line) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("table line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

} // namespace

ExperimentTable parse_table(std::string_view csv) {
  ExperimentTable t;
  std::size_t pos = 0;
  int line_no = 0;
  bool header_seen = false;
  while (pos < csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kTableHeader) throw DataError("table line 1: unexpected header");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 10) {
      throw DataError("table line " + std::to_string(line_no) + ": expected 10 fields");
    }
    TableRow row;
    row.p = parse_number<std::size_t>(f[0], line_no);
    row.n_star = parse_number<int>(f[1], line_no);
    const auto dist = parse_distribution(f[2]);
    if (!dist) throw DataError("table line " + std::to_string(line_no) + ": unknown distribution");
    row.dist = *dist;
    row.case_id = parse_number<int>(f[3], line_no);
    if (!f[4].empty()) row.r = parse_number<double>(f[4], line_no);
    if (!f[5].empty()) row.rho = parse_number<double>(f[5], line_no);
    const auto method = parse_method(f[6]);
    if (!method) throw DataError("table line " + std::to_string(line_no) + ": unknown method");
    row.method = *method;
    row.reps = parse_number<int>(f[8], line_no);
    row.failures = parse_number<int>(f[9], line_no);
    if (f[7] != "NA") {
      const double rate = parse_number<double>(f[7], line_no);
      row.rejects = static_cast<int>(std::lround(rate * (row.reps - row.failures)));
    }
    t.rows.push_back(row);
  }
  if (!header_seen) throw DataError("table is empty: missing header");
  return t;
}

ExperimentTable read_table(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_table(ss.str());
}

} // namespace wlt
