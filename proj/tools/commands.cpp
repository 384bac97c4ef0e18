#include "commands.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string_view>

#include <CLI11.hpp>

#include "wlt/config.hpp"
#include "wlt/data_file.hpp"
#include "wlt/datagen.hpp"
#include "wlt/errors.hpp"
#include "wlt/inference.hpp"
#include "wlt/simharness.hpp"
#include "wlt/statistic.hpp"
#include "wlt/weights.hpp"

namespace wlt::cli {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string human(double v) { return fmt("%.6g", v); }
std::string exact(double v) { return fmt("%.17g", v); }

std::vector<double> parse_betas(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find(',', start);
    if (pos == std::string_view::npos) pos = text.size();
    auto tok = text.substr(start, pos - start);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size() ||
        !std::isfinite(v)) {
      throw InvalidArgument("--betas: cannot parse '" + std::string(tok) + "'");
    }
    out.push_back(v);
    start = pos + 1;
  }
  return out;
}

WeightSpec weight_choice(const std::string& choice, std::size_t p) {
  if (choice == "default") return default_weight_spec(p);
  if (choice == "identity") return identity_weight_spec(p);
  auto spec = read_weight_file(choice);
  if (spec.dim() != p) {
    throw DataError("weight file " + choice + " has " + std::to_string(spec.dim()) +
                    " rows but the data have p = " + std::to_string(p));
  }
  return spec;
}

// Maps library errors onto exit codes; everything else is a usage error.
int report(const std::exception& e, std::ostream& err) {
  if (dynamic_cast<const DegenerateVariance*>(&e)) {
    err << "error: degenerate variance: " << e.what() << '\n';
    return kDegenerate;
  }
  if (dynamic_cast<const AllReplicationsFailed*>(&e)) {
    err << "error: " << e.what() << '\n';
    return kDegenerate;
  }
  if (dynamic_cast<const InsufficientSamples*>(&e)) {
    err << "error: insufficient samples: " << e.what() << '\n';
    return kData;
  }
  if (dynamic_cast<const ConfigError*>(&e)) {
    err << "error: config: " << e.what() << '\n';
    return kData;
  }
  if (dynamic_cast<const DataError*>(&e)) {
    err << "error: malformed data: " << e.what() << '\n';
    return kData;
  }
  if (dynamic_cast<const IoError*>(&e)) {
    err << "error: i/o: " << e.what() << '\n';
    return kIo;
  }
  err << "error: " << e.what() << '\n';
  return kUsage;
}

struct TestArgs {
  std::string data;
  std::string betas;
  std::string weights = "default";
  double level = 0.05;
  std::string group_column = "group";
  int threads = 0;
};

int cmd_test(const TestArgs& a, std::ostream& out) {
  auto data = read_data_file(a.data, a.group_column, 4);
  auto betas = parse_betas(a.betas);
  if (betas.size() != data.groups.size()) {
    throw InvalidArgument("--betas has " + std::to_string(betas.size()) +
                          " coefficients but the file has " + std::to_string(data.groups.size()) +
                          " groups");
  }
  const std::size_t p = data.feature_names.size();
  WeightMatrix w(weight_choice(a.weights, p));
  SampleSet s(data.groups, betas);
  const auto r = run_test(s, w, a.level, a.threads);

  out << "groups (first-appearance order):";
  for (std::size_t g = 0; g < data.labels.size(); ++g) {
    out << (g ? ", " : " ") << data.labels[g] << " (n=" << data.groups[g].rows()
        << ", beta=" << human(betas[g]) << ')';
  }
  out << "\ndimension p = " << p << ", weights = " << a.weights << '\n';
  out << "T_n       = " << human(r.tn) << '\n';
  out << "sigma_hat = " << human(r.sigma_hat) << '\n';
  out << "z         = " << human(r.z) << '\n';
  out << "p-value   = " << human(r.p_value) << '\n';
  out << "decision  = " << (r.reject ? "reject H0" : "do not reject H0") << " at level "
      << human(r.level) << '\n';
  out << "RESULT tn=" << exact(r.tn) << " sigma_hat=" << exact(r.sigma_hat) << " z=" << exact(r.z)
      << " p_value=" << exact(r.p_value) << " reject=" << (r.reject ? 1 : 0)
      << " level=" << exact(r.level) << '\n';
  return kOk;
}

struct SimulateArgs {
  std::string config;
  int threads = 0;
  std::string dump;
  std::size_t dump_cell = 0;
  std::uint64_t dump_rep = 0;
  bool dump_only = false;
  std::optional<std::uint64_t> seed;
};

void dump_replication(const ExperimentConfig& cfg, const SimulateArgs& a) {
  const auto cells = enumerate_cells(cfg);
  if (a.dump_cell >= cells.size()) {
    throw InvalidArgument("--dump-cell " + std::to_string(a.dump_cell) + " out of range (" +
                          std::to_string(cells.size()) + " cells)");
  }
  const auto s = replication_data(cells[a.dump_cell], cfg.seed, a.dump_rep);
  DataFile d;
  for (std::size_t g = 0; g < s.num_groups(); ++g) {
    d.labels.push_back("g" + std::to_string(g + 1));
    d.groups.push_back(s.group(g));
  }
  for (std::size_t k = 0; k < s.dim(); ++k) d.feature_names.push_back("x" + std::to_string(k + 1));
  write_data_file(a.dump, d);
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  auto cfg = load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (!a.dump.empty()) {
    dump_replication(cfg, a);
    err << "wrote replication " << a.dump_rep << " of cell " << a.dump_cell << " to " << a.dump
        << '\n';
    if (a.dump_only) return kOk;
  }
  const auto total = enumerate_cells(cfg).size();
  std::size_t done = 0;
  RunOptions opts;
  opts.threads = a.threads;
  opts.on_cell_done = [&](const CellResult& c) {
    ++done;
    err << '[' << done << '/' << total << "] " << c.cell.key();
    for (const auto& t : c.tallies) err << ' ' << to_string(t.method) << '=' << fmt("%.4f", t.rate());
    err << '\n';
  };
  const auto table = run_experiment(cfg, opts);
  emit_table(table, cfg.out);
  out << "wrote " << table.rows.size() << " rows to " << cfg.out << '\n';
  return kOk;
}

struct PowerArgs {
  std::size_t p = 200;
  int n_star = 80;
  int case_id = 1;
  double r = 0.0;
  double rho = 0.1;
  double level = 0.05;
  std::string weights = "default";
  std::optional<double> delta;
  std::optional<double> nu;
};

int cmd_power(const PowerArgs& a, std::ostream& out) {
  if (a.p > kMaxPowerDim) {
    throw InvalidArgument("p = " + std::to_string(a.p) + " exceeds the dense-covariance limit " +
                          std::to_string(kMaxPowerDim));
  }
  if (a.p < 1) throw InvalidArgument("p must be >= 1");
  if (!(a.r >= 0.0) || !std::isfinite(a.r)) throw InvalidArgument("--r must be finite and >= 0");
  const auto ns = group_sizes_for(a.n_star);
  const auto cov = build_case(a.case_id, a.p);
  const auto design = make_mean_design(a.p, a.r, a.rho, ns);

  PowerScenario sc;
  sc.pop.mus.assign(design.mus.begin(), design.mus.end());
  sc.pop.sigmas.assign(cov.sigmas.begin(), cov.sigmas.end());
  sc.betas.assign(kSimulationBetas.begin(), kSimulationBetas.end());
  sc.ns.assign(ns.begin(), ns.end());
  sc.weight = weight_choice(a.weights, a.p);
  sc.level = a.level;
  const auto b = power_breakdown(sc);

  out << "scenario: case=" << a.case_id << " p=" << a.p << " n=(" << ns[0] << ',' << ns[1] << ','
      << ns[2] << ") r=" << human(a.r) << " rho=" << human(a.rho) << " level=" << human(a.level)
      << " weights=" << a.weights << '\n';
  out << "noncentrality mu'W mu     = " << human(b.noncentrality) << '\n';
  out << "sigma_n,q (null part)     = " << human(b.sigma) << '\n';
  out << "sigma_n,q2 (signal part)  = " << human(std::sqrt(b.variance.sigma_q2_sq)) << '\n';
  out << "predicted power           = " << human(b.power) << '\n';
  out << "predicted power, full var = " << human(b.power_full_variance) << '\n';
  std::optional<double> eq_cov;
  if (a.case_id == 1) {
    eq_cov = equal_covariance_power(sc);
    out << "equal-covariance power    = " << human(*eq_cov)
        << " (|difference| = " << human(std::abs(*eq_cov - b.power)) << ")\n";
  }
  out << "POWER noncentrality=" << exact(b.noncentrality) << " sigma=" << exact(b.sigma)
      << " power=" << exact(b.power) << " power_full_variance=" << exact(b.power_full_variance);
  if (eq_cov) out << " equal_covariance_power=" << exact(*eq_cov);
  out << '\n';

  if (a.delta) {
    if (a.case_id != 1) {
      throw UnsupportedScenario("the lower bound needs equal covariances (case 1)");
    }
    WeakDenseSignal sig{*a.delta, a.nu.value_or(corollary_rate_nu(sc.betas, sc.ns))};
    PowerScenario wd = sc;
    wd.pop = weak_dense_population(a.p, sig, cov.sigmas[0], sc.betas);
    wd.weak_dense = sig;
    const double bound = power_lower_bound(wd);
    const double exact_power = equal_covariance_power(wd);
    out << "weak-dense signal: delta=" << human(sig.delta) << " nu=" << human(sig.nu) << '\n';
    out << "lower-bound noncentrality = " << human(lower_bound_noncentrality(wd)) << '\n';
    out << "power lower bound         = " << human(bound) << '\n';
    out << "weak-dense power          = " << human(exact_power) << '\n';
    out << "BOUND delta=" << exact(sig.delta) << " nu=" << exact(sig.nu)
        << " power_lower_bound=" << exact(bound) << " power=" << exact(exact_power) << '\n';
  }
  return kOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted L2-norm test for linear hypotheses of high-dimensional means", "wltest"};
  app.require_subcommand(1);

  TestArgs ta;
  auto* test = app.add_subcommand("test", "run the test on a CSV data file");
  test->add_option("--data", ta.data, "CSV with a header and a group column")->required();
  test->add_option("--betas", ta.betas, "coefficients, comma separated, in group order")
      ->required()
      ->allow_extra_args(false);
  test->add_option("--weights", ta.weights, "default | identity | <alpha,omega_sq CSV>");
  test->add_option("--level", ta.level, "significance level")->check(CLI::Range(0.0, 1.0));
  test->add_option("--group-column", ta.group_column, "name of the group label column");
  test->add_option("--threads", ta.threads, "threads for the trace kernel (0: default)");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "run a simulation experiment from a config file");
  sim->add_option("--config", sa.config, "experiment config")->required();
  sim->add_option("--threads", sa.threads, "worker threads (0: OpenMP default)");
  sim->add_option("--seed", sa.seed, "override the config seed");
  sim->add_option("--dump", sa.dump, "write one replication's data set as CSV");
  sim->add_option("--dump-cell", sa.dump_cell, "cell index (key order) for --dump");
  sim->add_option("--dump-rep", sa.dump_rep, "replication index for --dump");
  sim->add_flag("--dump-only", sa.dump_only, "stop after --dump");

  PowerArgs pa;
  auto* pow = app.add_subcommand("power", "predict power for a simulation-design scenario");
  pow->add_option("--p", pa.p, "dimension");
  pow->add_option("--nstar", pa.n_star, "base sample size n* (even)");
  pow->add_option("--case", pa.case_id, "covariance case (1 or 2)");
  pow->add_option("--r", pa.r, "signal strength r (0: null)");
  pow->add_option("--rho", pa.rho, "sparsity rho");
  pow->add_option("--level", pa.level, "significance level")->check(CLI::Range(0.0, 1.0));
  pow->add_option("--weights", pa.weights, "default | identity | <alpha,omega_sq CSV>");
  pow->add_option("--delta", pa.delta, "weak-dense exponent; prints the lower bound");
  pow->add_option("--nu", pa.nu, "weak-dense signal height (default: boundary rate)");

  std::vector<const char*> argv{"wltest"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    err << "run 'wltest --help' for usage\n";
    return kUsage;
  }

  try {
    if (test->parsed()) return cmd_test(ta, out);
    if (sim->parsed()) return cmd_simulate(sa, out, err);
    return cmd_power(pa, out);
  } catch (const std::exception& e) {
    return report(e, err);
  }
}

} // namespace wlt::cli
