#include "wlt/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "wlt/errors.hpp"

namespace wlt {

namespace {

constexpr std::array<std::string_view, 12> kKeys = {
    "p_list", "nstar_list", "dist_list", "case",    "mode",    "r_list",
    "rho_list", "reps",     "level",     "seed",    "methods", "out"};

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> list_items(std::string_view value) {
  std::vector<std::string_view> out;
  if (trim(value).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = value.find(',', start);
    out.push_back(trim(value.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T number(std::string_view s, std::string_view key, int line) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("invalid value '" + std::string(s) + "' for " + std::string(key), line);
  }
  return v;
}

struct Entry {
  std::string value;
  int line = 0;
};

} // namespace

ExperimentConfig parse_config(std::string_view text) {
  std::map<std::string, Entry, std::less<>> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected 'key = value'", line_no);
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
    }
    if (entries.count(key)) {
      throw ConfigError("duplicate key '" + std::string(key) + "'", line_no);
    }
    entries.emplace(std::string(key), Entry{std::string(value), line_no});
  }

  auto require = [&](std::string_view key) -> const Entry& {
    auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError("missing key '" + std::string(key) + "'", 0);
    return it->second;
  };

  ExperimentConfig cfg;
  {
    const auto& e = require("p_list");
    cfg.p_list.clear();
    for (auto item : list_items(e.value)) {
      const auto p = number<std::size_t>(item, "p_list", e.line);
      if (p < 1) throw ConfigError("p must be >= 1", e.line);
      cfg.p_list.push_back(p);
    }
    if (cfg.p_list.empty()) throw ConfigError("p_list is empty", e.line);
  }
  {
    const auto& e = require("nstar_list");
    for (auto item : list_items(e.value)) {
      const int n = number<int>(item, "nstar_list", e.line);
      if (n % 2 != 0 || n < 8) {
        throw ConfigError("n* must be even and >= 8 so that every group has >= 4 rows", e.line);
      }
      cfg.nstar_list.push_back(n);
    }
    if (cfg.nstar_list.empty()) throw ConfigError("nstar_list is empty", e.line);
  }
  {
    const auto& e = require("dist_list");
    for (auto item : list_items(e.value)) {
      const auto d = parse_distribution(item);
      if (!d) throw ConfigError("unknown distribution '" + std::string(item) + "'", e.line);
      cfg.dists.push_back(*d);
    }
    if (cfg.dists.empty()) throw ConfigError("dist_list is empty", e.line);
  }
  {
    const auto& e = require("case");
    cfg.case_id = number<int>(e.value, "case", e.line);
    if (cfg.case_id != 1 && cfg.case_id != 2) throw ConfigError("case must be 1 or 2", e.line);
  }
  {
    const auto& e = require("mode");
    if (e.value == "null") {
      cfg.mode = Hypothesis::null;
    } else if (e.value == "alternative") {
      cfg.mode = Hypothesis::alternative;
    } else {
      throw ConfigError("mode must be 'null' or 'alternative'", e.line);
    }
  }
  for (auto key : {std::string_view("r_list"), std::string_view("rho_list")}) {
    auto it = entries.find(key);
    if (it == entries.end()) {
      if (cfg.mode == Hypothesis::alternative) {
        throw ConfigError("alternative mode requires '" + std::string(key) + "'", 0);
      }
      continue;
    }
    auto& target = key == "r_list" ? cfg.r_list : cfg.rho_list;
    for (auto item : list_items(it->second.value)) {
      target.push_back(number<double>(item, key, it->second.line));
    }
    if (cfg.mode == Hypothesis::alternative && target.empty()) {
      throw ConfigError(std::string(key) + " is empty", it->second.line);
    }
  }
  {
    const auto& e = require("reps");
    cfg.reps = number<int>(e.value, "reps", e.line);
    if (cfg.reps < 1) throw ConfigError("reps must be >= 1", e.line);
  }
  {
    const auto& e = require("level");
    cfg.level = number<double>(e.value, "level", e.line);
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw ConfigError("level must lie in (0, 1)", e.line);
  }
  {
    const auto& e = require("seed");
    cfg.seed = number<std::uint64_t>(e.value, "seed", e.line);
  }
  {
    const auto& e = require("methods");
    cfg.methods.clear();
    for (auto item : list_items(e.value)) {
      const auto m = parse_method(item);
      if (!m) throw ConfigError("unknown method '" + std::string(item) + "'", e.line);
      cfg.methods.push_back(*m);
    }
  }
  {
    const auto& e = require("out");
    if (e.value.empty()) throw ConfigError("out must name a file", e.line);
    cfg.out = e.value;
  }
  try {
    validate(cfg);
  } catch (const InvalidArgument& ex) {
    throw ConfigError(ex.what(), 0);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(e.message(), e.line(), path.string());
  }
}

} // namespace wlt
