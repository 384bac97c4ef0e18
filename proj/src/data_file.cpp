#include "wlt/data_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "wlt/errors.hpp"

namespace wlt {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string where(std::size_t line) { return "line " + std::to_string(line) + ": "; }

} // namespace

DataFile parse_data_file(std::string_view text, std::string_view group_column,
                         Eigen::Index min_rows) {
  const auto lines = lines_of(text);
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw DataError("data file is empty");
  const auto header = fields(lines[i]);
  const std::size_t header_line = i + 1;
  std::size_t gcol = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == group_column) {
      if (gcol != header.size()) {
        throw DataError(where(header_line) + "group column '" + std::string(group_column) +
                        "' appears twice");
      }
      gcol = c;
    }
  }
  if (gcol == header.size()) {
    throw DataError(where(header_line) + "no column named '" + std::string(group_column) + "'");
  }
  if (header.size() < 2) throw DataError(where(header_line) + "no feature columns");

  DataFile out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != gcol) out.feature_names.emplace_back(header[c]);
  }
  const std::size_t p = out.feature_names.size();

  std::map<std::string, std::size_t, std::less<>> index;
  std::vector<std::vector<double>> values;  // row-major per group
  for (++i; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto f = fields(lines[i]);
    if (f.size() != header.size()) {
      throw DataError(where(i + 1) + "expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(f.size()));
    }
    if (f[gcol].empty()) throw DataError(where(i + 1) + "missing group label");
    auto it = index.find(f[gcol]);
    if (it == index.end()) {
      it = index.emplace(std::string(f[gcol]), out.labels.size()).first;
      out.labels.emplace_back(f[gcol]);
      values.emplace_back();
    }
    auto& dst = values[it->second];
    for (std::size_t c = 0; c < f.size(); ++c) {
      if (c == gcol) continue;
      double v = 0.0;
      if (!parse_double(f[c], v)) {
        throw DataError(where(i + 1) + "column '" + std::string(header[c]) +
                        "': missing or non-numeric value '" + std::string(f[c]) + "'");
      }
      dst.push_back(v);
    }
  }
  if (out.labels.size() < 2) {
    throw InsufficientSamples("data file has " + std::to_string(out.labels.size()) +
                              " group(s); at least 2 are required");
  }
  for (std::size_t g = 0; g < values.size(); ++g) {
    const auto n = static_cast<Eigen::Index>(values[g].size() / p);
    if (n < min_rows) {
      throw InsufficientSamples("group '" + out.labels[g] + "' has " + std::to_string(n) +
                                " rows; at least " + std::to_string(min_rows) + " are required");
    }
    out.groups.push_back(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                         Eigen::RowMajor>>(
        values[g].data(), n, static_cast<Eigen::Index>(p)));
  }
  return out;
}

DataFile read_data_file(const std::filesystem::path& path, std::string_view group_column,
                        Eigen::Index min_rows) {
  return parse_data_file(slurp(path), group_column, min_rows);
}

void write_data_file(const std::filesystem::path& path, const DataFile& data,
                     std::string_view group_column) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << group_column;
  for (const auto& name : data.feature_names) os << ',' << name;
  os << '\n';
  char buf[64];
  for (std::size_t g = 0; g < data.groups.size(); ++g) {
    const auto& x = data.groups[g];
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      os << data.labels[g];
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        auto res = std::to_chars(buf, buf + sizeof buf, x(r, c));
        os << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
      }
      os << '\n';
    }
  }
  if (!os) throw IoError("failed writing " + path.string());
}

WeightSpec parse_weight_file(std::string_view text) {
  WeightSpec spec;
  bool first = true;
  std::size_t line_no = 0;
  for (auto line : lines_of(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = fields(line);
    if (f.size() != 2) throw DataError("weight file " + where(line_no) + "expected 2 fields");
    double a = 0.0;
    double w = 0.0;
    const bool numeric = parse_double(f[0], a) && parse_double(f[1], w);
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw DataError("weight file " + where(line_no) + "non-numeric value");
    }
    first = false;
    spec.alpha.push_back(a);
    spec.omega_sq.push_back(w);
  }
  try {
    validate(spec);
  } catch (const Error& e) {
    throw DataError(std::string("weight file: ") + e.what());
  }
  return spec;
}

WeightSpec read_weight_file(const std::filesystem::path& path) {
  return parse_weight_file(slurp(path));
}

} // namespace wlt
