#pragma once

// CSV input for the command-line test: a header row, one group-label column
// and p numeric feature columns. Groups are numbered in order of first
// appearance, which fixes how coefficients are assigned to them. Fields are
// split on commas; quoting is not supported.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "wlt/weights.hpp"

namespace wlt {

struct DataFile {
  std::vector<std::string> labels;         // group labels, first-appearance order
  std::vector<std::string> feature_names;  // p names
  std::vector<Eigen::MatrixXd> groups;     // one n_i x p matrix per label
};

/// Throws DataError (with line numbers) for malformed content and
/// InsufficientSamples when some group has fewer than `min_rows` rows or there
/// are fewer than two groups.
DataFile parse_data_file(std::string_view text, std::string_view group_column = "group",
                         Eigen::Index min_rows = 4);
DataFile read_data_file(const std::filesystem::path& path, std::string_view group_column = "group",
                        Eigen::Index min_rows = 4);

/// Writes rows group by group with full round-trip precision.
void write_data_file(const std::filesystem::path& path, const DataFile& data,
                     std::string_view group_column = "group");

/// Two-column CSV (alpha, omega_sq), optional header line. The resulting WeightSpec is validated.
WeightSpec parse_weight_file(std::string_view text);
WeightSpec read_weight_file(const std::filesystem::path& path);

} // namespace wlt
