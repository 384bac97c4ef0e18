#pragma once

// Plain-text experiment configs: one `key = value` per line, lists separated
// by commas, `#` starts a comment. Recognised keys:
//   p_list, nstar_list, dist_list, case, mode, r_list, rho_list,
//   reps, level, seed, methods, out

#include <filesystem>
#include <string_view>

#include "wlt/simharness.hpp"

namespace wlt {

/// Throws ConfigError carrying the offending line number.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

} // namespace wlt
