#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace adsl::vm {

/// Virtual NPU machine model. Latencies are relative cost units, not
/// calibrated against real silicon.
struct NpuConfig {
    int64_t num_cores = 8;
    int64_t ub_bytes = 196608;
    int64_t l1_bytes = 1048576;
    int64_t alignment_bytes = 32;
    int64_t queue_depth_in = 2;
    int64_t queue_depth_out = 2;
    int64_t lat_issue = 10;
    int64_t lat_mte_per_256B = 20;
    int64_t lat_vec_per_256B = 4;
    int64_t lat_scalar = 1;

    bool operator==(const NpuConfig&) const = default;
};

/// Empty string when valid, otherwise a description of the first violation.
std::string validate(const NpuConfig& cfg);

/// Parses `key = value` lines; `#` starts a comment. Unknown keys and
/// malformed values throw std::invalid_argument. Keys not present keep
/// their defaults.
NpuConfig parse_config(std::string_view text);
NpuConfig load_config(const std::string& path);
std::string render_config(const NpuConfig& cfg);

nlohmann::json to_json(const NpuConfig& cfg);

}  // namespace adsl::vm
