#include "adsl/vm/npu_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace adsl::vm {

namespace {

using Field = int64_t NpuConfig::*;

const std::vector<std::pair<std::string_view, Field>>& fields() {
    static const std::vector<std::pair<std::string_view, Field>> kFields = {
        {"num_cores", &NpuConfig::num_cores},
        {"ub_bytes", &NpuConfig::ub_bytes},
        {"l1_bytes", &NpuConfig::l1_bytes},
        {"alignment_bytes", &NpuConfig::alignment_bytes},
        {"queue_depth_in", &NpuConfig::queue_depth_in},
        {"queue_depth_out", &NpuConfig::queue_depth_out},
        {"lat_issue", &NpuConfig::lat_issue},
        {"lat_mte_per_256B", &NpuConfig::lat_mte_per_256B},
        {"lat_vec_per_256B", &NpuConfig::lat_vec_per_256B},
        {"lat_scalar", &NpuConfig::lat_scalar},
    };
    return kFields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string validate(const NpuConfig& cfg) {
    if (cfg.num_cores < 1) return "num_cores must be >= 1";
    if (cfg.ub_bytes < 1) return "ub_bytes must be >= 1";
    if (cfg.l1_bytes < 1) return "l1_bytes must be >= 1";
    if (cfg.alignment_bytes != 32) return "alignment_bytes is fixed at 32";
    if (cfg.queue_depth_in < 1 || cfg.queue_depth_in > 4) return "queue_depth_in must be in [1,4]";
    if (cfg.queue_depth_out < 1 || cfg.queue_depth_out > 4) return "queue_depth_out must be in [1,4]";
    if (cfg.lat_issue < 0 || cfg.lat_mte_per_256B < 0 || cfg.lat_vec_per_256B < 0 || cfg.lat_scalar < 0)
        return "latencies must be non-negative";
    return {};
}

NpuConfig parse_config(std::string_view text) {
    NpuConfig cfg;
    int line_no = 0;
    while (!text.empty()) {
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        Field target = nullptr;
        for (const auto& [name, field] : fields()) {
            if (name == key) target = field;
        }
        if (!target)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" +
                                        std::string(key) + "'");
        int64_t parsed = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), parsed);
        if (ec != std::errc{} || ptr != value.data() + value.size())
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": bad integer '" +
                                        std::string(value) + "'");
        cfg.*target = parsed;
    }
    if (auto err = validate(cfg); !err.empty()) throw std::invalid_argument("config: " + err);
    return cfg;
}

NpuConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string render_config(const NpuConfig& cfg) {
    std::string out;
    for (const auto& [name, field] : fields()) {
        out += std::string(name) + " = " + std::to_string(cfg.*field) + "\n";
    }
    return out;
}

nlohmann::json to_json(const NpuConfig& cfg) {
    nlohmann::json j;
    for (const auto& [name, field] : fields()) j[std::string(name)] = cfg.*field;
    return j;
}

}  // namespace adsl::vm
