#pragma once

#include <filesystem>
#include <string>

#include "adsl/cli/manifest.hpp"
#include "adsl/dsl/parser.hpp"
#include "adsl/lowering/pipeline.hpp"

namespace adsl::testing {

inline std::filesystem::path fixtures_dir() { return ADSL_TEST_FIXTURES_DIR; }

/// Parses `src`; throws with the diagnostics when it does not parse.
inline dsl::Program parse_or_throw(const std::string& src) {
    auto r = dsl::parse_program(src);
    if (!r.ok()) {
        std::string msg = "parse failed:";
        for (const auto& d : r.diagnostics) msg += "\n  " + to_json_line(d);
        throw std::runtime_error(msg);
    }
    return *r.value;
}

inline dsl::Program load_fixture_program(const cli::FixtureManifest& m) {
    return parse_or_throw(cli::read_file(m.program_path()));
}

inline dsl::Program load_fixture_program(const std::string& name) {
    return parse_or_throw(cli::read_file(fixtures_dir() / name / "program.adsl"));
}

inline std::string fixture_source(const std::string& name) {
    return cli::read_file(fixtures_dir() / name / "program.adsl");
}

/// Lowered unit of a program that is expected to compile.
inline target::TargetUnit lower_or_throw(const dsl::Program& p, const vm::NpuConfig& cfg = {}) {
    auto r = lowering::run_pipeline(p, cfg);
    if (!r.unit) {
        std::string msg = "pipeline failed at pass " + std::to_string(r.failed_pass) + ":";
        for (const auto& d : r.diagnostics) msg += "\n  " + to_json_line(d);
        throw std::runtime_error(msg);
    }
    return *r.unit;
}

/// Replaces the first occurrence of `from`; throws when absent.
inline std::string replace_once(std::string s, const std::string& from, const std::string& to) {
    auto pos = s.find(from);
    if (pos == std::string::npos) throw std::runtime_error("pattern not found: " + from);
    return s.replace(pos, from.size(), to);
}

}  // namespace adsl::testing
