#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adsl/cli/manifest.hpp"
#include "adsl/dsl/ast.hpp"
#include "adsl/vm/npu_config.hpp"

namespace adsl::cli {

/// Process exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitParse = 2, kExitIo = 3, kExitUsage = 4 };

/// Tensor files used by `sim`: <dir>/<tensor name><kTensorExt>.
inline constexpr const char* kTensorExt = ".adslt";

/// Parse + semantic checks. Diagnostics go to `out` as JSON lines.
int cmd_check(const std::filesystem::path& program, const vm::NpuConfig& cfg, std::ostream& out, std::ostream& err);

struct SimOptions {
    std::filesystem::path program;
    std::filesystem::path inputs_dir;
    std::filesystem::path out_dir;
    bool timed = false;
    bool json = false;  // also print the cost report on `out`
};

int cmd_sim(const SimOptions& o, const vm::NpuConfig& cfg, std::ostream& out, std::ostream& err);

struct CompileOptions {
    std::filesystem::path program;
    std::filesystem::path out_dir;
    int stop_after = 4;
    std::string inject_fault;       // "" or "drop-dequeue"
    std::string extension = ".txt";
};

/// Writes <kernel>_host<ext>, <kernel>_kernel<ext> (once pass 2 ran) and
/// <kernel>_trace.json; with stop_after < 4 also <kernel>_pass<N><ext>.
int cmd_compile(const CompileOptions& o, const vm::NpuConfig& cfg, std::ostream& out, std::ostream& err);

struct BenchRow {
    std::string fixture;
    std::string shape;
    int64_t makespan_cycles = 0;
    int64_t naive_makespan_cycles = 0;
    double speedup = 0.0;
    bool failed = false;
    std::string note;
};

/// The single-core, depth-1 configuration bench compares against.
vm::NpuConfig naive_config(const vm::NpuConfig& cfg);

std::vector<BenchRow> bench_rows(const std::vector<FixtureManifest>& corpus, const vm::NpuConfig& cfg);
nlohmann::json to_json(const BenchRow& r);

/// `target` is a fixtures directory or one manifest.json.
int cmd_bench(const std::filesystem::path& target, const vm::NpuConfig& cfg, bool json, std::ostream& out,
              std::ostream& err);

struct GoldenSet {
    std::string host;
    std::string kernel;
    std::string trace;
};

/// What `goldens` compares for one fixture, generated under `cfg`.
GoldenSet golden_outputs(const FixtureManifest& m, const vm::NpuConfig& cfg);

int cmd_goldens(const std::filesystem::path& fixtures_dir, const vm::NpuConfig& cfg, bool update, std::ostream& out,
                std::ostream& err);

/// Reads and parses a program. Sets `code` to kExitIo or kExitParse on
/// failure and reports on `diag_out` (diagnostics as JSON lines).
std::optional<dsl::Program> load_program(const std::filesystem::path& path, std::ostream& diag_out, std::ostream& err,
                                         int& code);

/// Command-line front end. argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace adsl::cli
