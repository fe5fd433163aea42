#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adsl/diagnostic.hpp"
#include "adsl/dsl/ast.hpp"
#include "adsl/target/ir.hpp"
#include "adsl/vm/npu_config.hpp"

namespace adsl::lowering {

/// Called on a gate failure with the unit and the gate's diagnostics;
/// returns a (hopefully) repaired unit.
using RepairHook = std::function<target::TargetUnit(const target::TargetUnit&, const Diagnostics&)>;

target::TargetUnit identity_hook(const target::TargetUnit& t, const Diagnostics&);

using Pass = std::function<target::TargetUnit(const dsl::Program&, const target::TargetUnit&, const vm::NpuConfig&)>;

/// The four passes in order; entries can be swapped for test doubles.
std::array<Pass, 4> default_passes();
std::string_view pass_name(int pass_id);

struct PassRecord {
    int pass_id = 0;
    Diagnostics before;  // first gate run
    Diagnostics after;   // last gate run
    int repair_attempts = 0;
    bool accepted = false;
};

struct PassTrace {
    std::vector<PassRecord> records;
};

nlohmann::json to_json(const PassTrace& t);

struct PipelineOptions {
    RepairHook hook = identity_hook;
    int max_repairs = 3;
    int stop_after = 4;  // run passes 1..stop_after
    std::array<Pass, 4> passes = default_passes();
};

struct PipelineResult {
    std::optional<target::TargetUnit> unit;  // set when every run pass was accepted
    PassTrace trace;
    Diagnostics diagnostics;  // semantic errors, or the failing gate's diagnostics
    int failed_pass = 0;      // 0 when nothing failed or semantic checks failed
};

/// Semantic checks, then passes 1..stop_after, each gated by
/// check_structure. A failing gate calls the hook up to max_repairs
/// times; if the unit still fails, the pipeline stops at that pass.
PipelineResult run_pipeline(const dsl::Program& p, const vm::NpuConfig& cfg, const PipelineOptions& opts = {});

/// Test double for pass 3: the regular pass minus the first DeQue of the
/// first Compute function that has one.
Pass pass_compute_dropping_dequeue();

}  // namespace adsl::lowering
