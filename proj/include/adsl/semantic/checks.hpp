#pragma once

#include <vector>

#include "adsl/diagnostic.hpp"
#include "adsl/dsl/ast.hpp"
#include "adsl/semantic/host_eval.hpp"
#include "adsl/vm/npu_config.hpp"

namespace adsl::semantic {

/// Placement rules: transfers and compute primitives in the right stage
/// kinds, no global access from compute, no nested stages, sync_all only
/// at kernel top level, and stream buffers produced (in source order)
/// before a consuming stage.
Diagnostics check_staging(const dsl::Program& p);

/// Buffer roles, capacities, UB/L1 budgets, and, per declared shape, slice
/// bounds and element counts of every primitive execution.
Diagnostics check_buffers(const dsl::Program& p, const vm::NpuConfig& cfg);

struct ShapeTiling {
    ShapeMap shape;
    LaunchPlan plan;
};

struct TilingSummary {
    std::vector<ShapeTiling> shapes;
};

/// Evaluates host tiling for every declared shape (TIL-NONPOS, TIL-CYCLE,
/// TIL-RATIONALE) and checks that per-block writes to every output tensor
/// cover it exactly (TIL-GAP, TIL-OVERLAP).
Outcome<TilingSummary> check_tiling(const dsl::Program& p, const vm::NpuConfig& cfg);

/// Executes the producer/consumer protocol of stream buffers for every
/// declared shape (STG-USE-BEFORE-DEF, STG-UNCONSUMED).
Diagnostics check_dataflow(const dsl::Program& p, const vm::NpuConfig& cfg);

/// The whole suite in order: symbols, staging, tiling, buffers, dataflow.
/// Stops after the first stage that reports an error.
Diagnostics run_checks(const dsl::Program& p, const vm::NpuConfig& cfg);

}  // namespace adsl::semantic
