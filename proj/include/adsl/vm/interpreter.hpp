#pragma once

#include "adsl/diagnostic.hpp"
#include "adsl/dsl/ast.hpp"
#include "adsl/semantic/host_eval.hpp"
#include "adsl/semantic/walker.hpp"
#include "adsl/vm/npu_config.hpp"
#include "adsl/vm/tensor.hpp"

namespace adsl::vm {

using semantic::LaunchPlan;

/// Host evaluation for one concrete shape; see semantic::eval_host.
Outcome<LaunchPlan> eval_host(const dsl::Program& p, const semantic::ShapeMap& shape, const NpuConfig& cfg);

/// Checks `inputs` against the input tensor params (presence, dtype, rank,
/// literal dims, consistent dimension names) and evaluates the host.
Outcome<LaunchPlan> plan_for_inputs(const dsl::Program& p, const TensorMap& inputs, const NpuConfig& cfg);

/// Receives the execution order of one run; used by the timed model.
class ExecObserver {
  public:
    virtual ~ExecObserver() = default;
    virtual void begin(std::size_t /*segment*/, int64_t /*block*/) {}
    virtual void enter_stage(const dsl::StageBlock&) {}
    virtual void exit_stage(const dsl::StageBlock&) {}
    virtual void primitive(const semantic::PrimInstance&, const semantic::KernelContext&) {}
    virtual void let(bool /*in_stage*/) {}
    virtual void end(std::size_t /*segment*/, int64_t /*block*/) {}
};

/// Functional execution. Segments between sync_all barriers run one after
/// another; inside a segment blocks run in ascending id. Each block has
/// its own zero-initialized local memory. Faults that the semantic checks
/// exclude throw InternalError.
Outcome<TensorMap> run_functional(const dsl::Program& p, const TensorMap& inputs, const NpuConfig& cfg,
                                  ExecObserver* observer = nullptr);

}  // namespace adsl::vm
