#pragma once

#include <set>

#include "adsl/dsl/ast.hpp"
#include "adsl/target/ir.hpp"
#include "adsl/vm/npu_config.hpp"

namespace adsl::lowering {

/// Pass 1: tiling record, host statements in dependency order, launch.
target::TargetUnit pass_host(const dsl::Program& p);

/// Pass 2: kernel state, block id and range, queues for stream buffers
/// (VECIN / VECOUT at the configured depth) and plain buffers for temps.
target::TargetUnit pass_kernel_init(const dsl::Program& p, target::TargetUnit t, const vm::NpuConfig& cfg);

/// Pass 3: one stage function per stage block with the queue protocol
/// around it, and the Process body mirroring the kernel's control flow.
target::TargetUnit pass_kernel_compute(const dsl::Program& p, target::TargetUnit t);

/// Pass 4: rewrites the global copies of every site that is unaligned for
/// some declared shape into DataCopyPad.
target::TargetUnit pass_alignment(const dsl::Program& p, target::TargetUnit t, const vm::NpuConfig& cfg);

/// The rewrite of pass 4 for an explicit site set. Copies that are
/// already padded are left alone.
target::TargetUnit pad_sites(target::TargetUnit t, const std::set<int>& sites);

}  // namespace adsl::lowering
