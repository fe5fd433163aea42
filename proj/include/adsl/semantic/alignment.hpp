#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "adsl/dsl/ast.hpp"
#include "adsl/semantic/host_eval.hpp"
#include "adsl/vm/npu_config.hpp"

namespace adsl::semantic {

struct AlignmentRecord {
    std::string block_label;
    int site = -1;                 // primitive call site of the transfer
    dsl::Op op = dsl::Op::CopyG2L;
    int64_t byte_count = 0;        // bytes per row
    int64_t offset_bytes = 0;      // global offset of the first row
    int64_t stride_bytes = 0;      // global row stride; 0 for 1-D transfers
    int64_t rows = 1;
    bool aligned = true;
};

/// aligned <=> byte_count, offset_bytes and stride_bytes are all multiples of 32.
bool is_aligned(int64_t byte_count, int64_t offset_bytes, int64_t stride_bytes);

struct AlignmentReport {
    std::vector<AlignmentRecord> records;

    /// A site is unaligned when any of its records is.
    bool site_unaligned(int site) const;
    std::set<int> unaligned_sites() const;
};

/// One record per transfer site and distinct (byte_count, offset mod 32,
/// stride mod 32) class over all declared shapes and blocks.
AlignmentReport analyze_alignment(const dsl::Program& p, const vm::NpuConfig& cfg);

/// Same, for a single launch plan.
AlignmentReport analyze_alignment(const dsl::Program& p, const LaunchPlan& plan);

}  // namespace adsl::semantic
