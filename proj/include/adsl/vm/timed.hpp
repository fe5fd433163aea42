#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "adsl/vm/interpreter.hpp"

namespace adsl::vm {

/// Execution queues, in tie-break order.
enum class Queue { MTE2 = 0, VEC = 1, SCALAR = 2, MTE3 = 3 };
inline constexpr std::array<Queue, 4> kQueues = {Queue::MTE2, Queue::VEC, Queue::SCALAR, Queue::MTE3};
std::string_view queue_name(Queue q);

struct CostReport {
    int64_t makespan_cycles = 0;
    std::array<int64_t, 4> per_queue_busy{};  // indexed by Queue; max over cores
    std::vector<int64_t> per_block_makespan;
    std::array<int64_t, 4> instr_count{};
    int64_t total_latency = 0;  // sum of all instruction latencies

    int64_t busy(Queue q) const { return per_queue_busy[static_cast<std::size_t>(q)]; }
    int64_t count(Queue q) const { return instr_count[static_cast<std::size_t>(q)]; }
};

nlohmann::json to_json(const CostReport& r);

/// Instruction latency in cycles for `bytes` moved or processed on `q`.
int64_t instruction_latency(Queue q, int64_t bytes, const NpuConfig& cfg);

struct TimedResult {
    TensorMap outputs;
    CostReport cost;
};

/// Functional execution plus an in-order multi-queue schedule. Each
/// primitive is one instruction (copy_g2l on MTE2, compute on VEC,
/// copy_l2g on MTE3, let on SCALAR). Stage instances wait for their FIFO
/// producer, and a producer waits until the slot it reuses (depth
/// productions back) has been consumed. Blocks run round-robin on cores
/// and serialize per core; sync_all separates segments.
Outcome<TimedResult> run_timed(const dsl::Program& p, const TensorMap& inputs, const NpuConfig& cfg);

}  // namespace adsl::vm
