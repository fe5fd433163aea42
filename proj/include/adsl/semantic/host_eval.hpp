#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "adsl/diagnostic.hpp"
#include "adsl/dsl/ast.hpp"
#include "adsl/dsl/expr.hpp"
#include "adsl/vm/npu_config.hpp"

namespace adsl::semantic {

/// Values for the symbolic dimension names of a program.
using ShapeMap = std::map<std::string, int64_t>;

struct BlockRange {
    int64_t start = 0;
    int64_t len = 0;
    bool operator==(const BlockRange&) const = default;
};

/// Splits `domain` units over `blocks`: every block gets domain / blocks,
/// and the first domain % blocks blocks get one extra.
std::vector<BlockRange> partition(int64_t domain, int64_t blocks);

struct KernelArg {
    bool is_tensor = false;
    std::string tensor;  // host tensor name when is_tensor
    dsl::Value scalar;
};

struct LaunchPlan {
    ShapeMap shape;
    std::vector<std::pair<std::string, int64_t>> tiling_values;  // dependency order
    int64_t num_blocks = 0;
    int64_t domain = 0;
    std::vector<BlockRange> per_block_ranges;
    std::map<std::string, std::vector<int64_t>> tensor_dims;
    std::vector<KernelArg> args;  // one per kernel parameter

    int64_t tiling(const std::string& name) const;
    int64_t numel(const std::string& tensor) const;
};

/// Tiling declarations in dependency order (indices into host.tiling), or
/// a TIL-CYCLE diagnostic.
Outcome<std::vector<std::size_t>> tiling_order(const dsl::HostFn& h);

/// Evaluates host code for one shape. Faults and non-positive sizes are
/// TIL-NONPOS; a missing dimension is SEM-SHAPE. More blocks than cores
/// is only a warning.
Outcome<LaunchPlan> eval_host(const dsl::Program& p, const ShapeMap& shape, const vm::NpuConfig& cfg);

/// The declared shapes of a program; a single empty map when it has no
/// symbolic dims.
std::vector<ShapeMap> declared_shapes(const dsl::Program& p);

/// Binds dimension names from concrete input tensor dims. Conflicting or
/// mismatched dims are SEM-SHAPE.
Outcome<ShapeMap> shape_from_inputs(const dsl::Program& p,
                                    const std::map<std::string, std::vector<int64_t>>& input_dims);

std::string shape_to_string(const ShapeMap& s);

}  // namespace adsl::semantic
