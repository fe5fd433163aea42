#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "adsl/dsl/ast.hpp"

namespace adsl::dsl {

/// What an operand position accepts.
enum class OperandClass {
    Local,   // on-chip buffer slice
    Global,  // global tensor slice
    Mask,    // u8 on-chip buffer slice used as a predicate
    Scalar,  // scalar expression
};

enum class ElementRule {
    SameLength,      // every slice operand has the destination's length
    Reduce,          // dst length >= 1; writes dst[0] from the whole source
    BroadcastFirst,  // src length == 1; dst filled with src[0]
    Fill,            // dst filled with the scalar
    Transfer,        // global <-> local; 1-D or 2-D with rows/stride scalars
};

struct PrimitiveInfo {
    Op op;
    std::string_view name;         // DSL spelling
    std::string_view target_name;  // target IR instruction
    std::span<const OperandClass> operands;
    std::span<const OperandClass> operands_2d;  // empty unless a 2-D form exists
    ElementRule rule;
    bool float_only;  // transcendental / division style ops need f16 or f32
};

const PrimitiveInfo& primitive_info(Op op);
std::optional<Op> find_primitive(std::string_view name);
std::span<const PrimitiveInfo> all_primitives();

bool is_transfer(Op op);
bool is_compute(Op op);

/// Local row pitch (elements) of a 2-D transfer: the row length rounded up
/// to a 32-byte multiple. Pad lanes of a 2-D tile read as zero.
int64_t row_pitch_elems(int64_t cols, DType t);

}  // namespace adsl::dsl
