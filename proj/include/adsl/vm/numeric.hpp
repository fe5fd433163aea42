#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adsl/dsl/ast.hpp"

namespace adsl::vm {

/// Nearest f16 value (round half to even, overflow to infinity).
double round_f16(double x);
uint16_t f16_bits(double x);
double f16_from_bits(uint16_t bits);

/// Rounds to the nearest value of `t`. Integers round half to even and
/// saturate; NaN becomes 0 for integer types.
double round_to(dsl::DType t, double x);

/// Element kernels shared by both interpreters. Every result is rounded to
/// the destination dtype; reductions accumulate sequentially in `t`.
double apply_binary(dsl::Op op, double a, double b, dsl::DType t);
double apply_unary(dsl::Op op, double a, dsl::DType t);
double reduce(dsl::Op op, std::span<const double> src, dsl::DType t);

}  // namespace adsl::vm

namespace adsl::vm {

/// A view of one slice operand in local memory.
struct LocalView {
    double* data = nullptr;  // null for scalar operands
    int64_t len = 0;
    dsl::DType dtype = dsl::DType::F32;
};

/// Executes one compute primitive. Operand 0 is the destination; scalar
/// operands are passed through `scalar`. Results are computed into a
/// scratch vector first so overlapping slices behave like a copy.
void execute_compute(dsl::Op op, const std::vector<LocalView>& operands, double scalar);

}  // namespace adsl::vm
