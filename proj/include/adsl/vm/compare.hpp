#pragma once

#include <cstdint>
#include <string>

#include "adsl/vm/tensor.hpp"

namespace adsl::vm {

struct Tolerance {
    double rel = 0.0;
    double abs = 0.0;
};

/// Default oracle tolerance for a dtype (f16 looser than f32).
Tolerance default_tolerance(dsl::DType t);

struct ComparisonReport {
    bool pass = true;
    int64_t worst_index = -1;   // -1 when both tensors are empty
    double worst_abs_error = 0.0;
    double worst_excess = 0.0;  // error minus allowance at worst_index; > 0 means fail
    int64_t failures = 0;

    std::string summary() const;
};

/// Element i passes iff |a_i - b_i| <= abs_tol + rel_tol * |b_i|. `b` is
/// the reference. NaN in either tensor fails unless both are NaN at the
/// same index. Shape or dtype mismatch throws std::invalid_argument.
ComparisonReport compare_tensors(const TensorValue& a, const TensorValue& b, double rel_tol, double abs_tol);

}  // namespace adsl::vm
