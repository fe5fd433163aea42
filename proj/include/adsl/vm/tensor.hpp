#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "adsl/dsl/ast.hpp"

namespace adsl::vm {

/// A dense row-major tensor. Elements are stored as doubles that always
/// hold a value representable in `dtype`.
struct TensorValue {
    dsl::DType dtype = dsl::DType::F32;
    std::vector<int64_t> shape;
    std::vector<double> data;

    static TensorValue zeros(dsl::DType dtype, std::vector<int64_t> shape);
    static TensorValue from(dsl::DType dtype, std::vector<int64_t> shape, std::vector<double> values);

    int64_t numel() const;
    bool operator==(const TensorValue&) const = default;
};

using TensorMap = std::map<std::string, TensorValue>;

/// Bitwise equality of element data (NaNs compare by bit pattern).
bool bitwise_equal(const TensorValue& a, const TensorValue& b);

std::string shape_string(const std::vector<int64_t>& shape);

}  // namespace adsl::vm
