#include "adsl/vm/tensor.hpp"

#include <bit>
#include <stdexcept>

#include "adsl/vm/numeric.hpp"

namespace adsl::vm {

int64_t TensorValue::numel() const {
    int64_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

TensorValue TensorValue::zeros(dsl::DType dtype, std::vector<int64_t> shape) {
    TensorValue t;
    t.dtype = dtype;
    t.shape = std::move(shape);
    t.data.assign(static_cast<std::size_t>(t.numel()), 0.0);
    return t;
}

TensorValue TensorValue::from(dsl::DType dtype, std::vector<int64_t> shape, std::vector<double> values) {
    TensorValue t;
    t.dtype = dtype;
    t.shape = std::move(shape);
    if (static_cast<int64_t>(values.size()) != t.numel())
        throw std::invalid_argument("tensor data length does not match its shape");
    for (auto& v : values) v = round_to(dtype, v);
    t.data = std::move(values);
    return t;
}

bool bitwise_equal(const TensorValue& a, const TensorValue& b) {
    if (a.dtype != b.dtype || a.shape != b.shape || a.data.size() != b.data.size()) return false;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        if (std::bit_cast<uint64_t>(a.data[i]) != std::bit_cast<uint64_t>(b.data[i])) return false;
    }
    return true;
}

std::string shape_string(const std::vector<int64_t>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

}  // namespace adsl::vm
