#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "adsl/dsl/ast.hpp"
#include "adsl/semantic/host_eval.hpp"
#include "adsl/vm/tensor.hpp"

namespace adsl::vm {

/// How random values for one input tensor are drawn.
struct InputDomain {
    enum class Kind { Uniform, Sign, Mask };
    std::string tensor;
    Kind kind = Kind::Uniform;
    double lo = -1.0;
    double hi = 1.0;
};

/// An operator the oracle knows by id: its plain formula, the tensor names
/// it reads and writes, and sensible input domains.
struct OperatorSpec {
    std::string id;
    std::string formula;
    std::vector<InputDomain> inputs;
    std::vector<std::string> outputs;
};

const std::vector<OperatorSpec>& operator_specs();
const OperatorSpec* find_operator(std::string_view id);

/// Dense f64 evaluation of operator `id`; each output is rounded to the
/// dtype of the first input. Unknown ids, missing inputs and inconsistent
/// shapes throw std::invalid_argument.
TensorMap reference_eval(std::string_view id, const TensorMap& inputs);

/// Seeded random inputs for the In tensors of `p` at `shape`, drawn per the
/// operator's domains (tensors without a domain use [-1, 1]).
TensorMap random_inputs(const dsl::Program& p, const OperatorSpec& spec, const semantic::ShapeMap& shape,
                        uint64_t seed);

}  // namespace adsl::vm
