#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "adsl/dsl/ast.hpp"

namespace adsl::dsl {

/// Scalar runtime value: 64-bit signed integer or double.
struct Value {
    bool is_float = false;
    int64_t i = 0;
    double f = 0.0;

    static Value of_int(int64_t v) { return Value{false, v, 0.0}; }
    static Value of_float(double v) { return Value{true, 0, v}; }
    double as_double() const { return is_float ? f : static_cast<double>(i); }
    bool operator==(const Value&) const = default;
};

struct EvalError {
    std::string message;
    Span span;
};

using Lookup = std::function<std::optional<Value>(std::string_view)>;

/// Integer ops are checked: overflow and division by zero are errors.
/// `/` and `%` truncate toward zero. Mixing an int with a float promotes
/// to double. Builtins: min, max, ceil_div, align_up.
std::variant<Value, EvalError> evaluate(const Expr& e, const Lookup& lookup);

/// Convenience: evaluates and requires an integer result.
std::variant<int64_t, EvalError> evaluate_int(const Expr& e, const Lookup& lookup);

bool is_builtin_function(std::string_view name);

/// Folds literal-only subtrees and trivial identities (x+0, x*1, 0+x ...).
/// Assumes integer semantics; only apply to offsets, counts and bounds.
Expr fold(const Expr& e);

std::optional<int64_t> as_constant(const Expr& e);

}  // namespace adsl::dsl
