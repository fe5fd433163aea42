#include "adsl/dsl/expr.hpp"

#include <algorithm>
#include <cmath>

namespace adsl::dsl {

namespace {

using Result = std::variant<Value, EvalError>;

EvalError err(const Expr& e, std::string msg) { return EvalError{std::move(msg), e.span}; }

Result int_binary(const Expr& e, char op, int64_t a, int64_t b) {
    int64_t r = 0;
    switch (op) {
        case '+':
            if (__builtin_add_overflow(a, b, &r)) return err(e, "integer overflow in '+'");
            return Value::of_int(r);
        case '-':
            if (__builtin_sub_overflow(a, b, &r)) return err(e, "integer overflow in '-'");
            return Value::of_int(r);
        case '*':
            if (__builtin_mul_overflow(a, b, &r)) return err(e, "integer overflow in '*'");
            return Value::of_int(r);
        case '/':
            if (b == 0) return err(e, "division by zero");
            if (a == INT64_MIN && b == -1) return err(e, "integer overflow in '/'");
            return Value::of_int(a / b);
        case '%':
            if (b == 0) return err(e, "modulo by zero");
            if (a == INT64_MIN && b == -1) return Value::of_int(0);
            return Value::of_int(a % b);
    }
    return err(e, "unknown operator");
}

Result float_binary(const Expr& e, char op, double a, double b) {
    switch (op) {
        case '+': return Value::of_float(a + b);
        case '-': return Value::of_float(a - b);
        case '*': return Value::of_float(a * b);
        case '/':
            if (b == 0.0) return err(e, "division by zero");
            return Value::of_float(a / b);
        case '%':
            if (b == 0.0) return err(e, "modulo by zero");
            return Value::of_float(std::fmod(a, b));
    }
    return err(e, "unknown operator");
}

}  // namespace

bool is_builtin_function(std::string_view name) {
    return name == "min" || name == "max" || name == "ceil_div" || name == "align_up";
}

std::variant<Value, EvalError> evaluate(const Expr& e, const Lookup& lookup) {
    switch (e.kind) {
        case Expr::Kind::Int: return Value::of_int(e.int_value);
        case Expr::Kind::Float: return Value::of_float(e.float_value);
        case Expr::Kind::Ident: {
            auto v = lookup(e.name);
            if (!v) return err(e, "unbound identifier '" + e.name + "'");
            return *v;
        }
        case Expr::Kind::Neg: {
            auto r = evaluate(e.args.at(0), lookup);
            if (auto* er = std::get_if<EvalError>(&r)) return *er;
            Value v = std::get<Value>(r);
            if (v.is_float) return Value::of_float(-v.f);
            if (v.i == INT64_MIN) return err(e, "integer overflow in negation");
            return Value::of_int(-v.i);
        }
        case Expr::Kind::Binary: {
            auto l = evaluate(e.args.at(0), lookup);
            if (auto* er = std::get_if<EvalError>(&l)) return *er;
            auto r = evaluate(e.args.at(1), lookup);
            if (auto* er = std::get_if<EvalError>(&r)) return *er;
            Value a = std::get<Value>(l), b = std::get<Value>(r);
            if (!a.is_float && !b.is_float) return int_binary(e, e.op, a.i, b.i);
            return float_binary(e, e.op, a.as_double(), b.as_double());
        }
        case Expr::Kind::Call: {
            if (!is_builtin_function(e.name)) return err(e, "unknown function '" + e.name + "'");
            if (e.args.size() != 2) return err(e, "'" + e.name + "' takes 2 arguments");
            auto l = evaluate(e.args[0], lookup);
            if (auto* er = std::get_if<EvalError>(&l)) return *er;
            auto r = evaluate(e.args[1], lookup);
            if (auto* er = std::get_if<EvalError>(&r)) return *er;
            Value a = std::get<Value>(l), b = std::get<Value>(r);
            if (e.name == "min" || e.name == "max") {
                const bool take_min = e.name == "min";
                if (!a.is_float && !b.is_float) return Value::of_int(take_min ? std::min(a.i, b.i) : std::max(a.i, b.i));
                double x = a.as_double(), y = b.as_double();
                return Value::of_float(take_min ? std::min(x, y) : std::max(x, y));
            }
            if (a.is_float || b.is_float) return err(e, "'" + e.name + "' requires integer arguments");
            if (b.i <= 0) return err(e, "'" + e.name + "' requires a positive divisor");
            if (e.name == "ceil_div") {
                if (a.i >= 0) {
                    int64_t sum = 0;
                    if (__builtin_add_overflow(a.i, b.i - 1, &sum)) return err(e, "integer overflow in ceil_div");
                    return Value::of_int(sum / b.i);
                }
                return Value::of_int(a.i / b.i);
            }
            // align_up
            int64_t q = a.i >= 0 ? (a.i + b.i - 1) / b.i : a.i / b.i;
            int64_t out = 0;
            if (__builtin_mul_overflow(q, b.i, &out)) return err(e, "integer overflow in align_up");
            return Value::of_int(out);
        }
    }
    return err(e, "malformed expression");
}

std::variant<int64_t, EvalError> evaluate_int(const Expr& e, const Lookup& lookup) {
    auto r = evaluate(e, lookup);
    if (auto* er = std::get_if<EvalError>(&r)) return *er;
    Value v = std::get<Value>(r);
    if (v.is_float) return EvalError{"expected an integer expression", e.span};
    return v.i;
}

std::optional<int64_t> as_constant(const Expr& e) {
    if (e.kind == Expr::Kind::Int) return e.int_value;
    return std::nullopt;
}

Expr fold(const Expr& e) {
    if (e.kind == Expr::Kind::Int || e.kind == Expr::Kind::Float || e.kind == Expr::Kind::Ident) return e;
    Expr out = e;
    for (auto& a : out.args) a = fold(a);
    bool all_const = std::all_of(out.args.begin(), out.args.end(), [](const Expr& a) {
        return a.kind == Expr::Kind::Int;
    });
    if (all_const) {
        auto r = evaluate(out, [](std::string_view) { return std::optional<Value>{}; });
        if (auto* v = std::get_if<Value>(&r); v && !v->is_float) return Expr::integer(v->i, e.span);
        return out;
    }
    if (out.kind == Expr::Kind::Binary) {
        auto l = as_constant(out.args[0]);
        auto r = as_constant(out.args[1]);
        switch (out.op) {
            case '+':
                if (l && *l == 0) return out.args[1];
                if (r && *r == 0) return out.args[0];
                break;
            case '-':
                if (r && *r == 0) return out.args[0];
                if (out.args[0] == out.args[1]) return Expr::integer(0, e.span);
                break;
            case '*':
                if (l && *l == 1) return out.args[1];
                if (r && *r == 1) return out.args[0];
                break;
            case '/':
                if (r && *r == 1) return out.args[0];
                break;
            default: break;
        }
        // (a + k) - a  =>  k, the common shape of slice lengths.
        if (out.op == '-' && out.args[0].kind == Expr::Kind::Binary && out.args[0].op == '+' &&
            out.args[0].args[0] == out.args[1]) {
            return out.args[0].args[1];
        }
    }
    return out;
}

}  // namespace adsl::dsl
