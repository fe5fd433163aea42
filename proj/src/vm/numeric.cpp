#include "adsl/vm/numeric.hpp"

#include <cmath>
#include <limits>

#include "adsl/diagnostic.hpp"

namespace adsl::vm {

using dsl::DType;
using dsl::Op;

double round_f16(double x) {
    if (std::isnan(x) || x == 0.0) return x;
    const double a = std::fabs(x);
    if (a >= 65520.0) return std::copysign(std::numeric_limits<double>::infinity(), x);
    int e = 0;
    std::frexp(a, &e);  // a = m * 2^e, m in [0.5, 1)
    const int exp = std::max(e - 1, -14);
    const double ulp = std::ldexp(1.0, exp - 10);
    const double q = std::nearbyint(a / ulp);
    return std::copysign(q * ulp, x);
}

uint16_t f16_bits(double x) {
    const double r = round_f16(x);
    const uint16_t sign = std::signbit(r) ? 0x8000 : 0;
    const double a = std::fabs(r);
    if (std::isnan(r)) return 0x7E00;
    if (std::isinf(r)) return sign | 0x7C00;
    if (a == 0.0) return sign;
    int e = 0;
    const double m = std::frexp(a, &e);  // a = m * 2^e
    const int exp = e - 1;
    if (exp < -14) {
        return sign | static_cast<uint16_t>(std::ldexp(a, 24));
    }
    const auto frac = static_cast<uint16_t>(std::ldexp(m * 2.0 - 1.0, 10));
    return sign | static_cast<uint16_t>((exp + 15) << 10) | frac;
}

double f16_from_bits(uint16_t bits) {
    const double sign = (bits & 0x8000) ? -1.0 : 1.0;
    const int exp = (bits >> 10) & 0x1F;
    const int frac = bits & 0x3FF;
    if (exp == 0x1F) return frac ? std::numeric_limits<double>::quiet_NaN() : sign * std::numeric_limits<double>::infinity();
    if (exp == 0) return sign * std::ldexp(frac, -24);
    return sign * std::ldexp(1024 + frac, exp - 25);
}

namespace {

double round_int(double x, double lo, double hi) {
    if (std::isnan(x)) return 0.0;
    const double r = std::nearbyint(x);
    return std::min(std::max(r, lo), hi);
}

}  // namespace

double round_to(DType t, double x) {
    switch (t) {
        case DType::F32: return static_cast<double>(static_cast<float>(x));
        case DType::F16: return round_f16(x);
        case DType::I32: return round_int(x, -2147483648.0, 2147483647.0);
        case DType::U8: return round_int(x, 0.0, 255.0);
    }
    return x;
}

double apply_binary(Op op, double a, double b, DType t) {
    double r = 0.0;
    switch (op) {
        case Op::VAdd:
        case Op::AddS: r = a + b; break;
        case Op::VSub: r = a - b; break;
        case Op::VMul:
        case Op::MulS: r = a * b; break;
        case Op::VDiv: r = a / b; break;
        case Op::VMax:
        case Op::MaxS: r = std::isnan(a) || std::isnan(b) ? std::numeric_limits<double>::quiet_NaN() : std::max(a, b); break;
        case Op::VMin: r = std::isnan(a) || std::isnan(b) ? std::numeric_limits<double>::quiet_NaN() : std::min(a, b); break;
        default: throw InternalError("apply_binary: not a binary op");
    }
    return round_to(t, r);
}

double apply_unary(Op op, double a, DType t) {
    double r = 0.0;
    switch (op) {
        case Op::VExp: r = std::exp(a); break;
        case Op::VLn: r = std::log(a); break;
        case Op::VAbs: r = std::fabs(a); break;
        case Op::VRelu: r = a > 0.0 ? a : 0.0; break;
        case Op::Cast: r = a; break;
        default: throw InternalError("apply_unary: not a unary op");
    }
    return round_to(t, r);
}

double reduce(Op op, std::span<const double> src, DType t) {
    if (src.empty()) throw InternalError("reduce over an empty slice");
    if (op == Op::ReduceSum) {
        double acc = 0.0;
        for (double x : src) acc = round_to(t, acc + x);
        return acc;
    }
    if (op == Op::ReduceMax) {
        double acc = src[0];
        for (double x : src.subspan(1)) acc = apply_binary(Op::VMax, acc, x, t);
        return acc;
    }
    throw InternalError("reduce: not a reduction");
}

}  // namespace adsl::vm

namespace adsl::vm {

void execute_compute(Op op, const std::vector<LocalView>& ops, double scalar) {
    const LocalView& dst = ops.at(0);
    const DType t = dst.dtype;
    std::vector<double> out(static_cast<std::size_t>(dst.len));
    auto src = [&](std::size_t k, int64_t i) { return ops.at(k).data[i]; };
    switch (op) {
        case Op::VAdd:
        case Op::VSub:
        case Op::VMul:
        case Op::VDiv:
        case Op::VMax:
        case Op::VMin:
            for (int64_t i = 0; i < dst.len; ++i) out[i] = apply_binary(op, src(1, i), src(2, i), t);
            break;
        case Op::VExp:
        case Op::VLn:
        case Op::VAbs:
        case Op::VRelu:
        case Op::Cast:
            for (int64_t i = 0; i < dst.len; ++i) out[i] = apply_unary(op, src(1, i), t);
            break;
        case Op::AddS:
        case Op::MulS:
        case Op::MaxS: {
            const double s = round_to(t, scalar);
            for (int64_t i = 0; i < dst.len; ++i) out[i] = apply_binary(op, src(1, i), s, t);
            break;
        }
        case Op::VSel:
            for (int64_t i = 0; i < dst.len; ++i) out[i] = src(1, i) != 0.0 ? src(2, i) : src(3, i);
            break;
        case Op::ReduceSum:
        case Op::ReduceMax:
            dst.data[0] = reduce(op, std::span<const double>(ops.at(1).data, static_cast<std::size_t>(ops.at(1).len)), t);
            return;
        case Op::Broadcast:
            for (int64_t i = 0; i < dst.len; ++i) out[i] = src(1, 0);
            break;
        case Op::Memset: {
            const double s = round_to(t, scalar);
            for (int64_t i = 0; i < dst.len; ++i) out[i] = s;
            break;
        }
        default: throw InternalError("execute_compute: transfer is not a compute primitive");
    }
    std::copy(out.begin(), out.end(), dst.data);
}

}  // namespace adsl::vm
