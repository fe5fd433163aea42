#include "adsl/dsl/primitives.hpp"

#include <array>

namespace adsl::dsl {

namespace {

using OC = OperandClass;

constexpr OC kG2L[] = {OC::Local, OC::Global};
constexpr OC kG2L2D[] = {OC::Local, OC::Global, OC::Scalar, OC::Scalar};
constexpr OC kL2G[] = {OC::Global, OC::Local};
constexpr OC kL2G2D[] = {OC::Global, OC::Local, OC::Scalar, OC::Scalar};
constexpr OC kBinary[] = {OC::Local, OC::Local, OC::Local};
constexpr OC kUnary[] = {OC::Local, OC::Local};
constexpr OC kScalarOp[] = {OC::Local, OC::Local, OC::Scalar};
constexpr OC kSelect[] = {OC::Local, OC::Mask, OC::Local, OC::Local};
constexpr OC kFill[] = {OC::Local, OC::Scalar};

constexpr std::span<const OC> kNone{};

const std::array<PrimitiveInfo, 21> kTable = {{
    {Op::CopyG2L, "copy_g2l", "DataCopy", kG2L, kG2L2D, ElementRule::Transfer, false},
    {Op::CopyL2G, "copy_l2g", "DataCopy", kL2G, kL2G2D, ElementRule::Transfer, false},
    {Op::VAdd, "vadd", "Add", kBinary, kNone, ElementRule::SameLength, false},
    {Op::VSub, "vsub", "Sub", kBinary, kNone, ElementRule::SameLength, false},
    {Op::VMul, "vmul", "Mul", kBinary, kNone, ElementRule::SameLength, false},
    {Op::VDiv, "vdiv", "Div", kBinary, kNone, ElementRule::SameLength, true},
    {Op::VExp, "vexp", "Exp", kUnary, kNone, ElementRule::SameLength, true},
    {Op::VLn, "vln", "Ln", kUnary, kNone, ElementRule::SameLength, true},
    {Op::VAbs, "vabs", "Abs", kUnary, kNone, ElementRule::SameLength, false},
    {Op::VMax, "vmax", "Max", kBinary, kNone, ElementRule::SameLength, false},
    {Op::VMin, "vmin", "Min", kBinary, kNone, ElementRule::SameLength, false},
    {Op::VRelu, "vrelu", "Relu", kUnary, kNone, ElementRule::SameLength, false},
    {Op::AddS, "adds", "Adds", kScalarOp, kNone, ElementRule::SameLength, false},
    {Op::MulS, "muls", "Muls", kScalarOp, kNone, ElementRule::SameLength, false},
    {Op::MaxS, "maxs", "Maxs", kScalarOp, kNone, ElementRule::SameLength, false},
    {Op::VSel, "vsel", "Select", kSelect, kNone, ElementRule::SameLength, false},
    {Op::ReduceSum, "reduce_sum", "ReduceSum", kUnary, kNone, ElementRule::Reduce, false},
    {Op::ReduceMax, "reduce_max", "ReduceMax", kUnary, kNone, ElementRule::Reduce, false},
    {Op::Broadcast, "broadcast", "Broadcast", kUnary, kNone, ElementRule::BroadcastFirst, false},
    {Op::Memset, "memset", "Duplicate", kFill, kNone, ElementRule::Fill, false},
    {Op::Cast, "cast", "Cast", kUnary, kNone, ElementRule::SameLength, false},
}};

}  // namespace

const PrimitiveInfo& primitive_info(Op op) {
    for (const auto& p : kTable) {
        if (p.op == op) return p;
    }
    throw InternalError("primitive_info: op missing from table");
}

std::optional<Op> find_primitive(std::string_view name) {
    for (const auto& p : kTable) {
        if (p.name == name) return p.op;
    }
    return std::nullopt;
}

std::span<const PrimitiveInfo> all_primitives() { return kTable; }

bool is_transfer(Op op) { return op == Op::CopyG2L || op == Op::CopyL2G; }
bool is_compute(Op op) { return !is_transfer(op); }

int64_t row_pitch_elems(int64_t cols, DType t) {
    const int64_t size = dtype_size(t);
    const int64_t bytes = cols * size;
    const int64_t padded = (bytes + 31) / 32 * 32;
    return padded / size;
}

}  // namespace adsl::dsl
