#include "adsl/dsl/expr.hpp"
#include "adsl/lowering/passes.hpp"
#include "adsl/semantic/alignment.hpp"

namespace adsl::lowering {

using dsl::Expr;
using target::Instr;

namespace {

Expr sub(Expr a, Expr b) { return dsl::fold(Expr::binary('-', std::move(a), std::move(b))); }
Expr mul(Expr a, int64_t b) { return dsl::fold(Expr::binary('*', std::move(a), Expr::integer(b))); }

target::PadParams pad_params(const Instr& i, int64_t elem_size) {
    const bool load = i.op == dsl::Op::CopyG2L;
    const dsl::Operand& g = i.operands[load ? 1 : 0];
    const bool two_d = i.operands.size() == 4;
    target::PadParams p;
    p.elem_count = sub(g.end, g.begin);
    p.byte_len = mul(p.elem_count, elem_size);
    const Expr padded = dsl::fold(Expr::call("align_up", {p.byte_len, Expr::integer(32)}));
    p.right_pad = sub(padded, p.byte_len);
    p.block_count = two_d ? i.operands[2].scalar : Expr::integer(1);
    const Expr global_stride = two_d ? mul(i.operands[3].scalar, elem_size) : Expr::integer(0);
    const Expr local_stride = two_d ? padded : Expr::integer(0);
    p.src_stride = load ? global_stride : local_stride;
    p.dst_stride = load ? local_stride : global_stride;
    return p;
}

void rewrite(std::vector<Instr>& body, const std::set<int>& sites, const std::map<std::string, int64_t>& sizes) {
    for (auto& i : body) {
        rewrite(i.body, sites, sizes);
        if (i.kind != Instr::Kind::DataCopy || !sites.count(i.site)) continue;
        const dsl::Operand& g = i.operands[i.op == dsl::Op::CopyG2L ? 1 : 0];
        i.kind = Instr::Kind::DataCopyPad;
        i.pad = pad_params(i, sizes.at(g.name));
    }
}

}  // namespace

target::TargetUnit pad_sites(target::TargetUnit t, const std::set<int>& sites) {
    std::map<std::string, int64_t> sizes;
    for (const auto& f : t.kernel_state) {
        if (f.kind == target::FieldKind::Global) sizes[f.name] = dsl::dtype_size(f.dtype);
    }
    for (auto& fn : t.stage_fns) rewrite(fn.body, sites, sizes);
    return t;
}

target::TargetUnit pass_alignment(const dsl::Program& p, target::TargetUnit t, const vm::NpuConfig& cfg) {
    return pad_sites(std::move(t), semantic::analyze_alignment(p, cfg).unaligned_sites());
}

}  // namespace adsl::lowering
