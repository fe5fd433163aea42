#include "adsl/dsl/ast.hpp"

#include <algorithm>

namespace adsl::dsl {

int64_t dtype_size(DType t) {
    switch (t) {
        case DType::F16: return 2;
        case DType::F32: return 4;
        case DType::I32: return 4;
        case DType::U8: return 1;
    }
    return 0;
}

std::string_view dtype_name(DType t) {
    switch (t) {
        case DType::F16: return "f16";
        case DType::F32: return "f32";
        case DType::I32: return "i32";
        case DType::U8: return "u8";
    }
    return "?";
}

std::optional<DType> parse_dtype(std::string_view s) {
    if (s == "f16") return DType::F16;
    if (s == "f32") return DType::F32;
    if (s == "i32") return DType::I32;
    if (s == "u8") return DType::U8;
    return std::nullopt;
}

bool is_float(DType t) { return t == DType::F16 || t == DType::F32; }

Expr Expr::integer(int64_t v, Span s) {
    Expr e;
    e.kind = Kind::Int;
    e.int_value = v;
    e.span = s;
    return e;
}

Expr Expr::floating(double v, Span s) {
    Expr e;
    e.kind = Kind::Float;
    e.float_value = v;
    e.span = s;
    return e;
}

Expr Expr::ident(std::string n, Span s) {
    Expr e;
    e.kind = Kind::Ident;
    e.name = std::move(n);
    e.span = s;
    return e;
}

Expr Expr::neg(Expr inner, Span s) {
    Expr e;
    e.kind = Kind::Neg;
    e.args.push_back(std::move(inner));
    e.span = s;
    return e;
}

Expr Expr::binary(char op, Expr l, Expr r, Span s) {
    Expr e;
    e.kind = Kind::Binary;
    e.op = op;
    e.args.push_back(std::move(l));
    e.args.push_back(std::move(r));
    e.span = s;
    return e;
}

Expr Expr::call(std::string fn, std::vector<Expr> args, Span s) {
    Expr e;
    e.kind = Kind::Call;
    e.name = std::move(fn);
    e.args = std::move(args);
    e.span = s;
    return e;
}

bool ForStmt::operator==(const ForStmt& o) const {
    return var == o.var && begin == o.begin && end == o.end && body == o.body;
}

bool StageBlock::operator==(const StageBlock& o) const {
    return kind == o.kind && label == o.label && body == o.body;
}

std::string_view stage_kind_name(StageKind k) {
    switch (k) {
        case StageKind::CopyIn: return "CopyIn";
        case StageKind::Compute: return "Compute";
        case StageKind::CopyOut: return "CopyOut";
    }
    return "?";
}

std::string_view stage_keyword(StageKind k) {
    switch (k) {
        case StageKind::CopyIn: return "copyin";
        case StageKind::Compute: return "compute";
        case StageKind::CopyOut: return "copyout";
    }
    return "?";
}

std::string_view buffer_role_name(BufferRole r) {
    switch (r) {
        case BufferRole::StreamIn: return "stream_in";
        case BufferRole::StreamOut: return "stream_out";
        case BufferRole::Temp: return "temp";
    }
    return "?";
}

std::string_view mem_space_keyword(MemSpace s) { return s == MemSpace::UB ? "alloc_ub" : "alloc_l1"; }

const BufferDecl* KernelFn::find_buffer(std::string_view n) const {
    for (const auto& b : buffers) {
        if (b.name == n) return &b;
    }
    return nullptr;
}

const TensorParam* Program::find_tensor(std::string_view n) const {
    for (const auto& t : host.params) {
        if (t.name == n) return &t;
    }
    return nullptr;
}

std::vector<StageBlockRef> list_stage_blocks(const KernelFn& k) {
    std::vector<StageBlockRef> out;
    int counts[3] = {0, 0, 0};
    for_each_stmt(k.body, [&](const Stmt& s) {
        if (auto* b = std::get_if<StageBlock>(&s.node)) {
            int& c = counts[static_cast<int>(b->kind)];
            out.push_back(StageBlockRef{b->kind, b->label, c++});
        }
    });
    return out;
}

void collect_idents(const Expr& e, std::vector<std::string>& out) {
    if (e.kind == Expr::Kind::Ident) {
        if (std::find(out.begin(), out.end(), e.name) == out.end()) out.push_back(e.name);
        return;
    }
    for (const auto& a : e.args) collect_idents(a, out);
}

}  // namespace adsl::dsl
