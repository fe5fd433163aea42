#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "adsl/diagnostic.hpp"

namespace adsl::dsl {

enum class DType { F16, F32, I32, U8 };

int64_t dtype_size(DType t);
std::string_view dtype_name(DType t);
std::optional<DType> parse_dtype(std::string_view s);
bool is_float(DType t);

/// Integer/float expression. Host tiling math and kernel scalar math share it.
struct Expr {
    enum class Kind { Int, Float, Ident, Neg, Binary, Call };

    Kind kind = Kind::Int;
    int64_t int_value = 0;
    double float_value = 0.0;
    std::string name;  // identifier, or called function for Kind::Call
    char op = 0;       // one of + - * / % for Kind::Binary
    std::vector<Expr> args;
    Span span;

    bool operator==(const Expr&) const = default;

    static Expr integer(int64_t v, Span s = {});
    static Expr floating(double v, Span s = {});
    static Expr ident(std::string n, Span s = {});
    static Expr neg(Expr e, Span s = {});
    static Expr binary(char op, Expr l, Expr r, Span s = {});
    static Expr call(std::string fn, std::vector<Expr> args, Span s = {});

    bool is_int_literal() const { return kind == Kind::Int; }
};

/// Identity of a primitive call site, assigned in source pre-order by the
/// parser. Like spans, excluded from structural equality.
struct SiteId {
    int value = -1;
    friend bool operator==(const SiteId&, const SiteId&) { return true; }
};

// ---- host side -------------------------------------------------------------

enum class TensorRole { In, Out, Work };

struct TensorParam {
    std::string name;
    TensorRole role = TensorRole::In;
    std::vector<Expr> dims;
    DType dtype = DType::F32;
    Span span;
    bool operator==(const TensorParam&) const = default;
};

struct TilingDecl {
    std::string name;
    Expr expr;
    std::string rationale;
    Span span;
    bool operator==(const TilingDecl&) const = default;
};

/// One concrete instantiation of the symbolic dims, e.g. `shape R = 64, C = 512`.
struct ShapeDecl {
    std::vector<std::pair<std::string, int64_t>> bindings;
    Span span;
    bool operator==(const ShapeDecl&) const = default;
};

struct LaunchStmt {
    std::string kernel;
    Expr num_blocks;
    std::vector<Expr> args;
    std::optional<Expr> domain;  // workload split across blocks; defaults to num_blocks
    Span span;
    bool operator==(const LaunchStmt&) const = default;
};

struct HostFn {
    std::string name;
    std::vector<TensorParam> params;
    std::vector<ShapeDecl> shapes;
    std::vector<TilingDecl> tiling;
    LaunchStmt launch;
    Span span;
    bool operator==(const HostFn&) const = default;
};

// ---- kernel side -----------------------------------------------------------

enum class MemSpace { UB, L1 };
enum class BufferRole { StreamIn, StreamOut, Temp };
enum class StageKind { CopyIn, Compute, CopyOut };

std::string_view stage_kind_name(StageKind k);      // "CopyIn", "Compute", "CopyOut"
std::string_view stage_keyword(StageKind k);        // "copyin", ...
std::string_view buffer_role_name(BufferRole r);    // "stream_in", ...
std::string_view mem_space_keyword(MemSpace s);     // "alloc_ub", "alloc_l1"

struct KernelParam {
    std::string name;
    Span span;
    bool operator==(const KernelParam&) const = default;
};

struct BufferDecl {
    std::string name;
    MemSpace space = MemSpace::UB;
    DType dtype = DType::F32;
    Expr capacity;
    BufferRole role = BufferRole::Temp;
    Span span;
    bool operator==(const BufferDecl&) const = default;
};

enum class Op {
    CopyG2L, CopyL2G,
    VAdd, VSub, VMul, VDiv, VExp, VLn, VAbs, VMax, VMin, VRelu,
    AddS, MulS, MaxS,
    VSel, ReduceSum, ReduceMax, Broadcast, Memset, Cast,
};

/// A primitive argument: either a half-open slice `name[begin..end]` of a
/// buffer or global tensor, or a scalar expression.
struct Operand {
    enum class Kind { Slice, Scalar };
    Kind kind = Kind::Scalar;
    std::string name;
    Expr begin;
    Expr end;
    Expr scalar;
    Span span;
    bool operator==(const Operand&) const = default;
};

struct PrimitiveCall {
    Op op = Op::VAdd;
    std::vector<Operand> args;
    SiteId site;
    bool operator==(const PrimitiveCall&) const = default;
};

struct Stmt;

struct LetStmt {
    std::string name;
    Expr value;
    bool operator==(const LetStmt&) const = default;
};

struct ForStmt {
    std::string var;
    Expr begin;
    Expr end;
    std::vector<Stmt> body;
    bool operator==(const ForStmt&) const;
};

struct StageBlock {
    StageKind kind = StageKind::Compute;
    std::string label;
    std::vector<Stmt> body;
    bool operator==(const StageBlock&) const;
};

struct SyncStmt {
    bool operator==(const SyncStmt&) const = default;
};

struct Stmt {
    std::variant<PrimitiveCall, LetStmt, ForStmt, StageBlock, SyncStmt> node;
    Span span;
    bool operator==(const Stmt&) const = default;
};

struct KernelFn {
    std::string name;
    std::vector<KernelParam> params;
    std::vector<BufferDecl> buffers;
    std::vector<Stmt> body;
    Span span;
    bool operator==(const KernelFn&) const = default;

    const BufferDecl* find_buffer(std::string_view n) const;
};

struct Program {
    std::string name;  // the kernel's name
    HostFn host;
    KernelFn kernel;
    bool operator==(const Program&) const = default;

    const TensorParam* find_tensor(std::string_view n) const;
};

struct StageBlockRef {
    StageKind kind;
    std::string label;
    int index;  // dense per kind, source order
    bool operator==(const StageBlockRef&) const = default;
};

/// Stage blocks in source order (descending into loops).
std::vector<StageBlockRef> list_stage_blocks(const KernelFn& k);

/// Calls `fn(const Stmt&)` for every statement, pre-order.
template <class F>
void for_each_stmt(const std::vector<Stmt>& body, F&& fn) {
    for (const auto& s : body) {
        fn(s);
        if (auto* f = std::get_if<ForStmt>(&s.node)) for_each_stmt(f->body, fn);
        if (auto* b = std::get_if<StageBlock>(&s.node)) for_each_stmt(b->body, fn);
    }
}

/// Collects identifiers referenced by an expression, in first-use order.
void collect_idents(const Expr& e, std::vector<std::string>& out);

}  // namespace adsl::dsl
