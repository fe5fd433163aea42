#include "adsl/semantic/symbols.hpp"

#include <algorithm>
#include <map>

#include "adsl/dsl/primitives.hpp"
#include "adsl/rules.hpp"

namespace adsl::semantic {

using namespace adsl::dsl;

std::string_view symbol_kind_name(SymbolKind k) {
    switch (k) {
        case SymbolKind::TensorParam: return "tensor";
        case SymbolKind::ShapeDim: return "shape dim";
        case SymbolKind::TilingParam: return "tiling parameter";
        case SymbolKind::Builtin: return "builtin";
        case SymbolKind::KernelTensor: return "kernel tensor";
        case SymbolKind::KernelScalar: return "kernel scalar";
        case SymbolKind::Buffer: return "buffer";
        case SymbolKind::LoopVar: return "loop variable";
        case SymbolKind::LetScalar: return "scalar";
    }
    return "?";
}

const Symbol* SymbolTable::find_host(std::string_view name) const {
    for (const auto& s : entries) {
        if (!s.in_kernel && s.name == name) return &s;
    }
    return nullptr;
}

const Symbol* SymbolTable::find_kernel_global(std::string_view name) const {
    for (const auto& s : entries) {
        if (s.in_kernel && s.name == name &&
            (s.kind == SymbolKind::KernelTensor || s.kind == SymbolKind::KernelScalar ||
             s.kind == SymbolKind::Buffer || s.kind == SymbolKind::Builtin))
            return &s;
    }
    return nullptr;
}

std::size_t SymbolTable::count(SymbolKind k) const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [&](const Symbol& s) { return s.kind == k; }));
}

bool kernel_param_is_tensor(const Program& p, std::size_t i) {
    if (i >= p.host.launch.args.size()) return false;
    const Expr& a = p.host.launch.args[i];
    return a.kind == Expr::Kind::Ident && p.find_tensor(a.name) != nullptr;
}

namespace {

bool is_scalar_kind(SymbolKind k) {
    return k == SymbolKind::ShapeDim || k == SymbolKind::TilingParam || k == SymbolKind::Builtin ||
           k == SymbolKind::KernelScalar || k == SymbolKind::LoopVar || k == SymbolKind::LetScalar;
}

class Resolver {
  public:
    explicit Resolver(const Program& p) : p_(p) {}

    Outcome<SymbolTable> run() {
        host();
        kernel();
        Outcome<SymbolTable> out;
        out.diagnostics = std::move(diags_);
        if (!has_errors(out.diagnostics)) out.value = std::move(table_);
        return out;
    }

  private:
    void error(std::string_view rule, const Span& span, std::string msg) {
        diags_.push_back(make_error(std::string(rule), span, std::move(msg)));
    }

    // ---- host -------------------------------------------------------------
    const Symbol* host_lookup(std::string_view n) const {
        for (const auto& s : table_.entries) {
            if (!s.in_kernel && s.name == n) return &s;
        }
        return nullptr;
    }

    void declare_host(const std::string& name, SymbolKind kind, const Span& span) {
        if (host_lookup(name)) {
            error(rules::kSemDup, span, "'" + name + "' is already declared in the host function");
            return;
        }
        table_.entries.push_back(Symbol{name, kind, false, span});
    }

    // Host scalar expression: dims, tiling parameters and CORES.
    void host_scalar_expr(const Expr& e, bool allow_tiling) {
        if (e.kind == Expr::Kind::Ident) {
            const Symbol* s = host_lookup(e.name);
            if (!s) {
                error(rules::kSemUndef, e.span, "undefined identifier '" + e.name + "'");
            } else if (s->kind == SymbolKind::TensorParam) {
                error(rules::kSemKind, e.span, "tensor '" + e.name + "' used where a scalar is expected");
            } else if (!allow_tiling && s->kind == SymbolKind::TilingParam) {
                error(rules::kSemKind, e.span, "tiling parameter '" + e.name + "' cannot size an input tensor");
            }
            return;
        }
        for (const auto& a : e.args) host_scalar_expr(a, allow_tiling);
    }

    void host() {
        const HostFn& h = p_.host;
        table_.entries.push_back(Symbol{std::string(kHostCores), SymbolKind::Builtin, false, {}});
        std::vector<const TensorParam*> deferred;
        for (const auto& t : h.params) {
            declare_host(t.name, SymbolKind::TensorParam, t.span);
            if (t.dims.empty()) error(rules::kSemShape, t.span, "tensor '" + t.name + "' has no dimensions");
            if (t.role != TensorRole::In) {
                deferred.push_back(&t);
                continue;
            }
            for (const auto& d : t.dims) {
                if (d.kind == Expr::Kind::Int) continue;
                if (d.kind != Expr::Kind::Ident) {
                    error(rules::kSemShape, d.span, "input tensor dims must be literals or dimension names");
                    continue;
                }
                const Symbol* s = host_lookup(d.name);
                if (!s) {
                    table_.entries.push_back(Symbol{d.name, SymbolKind::ShapeDim, false, d.span});
                } else if (s->kind != SymbolKind::ShapeDim) {
                    error(rules::kSemKind, d.span, "'" + d.name + "' is a " + std::string(symbol_kind_name(s->kind)) +
                                                       ", not a dimension name");
                }
            }
        }
        for (const auto& t : h.tiling) declare_host(t.name, SymbolKind::TilingParam, t.span);
        for (const auto& t : h.tiling) host_scalar_expr(t.expr, true);
        for (const auto* t : deferred) {
            for (const auto& d : t->dims) host_scalar_expr(d, true);
        }

        std::vector<std::string> dims;
        for (const auto& s : table_.entries) {
            if (s.kind == SymbolKind::ShapeDim) dims.push_back(s.name);
        }
        for (const auto& sd : h.shapes) {
            std::vector<std::string> seen;
            for (const auto& [name, value] : sd.bindings) {
                const Symbol* s = host_lookup(name);
                if (!s || s->kind != SymbolKind::ShapeDim) {
                    error(rules::kSemUndef, sd.span, "shape binds '" + name + "', which is not a dimension name");
                } else if (std::find(seen.begin(), seen.end(), name) != seen.end()) {
                    error(rules::kSemDup, sd.span, "shape binds '" + name + "' twice");
                }
                seen.push_back(name);
            }
            for (const auto& d : dims) {
                if (std::find(seen.begin(), seen.end(), d) == seen.end())
                    error(rules::kSemShape, sd.span, "shape does not bind dimension '" + d + "'");
            }
        }
        if (h.shapes.empty() && !dims.empty())
            error(rules::kSemShape, h.span, "host function has symbolic dims but declares no shape");

        const LaunchStmt& l = h.launch;
        host_scalar_expr(l.num_blocks, true);
        if (l.domain) host_scalar_expr(*l.domain, true);
        for (const auto& a : l.args) {
            if (a.kind == Expr::Kind::Ident) {
                const Symbol* s = host_lookup(a.name);
                if (!s) error(rules::kSemUndef, a.span, "undefined identifier '" + a.name + "'");
                continue;
            }
            host_scalar_expr(a, true);
        }
    }

    // ---- kernel -----------------------------------------------------------
    struct Scope {
        std::map<std::string, SymbolKind> names;
    };
    std::size_t top_scope_ = 0;

    std::optional<SymbolKind> kernel_lookup(std::string_view n) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->names.find(std::string(n));
            if (f != it->names.end()) return f->second;
        }
        return std::nullopt;
    }

    void declare_kernel(const std::string& name, SymbolKind kind, const Span& span) {
        if (kernel_lookup(name)) {
            error(rules::kSemDup, span, "'" + name + "' is already declared in the kernel");
            return;
        }
        scopes_.back().names.emplace(name, kind);
        table_.entries.push_back(Symbol{name, kind, true, span});
    }

    void kernel_scalar_expr(const Expr& e) {
        if (e.kind == Expr::Kind::Ident) {
            auto k = kernel_lookup(e.name);
            if (!k) {
                error(rules::kSemUndef, e.span, "undefined identifier '" + e.name + "'");
            } else if (!is_scalar_kind(*k)) {
                error(rules::kSemKind, e.span,
                      std::string(symbol_kind_name(*k)) + " '" + e.name + "' used where a scalar is expected");
            }
            return;
        }
        for (const auto& a : e.args) kernel_scalar_expr(a);
    }

    void kernel() {
        const KernelFn& k = p_.kernel;
        const LaunchStmt& l = p_.host.launch;
        if (l.kernel != k.name)
            error(rules::kSemUndef, l.span, "launch names kernel '" + l.kernel + "' but the kernel is '" + k.name + "'");
        if (l.args.size() != k.params.size()) {
            error(rules::kSemArity, k.span,
                  "kernel takes " + std::to_string(k.params.size()) + " parameters but launch passes " +
                      std::to_string(l.args.size()));
        }
        scopes_.emplace_back();
        for (auto b : kKernelBuiltins) {
            scopes_.back().names.emplace(std::string(b), SymbolKind::Builtin);
            table_.entries.push_back(Symbol{std::string(b), SymbolKind::Builtin, true, {}});
        }
        for (std::size_t i = 0; i < k.params.size(); ++i) {
            declare_kernel(k.params[i].name,
                           kernel_param_is_tensor(p_, i) ? SymbolKind::KernelTensor : SymbolKind::KernelScalar,
                           k.params[i].span);
        }
        for (const auto& b : k.buffers) {
            declare_kernel(b.name, SymbolKind::Buffer, b.span);
            kernel_scalar_expr(b.capacity);
        }
        scopes_.emplace_back();  // top-level lets; sync_all ends their scope
        top_scope_ = scopes_.size();
        body(k.body);
    }

    void body(const std::vector<Stmt>& stmts) {
        for (const auto& s : stmts) {
            if (auto* c = std::get_if<PrimitiveCall>(&s.node)) {
                primitive(*c, s.span);
            } else if (auto* let = std::get_if<LetStmt>(&s.node)) {
                kernel_scalar_expr(let->value);
                declare_kernel(let->name, SymbolKind::LetScalar, s.span);
            } else if (auto* f = std::get_if<ForStmt>(&s.node)) {
                kernel_scalar_expr(f->begin);
                kernel_scalar_expr(f->end);
                scopes_.emplace_back();
                declare_kernel(f->var, SymbolKind::LoopVar, s.span);
                body(f->body);
                scopes_.pop_back();
            } else if (auto* b = std::get_if<StageBlock>(&s.node)) {
                scopes_.emplace_back();
                body(b->body);
                scopes_.pop_back();
            } else if (std::holds_alternative<SyncStmt>(s.node) && scopes_.size() == top_scope_) {
                scopes_.back().names.clear();
            }
        }
    }

    const TensorParam* kernel_tensor(std::string_view kernel_name) const {
        for (std::size_t i = 0; i < p_.kernel.params.size(); ++i) {
            if (p_.kernel.params[i].name == kernel_name && kernel_param_is_tensor(p_, i))
                return p_.find_tensor(p_.host.launch.args[i].name);
        }
        return nullptr;
    }

    void primitive(const PrimitiveCall& c, const Span& span) {
        const PrimitiveInfo& info = primitive_info(c.op);
        std::span<const OperandClass> classes = info.operands;
        if (c.args.size() != classes.size()) {
            if (!info.operands_2d.empty() && c.args.size() == info.operands_2d.size()) {
                classes = info.operands_2d;
            } else {
                std::string want = std::to_string(info.operands.size());
                if (!info.operands_2d.empty()) want += " or " + std::to_string(info.operands_2d.size());
                error(rules::kSemArity, span,
                      "'" + std::string(info.name) + "' takes " + want + " operands, got " + std::to_string(c.args.size()));
                return;
            }
        }
        std::vector<std::optional<DType>> dtypes(c.args.size());
        bool ok = true;
        for (std::size_t i = 0; i < c.args.size(); ++i) {
            const Operand& o = c.args[i];
            OperandClass want = classes[i];
            if (want == OperandClass::Scalar) {
                if (o.kind != Operand::Kind::Scalar) {
                    error(rules::kSemKind, o.span, "operand " + std::to_string(i + 1) + " of '" + std::string(info.name) +
                                                        "' must be a scalar");
                    ok = false;
                } else {
                    kernel_scalar_expr(o.scalar);
                }
                continue;
            }
            if (o.kind != Operand::Kind::Slice) {
                error(rules::kSemKind, o.span, "operand " + std::to_string(i + 1) + " of '" + std::string(info.name) +
                                                    "' must be a slice");
                ok = false;
                continue;
            }
            kernel_scalar_expr(o.begin);
            kernel_scalar_expr(o.end);
            auto k = kernel_lookup(o.name);
            if (!k) {
                error(rules::kSemUndef, o.span, "undefined buffer or tensor '" + o.name + "'");
                ok = false;
                continue;
            }
            if (want == OperandClass::Global) {
                if (*k != SymbolKind::KernelTensor) {
                    error(rules::kSemKind, o.span, "'" + o.name + "' must be a global tensor");
                    ok = false;
                    continue;
                }
                dtypes[i] = kernel_tensor(o.name)->dtype;
                continue;
            }
            // Local or Mask.
            if (*k == SymbolKind::KernelTensor && is_compute(c.op)) {
                // Global access from a compute primitive: reported by check_staging.
                ok = false;
                continue;
            }
            if (*k != SymbolKind::Buffer) {
                error(rules::kSemKind, o.span, "'" + o.name + "' must be an on-chip buffer");
                ok = false;
                continue;
            }
            const BufferDecl* b = p_.kernel.find_buffer(o.name);
            if (b->space != MemSpace::UB) {
                error(rules::kSemSpace, o.span, "L1 buffer '" + o.name + "' cannot be used by vector primitives");
                ok = false;
                continue;
            }
            if (want == OperandClass::Mask && b->dtype != DType::U8) {
                error(rules::kSemDtype, o.span, "mask operand '" + o.name + "' must be u8");
                ok = false;
                continue;
            }
            if (want == OperandClass::Local) dtypes[i] = b->dtype;
        }
        if (ok) check_dtypes(c, info, dtypes, span);
    }

    void check_dtypes(const PrimitiveCall& c, const PrimitiveInfo& info, const std::vector<std::optional<DType>>& dtypes,
                      const Span& span) {
        std::optional<DType> first;
        for (std::size_t i = 0; i < dtypes.size(); ++i) {
            if (!dtypes[i]) continue;
            if (c.op == Op::Cast) break;
            if (!first) {
                first = dtypes[i];
            } else if (*dtypes[i] != *first) {
                error(rules::kSemDtype, c.args[i].span,
                      "'" + std::string(info.name) + "' operands must share one dtype (" +
                          std::string(dtype_name(*first)) + " vs " + std::string(dtype_name(*dtypes[i])) + ")");
                return;
            }
        }
        if (info.float_only && first && !is_float(*first))
            error(rules::kSemDtype, span, "'" + std::string(info.name) + "' requires f16 or f32 operands");
    }

    const Program& p_;
    SymbolTable table_;
    std::vector<Scope> scopes_;
    Diagnostics diags_;
};

}  // namespace

Outcome<SymbolTable> resolve_symbols(const Program& p) { return Resolver(p).run(); }

}  // namespace adsl::semantic
