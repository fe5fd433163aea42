#include "adsl/semantic/walker.hpp"

#include "adsl/dsl/primitives.hpp"
#include "adsl/rules.hpp"
#include "adsl/semantic/symbols.hpp"

namespace adsl::semantic {

using namespace adsl::dsl;

const BufferInfo& KernelContext::buffer(const std::string& name) const {
    auto it = buffers.find(name);
    if (it == buffers.end()) throw InternalError("unknown buffer " + name);
    return it->second;
}

const std::string& KernelContext::tensor(const std::string& kernel_name) const {
    auto it = tensor_of.find(kernel_name);
    if (it == tensor_of.end()) throw InternalError("unknown kernel tensor " + kernel_name);
    return it->second;
}

DType KernelContext::dtype_of(const SliceValue& s) const {
    if (s.global) return program->find_tensor(tensor(s.name))->dtype;
    return buffer(s.name).decl->dtype;
}

Outcome<KernelContext> make_context(const Program& p, const LaunchPlan& plan) {
    Outcome<KernelContext> out;
    KernelContext ctx;
    ctx.program = &p;
    ctx.plan = &plan;
    const KernelFn& k = p.kernel;
    for (std::size_t i = 0; i < k.params.size() && i < plan.args.size(); ++i) {
        if (plan.args[i].is_tensor) {
            ctx.tensor_of[k.params[i].name] = plan.args[i].tensor;
        } else {
            ctx.scalars[k.params[i].name] = plan.args[i].scalar;
        }
    }
    auto lookup = [&](std::string_view n) -> std::optional<Value> {
        if (n == "num_blocks") return Value::of_int(plan.num_blocks);
        auto it = ctx.scalars.find(std::string(n));
        if (it != ctx.scalars.end()) return it->second;
        return std::nullopt;
    };
    for (const auto& b : k.buffers) {
        auto r = evaluate_int(b.capacity, lookup);
        if (auto* er = std::get_if<EvalError>(&r)) {
            out.diagnostics.push_back(make_error(std::string(rules::kKrnEval), er->span,
                                                 "capacity of '" + b.name + "': " + er->message));
            continue;
        }
        int64_t cap = std::get<int64_t>(r);
        if (cap <= 0 || cap > (int64_t{1} << 40)) {
            out.diagnostics.push_back(make_error(std::string(rules::kBufNonPos), b.capacity.span,
                                                 "capacity of '" + b.name + "' evaluates to " + std::to_string(cap)));
            continue;
        }
        const int64_t size = dtype_size(b.dtype);
        ctx.buffers[b.name] = BufferInfo{&b, cap, align32(cap * size) / size};
    }
    ctx.segments.emplace_back();
    for (const auto& s : k.body) {
        if (std::holds_alternative<SyncStmt>(s.node)) {
            ctx.segments.emplace_back();
        } else {
            ctx.segments.back().push_back(&s);
        }
    }
    if (!has_errors(out.diagnostics)) out.value = std::move(ctx);
    return out;
}

namespace {

class Walker {
  public:
    Walker(const KernelContext& ctx, int64_t block, KernelVisitor& v, int64_t& budget)
        : ctx_(ctx), v_(v), budget_(budget) {
        const BlockRange& r = ctx.plan->per_block_ranges.at(static_cast<std::size_t>(block));
        frames_.push_back({{"block_idx", Value::of_int(block)},
                           {"block_start", Value::of_int(r.start)},
                           {"block_len", Value::of_int(r.len)},
                           {"num_blocks", Value::of_int(ctx.plan->num_blocks)}});
    }

    Diagnostics run(const std::vector<const Stmt*>& stmts) {
        for (const Stmt* s : stmts) {
            if (!step(*s)) break;
        }
        return std::move(diags_);
    }

  private:
    struct Stop {};

    std::optional<Value> lookup(std::string_view n) const {
        for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
            for (const auto& [name, v] : *it) {
                if (name == n) return v;
            }
        }
        auto s = ctx_.scalars.find(std::string(n));
        if (s != ctx_.scalars.end()) return s->second;
        return std::nullopt;
    }

    bool fault(const Span& span, std::string msg) {
        diags_.push_back(make_error(std::string(rules::kKrnEval), span, std::move(msg)));
        return false;
    }

    std::optional<Value> eval(const Expr& e) {
        auto r = evaluate(e, [this](std::string_view n) { return lookup(n); });
        if (auto* er = std::get_if<EvalError>(&r)) {
            fault(er->span, er->message);
            return std::nullopt;
        }
        return std::get<Value>(r);
    }

    std::optional<int64_t> eval_int(const Expr& e) {
        auto v = eval(e);
        if (!v) return std::nullopt;
        if (v->is_float) {
            fault(e.span, "expected an integer expression");
            return std::nullopt;
        }
        return v->i;
    }

    bool body(const std::vector<Stmt>& stmts) {
        for (const auto& s : stmts) {
            if (!step(s)) return false;
        }
        return true;
    }

    bool step(const Stmt& s) {
        if (v_.halted()) return false;
        if (--budget_ < 0) return fault(s.span, "kernel exceeds the analysis step budget");
        if (auto* c = std::get_if<PrimitiveCall>(&s.node)) return primitive(*c, s);
        if (auto* l = std::get_if<LetStmt>(&s.node)) {
            auto v = eval(l->value);
            if (!v) return false;
            frames_.back().emplace_back(l->name, *v);
            v_.let(*l, s, *v);
            return true;
        }
        if (auto* f = std::get_if<ForStmt>(&s.node)) {
            auto b = eval_int(f->begin);
            if (!b) return false;
            auto e = eval_int(f->end);
            if (!e) return false;
            for (int64_t i = *b; i < *e; ++i) {
                frames_.push_back({{f->var, Value::of_int(i)}});
                bool ok = body(f->body);
                frames_.pop_back();
                if (!ok) return false;
            }
            return true;
        }
        if (auto* b = std::get_if<StageBlock>(&s.node)) {
            const StageBlock* outer = stage_;
            stage_ = b;
            v_.enter_stage(*b, s);
            frames_.emplace_back();
            bool ok = body(b->body);
            frames_.pop_back();
            if (ok) v_.exit_stage(*b, s);
            stage_ = outer;
            return ok;
        }
        return true;  // sync_all inside a nested body; placement is checked elsewhere
    }

    bool primitive(const PrimitiveCall& c, const Stmt& s) {
        PrimInstance inst;
        inst.call = &c;
        inst.stmt = &s;
        inst.stage = stage_;
        inst.slices.resize(c.args.size());
        inst.scalars.resize(c.args.size());
        for (std::size_t i = 0; i < c.args.size(); ++i) {
            const Operand& o = c.args[i];
            if (o.kind == Operand::Kind::Slice) {
                auto b = eval_int(o.begin);
                if (!b) return false;
                auto e = eval_int(o.end);
                if (!e) return false;
                inst.slices[i] = SliceValue{o.name, ctx_.tensor_of.count(o.name) > 0, *b, *e};
            } else {
                auto v = eval(o.scalar);
                if (!v) return false;
                inst.scalars[i] = *v;
            }
        }
        if (is_transfer(c.op) && c.args.size() == 4) {
            inst.two_d = true;
            for (std::size_t i : {std::size_t{2}, std::size_t{3}}) {
                if (inst.scalars[i].is_float) return fault(c.args[i].span, "transfer rows and stride must be integers");
            }
            inst.rows = inst.scalars[2].i;
            inst.stride = inst.scalars[3].i;
        }
        v_.primitive(inst);
        return true;
    }

    const KernelContext& ctx_;
    KernelVisitor& v_;
    int64_t& budget_;
    std::vector<std::vector<std::pair<std::string, Value>>> frames_;
    const StageBlock* stage_ = nullptr;
    Diagnostics diags_;
};

}  // namespace

Diagnostics walk_segment(const KernelContext& ctx, int64_t block, std::size_t segment, KernelVisitor& v,
                         int64_t& budget) {
    return Walker(ctx, block, v, budget).run(ctx.segments.at(segment));
}

int64_t local_write_extent(const PrimInstance& t, DType dtype) {
    const int64_t size = dtype_size(dtype);
    const SliceValue& global = t.call->op == Op::CopyG2L ? t.slices[1] : t.slices[0];
    if (t.two_d) return t.rows * row_pitch_elems(global.len(), dtype);
    return align32(global.len() * size) / size;
}

bool operand_is_read(Op op, std::size_t index) {
    if (op == Op::CopyG2L) return index == 1;
    if (op == Op::CopyL2G) return index == 1;
    if (op == Op::Memset) return false;
    return index >= 1;
}

bool operand_is_write(Op op, std::size_t index) { return index == 0 && op != Op::CopyL2G; }

StageIo stage_io(const KernelFn& k, const StageBlock& b) {
    StageIo io;
    for_each_stmt(b.body, [&](const Stmt& s) {
        auto* c = std::get_if<PrimitiveCall>(&s.node);
        if (!c) return;
        const PrimitiveInfo& info = primitive_info(c->op);
        for (std::size_t i = 0; i < c->args.size() && i < info.operands.size() + 2; ++i) {
            const Operand& o = c->args[i];
            if (o.kind != Operand::Kind::Slice) continue;
            const BufferDecl* d = k.find_buffer(o.name);
            if (!d || d->role == BufferRole::Temp) continue;
            if (operand_is_write(c->op, i)) io.writes.insert(o.name);
            if (operand_is_read(c->op, i)) io.reads.insert(o.name);
        }
    });
    return io;
}

// ---- StreamTracker ----------------------------------------------------------

StreamTracker::StreamTracker(const KernelContext& ctx) : ctx_(ctx) {
    for (const auto& [name, info] : ctx.buffers) {
        if (info.decl->role == BufferRole::Temp) continue;
        pending_[name] = false;
        valid_[name].assign(static_cast<std::size_t>(info.alloc_elems), false);
    }
}

void StreamTracker::enter_stage(const StageBlock& b, const Stmt& s) {
    auto [it, inserted] = io_.try_emplace(&b);
    if (inserted) it->second = stage_io(ctx_.program->kernel, b);
    const StageIo& io = it->second;
    for (const auto& name : io.reads) {
        if (!pending_.count(name)) continue;
        if (!pending_[name]) {
            violations_.push_back({rules::kStgUseBeforeDef,
                                   std::string(stage_kind_name(b.kind)) + " block '" + b.label + "' consumes '" + name +
                                       "' before any stage produced it",
                                   s.span});
        }
    }
    for (const auto& name : io.writes) {
        if (!pending_.count(name)) continue;
        if (pending_[name]) {
            violations_.push_back({rules::kStgUnconsumed,
                                   std::string(stage_kind_name(b.kind)) + " block '" + b.label + "' produces '" + name +
                                       "' again before its previous contents were consumed",
                                   s.span});
        }
        std::fill(valid_[name].begin(), valid_[name].end(), false);
    }
}

void StreamTracker::exit_stage(const StageBlock& b) {
    const StageIo& io = io_.at(&b);
    for (const auto& name : io.reads) {
        if (pending_.count(name)) pending_[name] = false;
    }
    for (const auto& name : io.writes) {
        if (pending_.count(name)) pending_[name] = true;
    }
}

void StreamTracker::read(const std::string& buf, int64_t begin, int64_t end, const Span& span) {
    auto it = valid_.find(buf);
    if (it == valid_.end()) return;
    auto& lanes = it->second;
    for (int64_t i = begin; i < end; ++i) {
        if (i < 0 || i >= static_cast<int64_t>(lanes.size()) || !lanes[static_cast<std::size_t>(i)]) {
            violations_.push_back({rules::kStgUseBeforeDef,
                                   "element " + std::to_string(i) + " of '" + buf +
                                       "' is read before the current stage instance wrote it",
                                   span});
            return;
        }
    }
}

void StreamTracker::write(const std::string& buf, int64_t begin, int64_t end) {
    auto it = valid_.find(buf);
    if (it == valid_.end()) return;
    auto& lanes = it->second;
    for (int64_t i = std::max<int64_t>(begin, 0); i < end && i < static_cast<int64_t>(lanes.size()); ++i)
        lanes[static_cast<std::size_t>(i)] = true;
}

void StreamTracker::primitive(const PrimInstance& inst) {
    const Op op = inst.call->op;
    const Span& span = inst.stmt->span;
    if (op == Op::CopyG2L) {
        const SliceValue& dst = inst.slices[0];
        write(dst.name, dst.begin, dst.begin + local_write_extent(inst, ctx_.dtype_of(dst)));
        return;
    }
    if (op == Op::CopyL2G) {
        const SliceValue& src = inst.slices[1];
        const int64_t cols = inst.slices[0].len();
        if (inst.two_d) {
            const int64_t pitch = row_pitch_elems(cols, ctx_.dtype_of(src));
            for (int64_t r = 0; r < inst.rows; ++r) read(src.name, src.begin + r * pitch, src.begin + r * pitch + cols, span);
        } else {
            read(src.name, src.begin, src.end, span);
        }
        return;
    }
    for (std::size_t i = 1; i < inst.slices.size(); ++i) {
        const SliceValue& s = inst.slices[i];
        if (s.name.empty() || !operand_is_read(op, i)) continue;
        read(s.name, s.begin, s.end, span);
    }
    const SliceValue& dst = inst.slices[0];
    const ElementRule rule = primitive_info(op).rule;
    write(dst.name, dst.begin, rule == ElementRule::Reduce ? dst.begin + 1 : dst.end);
}

void StreamTracker::end_segment(const Span& span) {
    for (auto& [name, pending] : pending_) {
        if (pending) {
            violations_.push_back({rules::kStgUnconsumed, "'" + name + "' is produced but never consumed", span});
            pending = false;
        }
    }
}

}  // namespace adsl::semantic
