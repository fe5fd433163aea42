#include <set>

#include "adsl/dsl/primitives.hpp"
#include "adsl/rules.hpp"
#include "adsl/semantic/checks.hpp"
#include "adsl/semantic/walker.hpp"

namespace adsl::semantic {

using namespace adsl::dsl;

namespace {

void check_roles(const Program& p, Diagnostics& diags) {
    const KernelFn& k = p.kernel;
    auto role_of = [&](const Operand& o) -> std::optional<BufferRole> {
        if (o.kind != Operand::Kind::Slice) return std::nullopt;
        const BufferDecl* d = k.find_buffer(o.name);
        if (!d) return std::nullopt;
        return d->role;
    };
    auto err = [&](const Span& span, std::string msg) {
        diags.push_back(make_error(std::string(rules::kBufRole), span, std::move(msg)));
    };
    for_each_stmt(k.body, [&](const Stmt& s) {
        auto* c = std::get_if<PrimitiveCall>(&s.node);
        if (!c) return;
        if (c->op == Op::CopyG2L) {
            auto r = role_of(c->args[0]);
            if (r && *r != BufferRole::StreamIn)
                err(c->args[0].span, "copy_g2l must load into a stream_in buffer, '" + c->args[0].name + "' is " +
                                         std::string(buffer_role_name(*r)));
            return;
        }
        if (c->op == Op::CopyL2G) {
            auto r = role_of(c->args[1]);
            if (r && *r != BufferRole::StreamOut)
                err(c->args[1].span, "copy_l2g must store from a stream_out buffer, '" + c->args[1].name + "' is " +
                                         std::string(buffer_role_name(*r)));
            for (std::size_t i = 0; i < k.params.size() && i < p.host.launch.args.size(); ++i) {
                if (k.params[i].name != c->args[0].name) continue;
                const TensorParam* t = p.find_tensor(p.host.launch.args[i].name);
                if (t && t->role == TensorRole::In)
                    err(c->args[0].span, "copy_l2g writes input tensor '" + t->name + "'");
            }
            return;
        }
        for (std::size_t i = 0; i < c->args.size(); ++i) {
            auto r = role_of(c->args[i]);
            if (!r) continue;
            if (operand_is_write(c->op, i) && *r == BufferRole::StreamIn)
                err(c->args[i].span, "stream_in buffer '" + c->args[i].name + "' is written outside a copyin block");
            if (operand_is_read(c->op, i) && *r == BufferRole::StreamOut)
                err(c->args[i].span, "stream_out buffer '" + c->args[i].name + "' is read outside a copyout block");
        }
    });
}

class BoundsVisitor : public KernelVisitor {
  public:
    BoundsVisitor(const KernelContext& ctx, std::set<std::pair<int, std::string>>& seen, Diagnostics& diags)
        : ctx_(ctx), seen_(seen), diags_(diags) {}

    void primitive(const PrimInstance& inst) override {
        const PrimitiveCall& c = *inst.call;
        const PrimitiveInfo& info = primitive_info(c.op);
        if (is_transfer(c.op)) {
            transfer(inst);
            return;
        }
        for (std::size_t i = 0; i < inst.slices.size(); ++i) {
            if (!inst.slices[i].name.empty()) bounds(inst, i);
        }
        const SliceValue& dst = inst.slices[0];
        auto count = [&](std::string msg) { report(inst, rules::kBufCount, std::move(msg)); };
        switch (info.rule) {
            case ElementRule::SameLength:
                for (std::size_t i = 0; i < inst.slices.size(); ++i) {
                    const SliceValue& s = inst.slices[i];
                    if (s.name.empty()) continue;
                    if (s.len() != dst.len()) {
                        count(std::string(info.name) + " operand '" + s.name + "' has " + std::to_string(s.len()) +
                              " elements, destination has " + std::to_string(dst.len()));
                        return;
                    }
                }
                if (dst.len() <= 0) count(std::string(info.name) + " on an empty slice");
                break;
            case ElementRule::Reduce:
                if (dst.len() < 1 || inst.slices[1].len() < 1) count(std::string(info.name) + " needs non-empty slices");
                break;
            case ElementRule::BroadcastFirst:
                if (inst.slices[1].len() != 1) count("broadcast source must have exactly 1 element");
                else if (dst.len() < 1) count("broadcast destination is empty");
                break;
            case ElementRule::Fill:
                if (dst.len() < 1) count("memset destination is empty");
                break;
            case ElementRule::Transfer: break;
        }
    }

  private:
    void report(const PrimInstance& inst, std::string_view rule, std::string msg) {
        if (!seen_.insert({inst.call->site.value, std::string(rule)}).second) return;
        diags_.push_back(make_error(std::string(rule), inst.stmt->span, std::move(msg)));
    }

    int64_t limit(const SliceValue& s) const {
        if (s.global) return ctx_.plan->numel(ctx_.tensor(s.name));
        return ctx_.buffer(s.name).capacity;
    }

    bool bounds(const PrimInstance& inst, std::size_t i) {
        const SliceValue& s = inst.slices[i];
        const int64_t lim = limit(s);
        if (s.begin < 0 || s.end < s.begin || s.end > lim) {
            report(inst, rules::kBufSliceOob,
                   "slice " + s.name + "[" + std::to_string(s.begin) + ".." + std::to_string(s.end) +
                       "] is outside its " + std::to_string(lim) + " elements" +
                       (ctx_.plan->shape.empty() ? "" : " for shape " + shape_to_string(ctx_.plan->shape)));
            return false;
        }
        return true;
    }

    void transfer(const PrimInstance& inst) {
        const bool load = inst.call->op == Op::CopyG2L;
        const std::size_t li = load ? 0 : 1, gi = load ? 1 : 0;
        const SliceValue& local = inst.slices[li];
        const SliceValue& global = inst.slices[gi];
        const DType dt = ctx_.dtype_of(local);
        const int64_t size = dtype_size(dt);
        auto count = [&](std::string msg) { report(inst, rules::kBufCount, std::move(msg)); };
        if (!bounds(inst, li)) return;
        if ((local.begin * size) % 32 != 0) {
            report(inst, rules::kBufLocalAlign,
                   "local slice of '" + local.name + "' starts at byte " + std::to_string(local.begin * size) +
                       ", not a 32-byte boundary");
            return;
        }
        if (!inst.two_d) {
            if (!bounds(inst, gi)) return;
            if (global.len() <= 0) count("empty transfer");
            else if (local.len() != global.len())
                count("transfer moves " + std::to_string(global.len()) + " global elements into a local slice of " +
                      std::to_string(local.len()));
            return;
        }
        const int64_t cols = global.len();
        if (cols <= 0 || inst.rows < 1 || inst.stride < cols) {
            count("2-D transfer needs cols >= 1, rows >= 1 and stride >= cols (got " + std::to_string(cols) + ", " +
                  std::to_string(inst.rows) + ", " + std::to_string(inst.stride) + ")");
            return;
        }
        const int64_t pitch = row_pitch_elems(cols, dt);
        if (local.len() != inst.rows * pitch) {
            count("2-D transfer of " + std::to_string(inst.rows) + " rows x " + std::to_string(cols) +
                  " needs a local slice of rows * " + std::to_string(pitch) + " = " + std::to_string(inst.rows * pitch) +
                  " elements, got " + std::to_string(local.len()));
            return;
        }
        const int64_t lim = limit(global);
        int64_t last = 0;
        if (global.begin < 0 || __builtin_mul_overflow(inst.rows - 1, inst.stride, &last) ||
            __builtin_add_overflow(last, global.begin + cols, &last) || last > lim) {
            report(inst, rules::kBufSliceOob,
                   "2-D transfer on '" + global.name + "' reaches past its " + std::to_string(lim) + " elements");
        }
    }

    const KernelContext& ctx_;
    std::set<std::pair<int, std::string>>& seen_;
    Diagnostics& diags_;
};

}  // namespace

Diagnostics check_buffers(const Program& p, const vm::NpuConfig& cfg) {
    Diagnostics diags;
    check_roles(p, diags);
    if (has_errors(diags)) return diags;

    std::set<std::pair<int, std::string>> seen;
    std::set<std::string> budget_reported;
    for (const auto& shape : declared_shapes(p)) {
        auto plan = eval_host(p, shape, cfg);
        if (!plan.ok()) continue;  // reported by check_tiling
        auto ctx = make_context(p, *plan);
        if (!ctx.ok()) {
            for (auto& d : ctx.diagnostics) diags.push_back(d);
            continue;
        }
        int64_t ub = 0, l1 = 0;
        for (const auto& [name, info] : ctx->buffers) {
            int64_t depth = 1;
            if (info.decl->role == BufferRole::StreamIn) depth = cfg.queue_depth_in;
            if (info.decl->role == BufferRole::StreamOut) depth = cfg.queue_depth_out;
            int64_t bytes = info.capacity * dtype_size(info.decl->dtype) * depth;
            (info.decl->space == MemSpace::UB ? ub : l1) += bytes;
        }
        auto over = [&](std::string_view rule, int64_t total, int64_t cap, const char* what) {
            if (total <= cap || !budget_reported.insert(std::string(rule)).second) return;
            diags.push_back(make_error(std::string(rule), p.kernel.span,
                                       std::string(what) + " buffers need " + std::to_string(total) + " bytes but " +
                                           std::to_string(cap) + " are available for shape " + shape_to_string(shape),
                                       std::string("shrink tile capacities or queue depth")));
        };
        over(rules::kBufUbOverflow, ub, cfg.ub_bytes, "UB");
        over(rules::kBufL1Overflow, l1, cfg.l1_bytes, "L1");

        BoundsVisitor v(*ctx, seen, diags);
        int64_t budget = kDefaultStepBudget;
        for (std::size_t seg = 0; seg < ctx->segments.size(); ++seg) {
            for (int64_t b = 0; b < plan->num_blocks; ++b) {
                auto d = walk_segment(*ctx, b, seg, v, budget);
                if (!d.empty()) {
                    for (auto& x : d) diags.push_back(x);
                    return diags;
                }
            }
        }
    }
    return diags;
}

}  // namespace adsl::semantic
