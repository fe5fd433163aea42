#include "adsl/vm/interpreter.hpp"

#include "adsl/dsl/primitives.hpp"
#include "adsl/rules.hpp"
#include "adsl/vm/numeric.hpp"

namespace adsl::vm {

using namespace adsl::dsl;
using semantic::KernelContext;
using semantic::PrimInstance;
using semantic::SliceValue;

Outcome<LaunchPlan> eval_host(const Program& p, const semantic::ShapeMap& shape, const NpuConfig& cfg) {
    return semantic::eval_host(p, shape, cfg);
}

Outcome<LaunchPlan> plan_for_inputs(const Program& p, const TensorMap& inputs, const NpuConfig& cfg) {
    Outcome<LaunchPlan> out;
    std::map<std::string, std::vector<int64_t>> dims;
    for (const auto& t : p.host.params) {
        if (t.role != TensorRole::In) continue;
        auto it = inputs.find(t.name);
        if (it == inputs.end()) {
            out.diagnostics.push_back(make_error(std::string(rules::kSemShape), t.span, "missing input tensor '" + t.name + "'"));
            return out;
        }
        if (it->second.dtype != t.dtype) {
            out.diagnostics.push_back(make_error(std::string(rules::kSemDtype), t.span,
                                                 "input '" + t.name + "' is " + std::string(dtype_name(it->second.dtype)) +
                                                     ", expected " + std::string(dtype_name(t.dtype))));
            return out;
        }
        dims[t.name] = it->second.shape;
    }
    auto shape = semantic::shape_from_inputs(p, dims);
    if (!shape.ok()) {
        out.diagnostics = shape.diagnostics;
        return out;
    }
    return semantic::eval_host(p, *shape, cfg);
}

namespace {

using LocalMemory = std::map<std::string, std::vector<double>>;

class ExecVisitor : public semantic::KernelVisitor {
  public:
    ExecVisitor(const KernelContext& ctx, TensorMap& gm, LocalMemory& local, ExecObserver* obs)
        : ctx_(ctx), gm_(gm), local_(local), tracker_(ctx), obs_(obs) {}

    void enter_stage(const StageBlock& b, const Stmt& s) override {
        tracker_.enter_stage(b, s);
        check();
        in_stage_ = true;
        if (obs_) obs_->enter_stage(b);
    }

    void exit_stage(const StageBlock& b, const Stmt&) override {
        tracker_.exit_stage(b);
        in_stage_ = false;
        if (obs_) obs_->exit_stage(b);
    }

    void let(const LetStmt&, const Stmt&, const Value&) override {
        if (obs_) obs_->let(in_stage_);
    }

    void primitive(const PrimInstance& inst) override {
        tracker_.primitive(inst);
        check();
        const Op op = inst.call->op;
        if (op == Op::CopyG2L) {
            load(inst);
        } else if (op == Op::CopyL2G) {
            store(inst);
        } else {
            compute(inst);
        }
        if (obs_) obs_->primitive(inst, ctx_);
    }

    void end_segment(const Span& span) {
        tracker_.end_segment(span);
        check();
    }

  private:
    void check() {
        if (!tracker_.violations().empty())
            throw InternalError("functional interpreter: " + tracker_.violations().front().message);
    }

    std::vector<double>& local(const SliceValue& s) {
        auto& mem = local_[s.name];
        if (s.begin < 0 || s.end < s.begin || s.end > ctx_.buffer(s.name).capacity)
            throw InternalError("functional interpreter: local slice out of bounds on " + s.name);
        return mem;
    }

    TensorValue& global(const SliceValue& s) { return gm_.at(ctx_.tensor(s.name)); }

    void load(const PrimInstance& inst) {
        const SliceValue& dst = inst.slices[0];
        const SliceValue& src = inst.slices[1];
        auto& mem = local(dst);
        const TensorValue& t = global(src);
        const int64_t cols = src.len();
        const int64_t rows = inst.two_d ? inst.rows : 1;
        const int64_t stride = inst.two_d ? inst.stride : cols;
        const int64_t pitch = inst.two_d ? row_pitch_elems(cols, t.dtype) : semantic::local_write_extent(inst, t.dtype);
        for (int64_t r = 0; r < rows; ++r) {
            for (int64_t c = 0; c < pitch; ++c) {
                const int64_t li = dst.begin + r * pitch + c;
                if (li >= static_cast<int64_t>(mem.size())) break;
                double v = 0.0;
                if (c < cols) {
                    const int64_t gi = src.begin + r * stride + c;
                    if (gi < 0 || gi >= t.numel()) throw InternalError("functional interpreter: global read out of bounds");
                    v = t.data[static_cast<std::size_t>(gi)];
                }
                mem[static_cast<std::size_t>(li)] = v;
            }
        }
    }

    void store(const PrimInstance& inst) {
        const SliceValue& dst = inst.slices[0];
        const SliceValue& src = inst.slices[1];
        auto& mem = local(src);
        TensorValue& t = global(dst);
        const int64_t cols = dst.len();
        const int64_t rows = inst.two_d ? inst.rows : 1;
        const int64_t stride = inst.two_d ? inst.stride : cols;
        const int64_t pitch = inst.two_d ? row_pitch_elems(cols, t.dtype) : cols;
        for (int64_t r = 0; r < rows; ++r) {
            for (int64_t c = 0; c < cols; ++c) {
                const int64_t gi = dst.begin + r * stride + c;
                if (gi < 0 || gi >= t.numel()) throw InternalError("functional interpreter: global write out of bounds");
                t.data[static_cast<std::size_t>(gi)] = mem[static_cast<std::size_t>(src.begin + r * pitch + c)];
            }
        }
    }

    void compute(const PrimInstance& inst) {
        std::vector<LocalView> views(inst.slices.size());
        double scalar = 0.0;
        for (std::size_t i = 0; i < inst.slices.size(); ++i) {
            const SliceValue& s = inst.slices[i];
            if (s.name.empty()) {
                scalar = inst.scalars[i].as_double();
                continue;
            }
            if (s.global) throw InternalError("functional interpreter: global operand in compute primitive");
            auto& mem = local(s);
            views[i] = LocalView{mem.data() + s.begin, s.len(), ctx_.buffer(s.name).decl->dtype};
        }
        execute_compute(inst.call->op, views, scalar);
    }

    const KernelContext& ctx_;
    TensorMap& gm_;
    LocalMemory& local_;
    semantic::StreamTracker tracker_;
    ExecObserver* obs_;
    bool in_stage_ = false;
};

}  // namespace

Outcome<TensorMap> run_functional(const Program& p, const TensorMap& inputs, const NpuConfig& cfg, ExecObserver* observer) {
    Outcome<TensorMap> out;
    auto plan = plan_for_inputs(p, inputs, cfg);
    out.diagnostics = plan.diagnostics;
    if (!plan.ok()) return out;
    auto ctx = semantic::make_context(p, *plan);
    if (!ctx.ok()) {
        for (auto& d : ctx.diagnostics) out.diagnostics.push_back(d);
        return out;
    }

    TensorMap gm;
    for (const auto& t : p.host.params) {
        if (t.role == TensorRole::In) {
            gm[t.name] = inputs.at(t.name);
        } else {
            gm[t.name] = TensorValue::zeros(t.dtype, plan->tensor_dims.at(t.name));
        }
    }
    std::vector<LocalMemory> locals(static_cast<std::size_t>(plan->num_blocks));
    for (auto& mem : locals) {
        for (const auto& [name, info] : ctx->buffers) mem[name].assign(static_cast<std::size_t>(info.alloc_elems), 0.0);
    }

    int64_t budget = int64_t{1} << 40;
    for (std::size_t seg = 0; seg < ctx->segments.size(); ++seg) {
        for (int64_t b = 0; b < plan->num_blocks; ++b) {
            if (observer) observer->begin(seg, b);
            ExecVisitor v(*ctx, gm, locals[static_cast<std::size_t>(b)], observer);
            auto d = semantic::walk_segment(*ctx, b, seg, v, budget);
            if (!d.empty()) throw InternalError("functional interpreter: " + d.front().message);
            v.end_segment(p.kernel.span);
            if (observer) observer->end(seg, b);
        }
    }

    TensorMap result;
    for (const auto& t : p.host.params) {
        if (t.role == TensorRole::Out) result[t.name] = std::move(gm[t.name]);
    }
    out.value = std::move(result);
    return out;
}

}  // namespace adsl::vm
