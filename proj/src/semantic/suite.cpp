#include <set>

#include "adsl/rules.hpp"
#include "adsl/semantic/checks.hpp"
#include "adsl/semantic/symbols.hpp"
#include "adsl/semantic/walker.hpp"

namespace adsl::semantic {

using namespace adsl::dsl;

namespace {

class TrackerVisitor : public KernelVisitor {
  public:
    explicit TrackerVisitor(StreamTracker& t) : t_(t) {}
    void enter_stage(const StageBlock& b, const Stmt& s) override { t_.enter_stage(b, s); }
    void exit_stage(const StageBlock& b, const Stmt&) override { t_.exit_stage(b); }
    void primitive(const PrimInstance& inst) override { t_.primitive(inst); }
    bool halted() const override { return !t_.violations().empty(); }

  private:
    StreamTracker& t_;
};

}  // namespace

Diagnostics check_dataflow(const Program& p, const vm::NpuConfig& cfg) {
    Diagnostics diags;
    for (const auto& shape : declared_shapes(p)) {
        auto plan = eval_host(p, shape, cfg);
        if (!plan.ok()) continue;
        auto ctx = make_context(p, *plan);
        if (!ctx.ok()) continue;
        int64_t budget = kDefaultStepBudget;
        for (int64_t b = 0; b < plan->num_blocks; ++b) {
            StreamTracker tracker(*ctx);
            TrackerVisitor v(tracker);
            for (std::size_t seg = 0; seg < ctx->segments.size() && tracker.violations().empty(); ++seg) {
                auto d = walk_segment(*ctx, b, seg, v, budget);
                if (!d.empty()) {
                    for (auto& x : d) diags.push_back(x);
                    return diags;
                }
                tracker.end_segment(p.kernel.span);
            }
            if (!tracker.violations().empty()) {
                const auto& viol = tracker.violations().front();
                diags.push_back(make_error(std::string(viol.rule), viol.span,
                                           viol.message + " (block " + std::to_string(b) + ", shape " +
                                               shape_to_string(shape) + ")"));
                return diags;
            }
        }
    }
    return diags;
}

Diagnostics run_checks(const Program& p, const vm::NpuConfig& cfg) {
    Diagnostics all;
    auto take = [&](Diagnostics d) {
        for (auto& x : d) all.push_back(std::move(x));
        return has_errors(all);
    };
    if (take(resolve_symbols(p).diagnostics)) return all;
    if (take(check_staging(p))) return all;
    if (take(check_tiling(p, cfg).diagnostics)) return all;
    if (take(check_buffers(p, cfg))) return all;
    take(check_dataflow(p, cfg));
    return all;
}

}  // namespace adsl::semantic
