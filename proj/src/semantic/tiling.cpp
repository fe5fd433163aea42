#include <algorithm>
#include <cctype>

#include "adsl/dsl/primitives.hpp"
#include "adsl/rules.hpp"
#include "adsl/semantic/checks.hpp"
#include "adsl/semantic/walker.hpp"

namespace adsl::semantic {

using namespace adsl::dsl;

namespace {

// Records which block wrote each element of every output tensor.
class CoverageVisitor : public KernelVisitor {
  public:
    explicit CoverageVisitor(const KernelContext& ctx) : ctx_(ctx) {
        for (const auto& t : ctx.program->host.params) {
            if (t.role == TensorRole::Out)
                owner_[t.name].assign(static_cast<std::size_t>(ctx.plan->numel(t.name)), -1);
        }
    }

    int64_t block = 0;

    void primitive(const PrimInstance& inst) override {
        if (inst.call->op != Op::CopyL2G) return;
        const SliceValue& g = inst.slices[0];
        const std::string& tensor = ctx_.tensor(g.name);
        auto it = owner_.find(tensor);
        if (it == owner_.end()) return;
        const int64_t rows = inst.two_d ? inst.rows : 1;
        for (int64_t r = 0; r < rows; ++r) {
            const int64_t base = g.begin + r * inst.stride;
            for (int64_t i = base; i < base + g.len(); ++i) mark(tensor, it->second, i, *inst.stmt);
        }
    }

    void finish(const Span& span, Diagnostics& diags) const {
        for (const auto& [tensor, owners] : owner_) {
            if (overlap_.count(tensor)) {
                diags.push_back(make_error(std::string(rules::kTilOverlap), overlap_.at(tensor).first,
                                           overlap_.at(tensor).second + " for shape " + shape_to_string(ctx_.plan->shape)));
                continue;
            }
            auto gap = std::find(owners.begin(), owners.end(), -1);
            if (gap != owners.end()) {
                const auto first = gap - owners.begin();
                const auto missing = std::count(owners.begin(), owners.end(), -1);
                diags.push_back(make_error(std::string(rules::kTilGap), span,
                                           std::to_string(missing) + " elements of '" + tensor +
                                               "' are never written (first: " + std::to_string(first) + ") for shape " +
                                               shape_to_string(ctx_.plan->shape)));
            }
        }
    }

  private:
    void mark(const std::string& tensor, std::vector<int32_t>& owners, int64_t i, const Stmt& s) {
        if (i < 0 || i >= static_cast<int64_t>(owners.size())) return;  // BUF-SLICE-OOB territory
        int32_t& o = owners[static_cast<std::size_t>(i)];
        if (o == -1) {
            o = static_cast<int32_t>(block);
        } else if (o != block && !overlap_.count(tensor)) {
            overlap_[tensor] = {s.span, "element " + std::to_string(i) + " of '" + tensor + "' is written by blocks " +
                                            std::to_string(o) + " and " + std::to_string(block)};
        }
    }

    const KernelContext& ctx_;
    std::map<std::string, std::vector<int32_t>> owner_;
    std::map<std::string, std::pair<Span, std::string>> overlap_;
};

bool blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Outcome<TilingSummary> check_tiling(const Program& p, const vm::NpuConfig& cfg) {
    Outcome<TilingSummary> out;
    Diagnostics& diags = out.diagnostics;
    for (const auto& t : p.host.tiling) {
        if (blank(t.rationale))
            diags.push_back(make_error(std::string(rules::kTilRationale), t.span,
                                       "tiling parameter '" + t.name + "' has an empty rationale",
                                       std::string("state the memory constraint that motivates this value")));
    }
    auto order = tiling_order(p.host);
    if (!order.ok()) {
        for (auto& d : order.diagnostics) diags.push_back(d);
        return out;
    }
    if (has_errors(diags)) return out;

    TilingSummary summary;
    bool warned = false;
    for (const auto& shape : declared_shapes(p)) {
        auto plan = eval_host(p, shape, cfg);
        for (auto& d : plan.diagnostics) {
            if (d.severity == Severity::Warning) {
                if (warned) continue;
                warned = true;
            }
            diags.push_back(d);
        }
        if (!plan.ok()) continue;
        summary.shapes.push_back(ShapeTiling{shape, *plan});
    }
    if (has_errors(diags)) return out;

    for (const auto& st : summary.shapes) {
        auto ctx = make_context(p, st.plan);
        if (!ctx.ok()) continue;  // reported by check_buffers
        CoverageVisitor v(*ctx);
        int64_t budget = kDefaultStepBudget;
        for (std::size_t seg = 0; seg < ctx->segments.size(); ++seg) {
            for (int64_t b = 0; b < st.plan.num_blocks; ++b) {
                v.block = b;
                auto d = walk_segment(*ctx, b, seg, v, budget);
                if (!d.empty()) {
                    for (auto& x : d) diags.push_back(x);
                    return out;
                }
            }
        }
        v.finish(p.host.launch.span, diags);
    }
    if (!has_errors(diags)) out.value = std::move(summary);
    return out;
}

}  // namespace adsl::semantic
