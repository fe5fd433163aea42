#include "adsl/semantic/alignment.hpp"

#include <tuple>

#include "adsl/dsl/primitives.hpp"
#include "adsl/semantic/walker.hpp"

namespace adsl::semantic {

using namespace adsl::dsl;

bool is_aligned(int64_t byte_count, int64_t offset_bytes, int64_t stride_bytes) {
    return byte_count % 32 == 0 && offset_bytes % 32 == 0 && stride_bytes % 32 == 0;
}

bool AlignmentReport::site_unaligned(int site) const {
    for (const auto& r : records) {
        if (r.site == site && !r.aligned) return true;
    }
    return false;
}

std::set<int> AlignmentReport::unaligned_sites() const {
    std::set<int> out;
    for (const auto& r : records) {
        if (!r.aligned) out.insert(r.site);
    }
    return out;
}

namespace {

class AlignmentVisitor : public KernelVisitor {
  public:
    AlignmentVisitor(const KernelContext& ctx, AlignmentReport& report,
                     std::set<std::tuple<int, int64_t, int64_t, int64_t>>& seen)
        : ctx_(ctx), report_(report), seen_(seen) {}

    void primitive(const PrimInstance& inst) override {
        if (!is_transfer(inst.call->op)) return;
        const SliceValue& g = inst.call->op == Op::CopyG2L ? inst.slices[1] : inst.slices[0];
        const int64_t size = dtype_size(ctx_.dtype_of(g));
        AlignmentRecord r;
        r.block_label = inst.stage ? inst.stage->label : "";
        r.site = inst.call->site.value;
        r.op = inst.call->op;
        r.byte_count = g.len() * size;
        r.offset_bytes = g.begin * size;
        r.stride_bytes = inst.two_d ? inst.stride * size : 0;
        r.rows = inst.two_d ? inst.rows : 1;
        r.aligned = is_aligned(r.byte_count, r.offset_bytes, r.stride_bytes);
        auto key = std::make_tuple(r.site, r.byte_count, r.offset_bytes % 32, r.stride_bytes % 32);
        if (seen_.insert(key).second) report_.records.push_back(std::move(r));
    }

  private:
    const KernelContext& ctx_;
    AlignmentReport& report_;
    std::set<std::tuple<int, int64_t, int64_t, int64_t>>& seen_;
};

void analyze_into(const Program& p, const LaunchPlan& plan, AlignmentReport& report,
                  std::set<std::tuple<int, int64_t, int64_t, int64_t>>& seen) {
    auto ctx = make_context(p, plan);
    if (!ctx.ok()) return;
    AlignmentVisitor v(*ctx, report, seen);
    int64_t budget = kDefaultStepBudget;
    for (std::size_t seg = 0; seg < ctx->segments.size(); ++seg) {
        for (int64_t b = 0; b < plan.num_blocks; ++b) {
            if (!walk_segment(*ctx, b, seg, v, budget).empty()) return;
        }
    }
}

}  // namespace

AlignmentReport analyze_alignment(const Program& p, const LaunchPlan& plan) {
    AlignmentReport report;
    std::set<std::tuple<int, int64_t, int64_t, int64_t>> seen;
    analyze_into(p, plan, report, seen);
    return report;
}

AlignmentReport analyze_alignment(const Program& p, const vm::NpuConfig& cfg) {
    AlignmentReport report;
    std::set<std::tuple<int, int64_t, int64_t, int64_t>> seen;
    for (const auto& shape : declared_shapes(p)) {
        auto plan = eval_host(p, shape, cfg);
        if (plan.ok()) analyze_into(p, *plan, report, seen);
    }
    return report;
}

}  // namespace adsl::semantic
