#include "adsl/vm/timed.hpp"

#include <algorithm>
#include <map>

#include "adsl/dsl/primitives.hpp"

namespace adsl::vm {

using namespace adsl::dsl;

std::string_view queue_name(Queue q) {
    switch (q) {
        case Queue::MTE2: return "MTE2";
        case Queue::VEC: return "VEC";
        case Queue::SCALAR: return "SCALAR";
        case Queue::MTE3: return "MTE3";
    }
    return "?";
}

int64_t instruction_latency(Queue q, int64_t bytes, const NpuConfig& cfg) {
    const int64_t chunks = (bytes + 255) / 256;
    switch (q) {
        case Queue::MTE2:
        case Queue::MTE3: return cfg.lat_issue + chunks * cfg.lat_mte_per_256B;
        case Queue::VEC: return cfg.lat_issue + chunks * cfg.lat_vec_per_256B;
        case Queue::SCALAR: return cfg.lat_scalar;
    }
    return 0;
}

nlohmann::json to_json(const CostReport& r) {
    nlohmann::json busy = nlohmann::json::object(), count = nlohmann::json::object();
    for (Queue q : kQueues) {
        busy[std::string(queue_name(q))] = r.busy(q);
        count[std::string(queue_name(q))] = r.count(q);
    }
    return nlohmann::json{{"makespan_cycles", r.makespan_cycles},
                          {"per_queue_busy", busy},
                          {"instr_count", count},
                          {"per_block_makespan", r.per_block_makespan},
                          {"total_latency", r.total_latency}};
}

namespace {

// Schedules one block's instructions for one segment as they are executed.
class BlockSchedule {
  public:
    BlockSchedule(const KernelFn& k, const NpuConfig& cfg) : kernel_(k), cfg_(cfg) {}

    void enter_stage(const StageBlock& b) {
        auto [it, inserted] = io_.try_emplace(&b);
        if (inserted) it->second = semantic::stage_io(kernel_, b);
        const auto& io = it->second;
        int64_t ready = 0;
        const bool produces_in = b.kind == StageKind::CopyIn;
        for (const auto& name : io.writes) {
            auto& h = history_[name];
            const int64_t depth = produces_in ? cfg_.queue_depth_in : cfg_.queue_depth_out;
            const auto k = static_cast<int64_t>(h.produced.size());
            if (k - depth >= 0 && k - depth < static_cast<int64_t>(h.consumed.size()))
                ready = std::max(ready, h.consumed[static_cast<std::size_t>(k - depth)]);
        }
        for (const auto& name : io.reads) {
            auto& h = history_[name];
            const auto k = h.consumed.size();
            if (k < h.produced.size()) ready = std::max(ready, h.produced[k]);
        }
        stage_ = &b;
        chain_ = ready;
        queue_ = b.kind == StageKind::CopyIn ? Queue::MTE2 : b.kind == StageKind::CopyOut ? Queue::MTE3 : Queue::VEC;
        instrs_in_stage_ = 0;
    }

    void exit_stage(const StageBlock& b) {
        if (instrs_in_stage_ == 0) issue(queue_, 0, true);  // zero-latency marker keeps FIFO order
        const auto& io = io_.at(&b);
        for (const auto& name : io.reads) history_[name].consumed.push_back(chain_);
        for (const auto& name : io.writes) history_[name].produced.push_back(chain_);
        stage_ = nullptr;
    }

    void instruction(Queue q, int64_t bytes) {
        issue(q, instruction_latency(q, bytes, cfg_), false);
        if (stage_) ++instrs_in_stage_;
    }

    int64_t makespan = 0;
    std::array<int64_t, 4> busy{};
    std::array<int64_t, 4> count{};
    int64_t total = 0;

  private:
    void issue(Queue q, int64_t latency, bool marker) {
        auto qi = static_cast<std::size_t>(q);
        int64_t start = queue_free_[qi];
        if (stage_) start = std::max(start, chain_);
        const int64_t finish = start + latency;
        queue_free_[qi] = finish;
        if (stage_) chain_ = finish;
        makespan = std::max(makespan, finish);
        busy[qi] += latency;
        total += latency;
        if (!marker) ++count[qi];
    }

    struct History {
        std::vector<int64_t> produced;  // finish time of each producing stage instance
        std::vector<int64_t> consumed;  // finish time of each consuming stage instance
    };

    const KernelFn& kernel_;
    const NpuConfig& cfg_;
    std::map<const StageBlock*, semantic::StageIo> io_;
    std::map<std::string, History> history_;
    std::array<int64_t, 4> queue_free_{};
    const StageBlock* stage_ = nullptr;
    int64_t chain_ = 0;
    Queue queue_ = Queue::VEC;
    int instrs_in_stage_ = 0;
};

class TimingObserver : public ExecObserver {
  public:
    TimingObserver(const Program& p, const NpuConfig& cfg) : p_(p), cfg_(cfg) {}

    void begin(std::size_t segment, int64_t block) override {
        if (segments_.size() <= segment) segments_.resize(segment + 1);
        auto& blocks = segments_[segment];
        if (blocks.size() <= static_cast<std::size_t>(block)) blocks.resize(static_cast<std::size_t>(block) + 1);
        current_.emplace(p_.kernel, cfg_);
    }
    void enter_stage(const StageBlock& b) override { current_->enter_stage(b); }
    void exit_stage(const StageBlock& b) override { current_->exit_stage(b); }
    void let(bool) override { current_->instruction(Queue::SCALAR, 0); }
    void primitive(const semantic::PrimInstance& inst, const semantic::KernelContext& ctx) override {
        const Op op = inst.call->op;
        if (is_transfer(op)) {
            const auto& g = op == Op::CopyG2L ? inst.slices[1] : inst.slices[0];
            const int64_t bytes = g.len() * (inst.two_d ? inst.rows : 1) * dtype_size(ctx.dtype_of(g));
            current_->instruction(op == Op::CopyG2L ? Queue::MTE2 : Queue::MTE3, bytes);
            return;
        }
        int64_t bytes = 0;
        for (const auto& s : inst.slices) {
            if (!s.name.empty()) bytes = std::max(bytes, s.len() * dtype_size(ctx.dtype_of(s)));
        }
        current_->instruction(Queue::VEC, bytes);
    }
    void end(std::size_t segment, int64_t block) override {
        segments_[segment][static_cast<std::size_t>(block)] = Summary{current_->makespan, current_->busy, current_->count,
                                                                       current_->total};
        current_.reset();
    }

    CostReport report(int64_t num_blocks) const {
        CostReport r;
        r.per_block_makespan.assign(static_cast<std::size_t>(num_blocks), 0);
        const auto cores = static_cast<std::size_t>(cfg_.num_cores);
        std::vector<std::array<int64_t, 4>> core_busy(cores);
        for (const auto& blocks : segments_) {
            std::vector<int64_t> core_time(cores, 0);
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                const Summary& s = blocks[b];
                const std::size_t c = b % cores;
                core_time[c] += s.makespan;
                r.per_block_makespan[b] += s.makespan;
                for (std::size_t q = 0; q < 4; ++q) {
                    core_busy[c][q] += s.busy[q];
                    r.instr_count[q] += s.count[q];
                }
                r.total_latency += s.total;
            }
            r.makespan_cycles += *std::max_element(core_time.begin(), core_time.end());
        }
        for (const auto& cb : core_busy) {
            for (std::size_t q = 0; q < 4; ++q) r.per_queue_busy[q] = std::max(r.per_queue_busy[q], cb[q]);
        }
        return r;
    }

  private:
    struct Summary {
        int64_t makespan = 0;
        std::array<int64_t, 4> busy{};
        std::array<int64_t, 4> count{};
        int64_t total = 0;
    };

    const Program& p_;
    const NpuConfig& cfg_;
    std::optional<BlockSchedule> current_;
    std::vector<std::vector<Summary>> segments_;
};

}  // namespace

Outcome<TimedResult> run_timed(const Program& p, const TensorMap& inputs, const NpuConfig& cfg) {
    TimingObserver obs(p, cfg);
    auto functional = run_functional(p, inputs, cfg, &obs);
    Outcome<TimedResult> out;
    out.diagnostics = functional.diagnostics;
    if (!functional.ok()) return out;
    auto plan = plan_for_inputs(p, inputs, cfg);
    out.value = TimedResult{std::move(*functional.value), obs.report(plan->num_blocks)};
    return out;
}

}  // namespace adsl::vm
