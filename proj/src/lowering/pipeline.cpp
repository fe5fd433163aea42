#include "adsl/lowering/pipeline.hpp"

#include "adsl/lowering/passes.hpp"
#include "adsl/semantic/checks.hpp"
#include "adsl/target/check.hpp"

namespace adsl::lowering {

target::TargetUnit identity_hook(const target::TargetUnit& t, const Diagnostics&) { return t; }

std::array<Pass, 4> default_passes() {
    return {
        [](const dsl::Program& p, const target::TargetUnit&, const vm::NpuConfig&) { return pass_host(p); },
        [](const dsl::Program& p, const target::TargetUnit& t, const vm::NpuConfig& cfg) {
            return pass_kernel_init(p, t, cfg);
        },
        [](const dsl::Program& p, const target::TargetUnit& t, const vm::NpuConfig&) {
            return pass_kernel_compute(p, t);
        },
        [](const dsl::Program& p, const target::TargetUnit& t, const vm::NpuConfig& cfg) {
            return pass_alignment(p, t, cfg);
        },
    };
}

std::string_view pass_name(int pass_id) {
    switch (pass_id) {
        case 1: return "host";
        case 2: return "kernel_init";
        case 3: return "kernel_compute";
        case 4: return "alignment";
    }
    return "unknown";
}

nlohmann::json to_json(const PassTrace& t) {
    nlohmann::json passes = nlohmann::json::array();
    for (const auto& r : t.records) {
        nlohmann::json before = nlohmann::json::array(), after = nlohmann::json::array();
        for (const auto& d : r.before) before.push_back(to_json(d));
        for (const auto& d : r.after) after.push_back(to_json(d));
        passes.push_back({{"pass", r.pass_id},
                          {"name", std::string(pass_name(r.pass_id))},
                          {"diagnostics_before", before},
                          {"diagnostics_after", after},
                          {"repair_attempts", r.repair_attempts},
                          {"accepted", r.accepted}});
    }
    return {{"passes", passes}};
}

PipelineResult run_pipeline(const dsl::Program& p, const vm::NpuConfig& cfg, const PipelineOptions& opts) {
    PipelineResult res;
    res.diagnostics = semantic::run_checks(p, cfg);
    if (has_errors(res.diagnostics)) return res;
    res.diagnostics.clear();

    target::TargetUnit unit;
    const int last = std::min(std::max(opts.stop_after, 0), 4);
    for (int id = 1; id <= last; ++id) {
        unit = opts.passes[static_cast<std::size_t>(id - 1)](p, unit, cfg);
        PassRecord rec;
        rec.pass_id = id;
        rec.before = target::check_structure(unit);
        rec.after = rec.before;
        while (has_errors(rec.after) && rec.repair_attempts < opts.max_repairs) {
            unit = opts.hook(unit, rec.after);
            ++rec.repair_attempts;
            rec.after = target::check_structure(unit);
        }
        rec.accepted = !has_errors(rec.after);
        res.trace.records.push_back(rec);
        if (!rec.accepted) {
            res.diagnostics = rec.after;
            res.failed_pass = id;
            return res;
        }
    }
    res.unit = std::move(unit);
    return res;
}

namespace {

bool drop_first_dequeue(std::vector<target::Instr>& body) {
    for (auto it = body.begin(); it != body.end(); ++it) {
        if (it->kind == target::Instr::Kind::DeQue) {
            body.erase(it);
            return true;
        }
    }
    return false;
}

}  // namespace

Pass pass_compute_dropping_dequeue() {
    return [](const dsl::Program& p, const target::TargetUnit& t, const vm::NpuConfig&) {
        target::TargetUnit out = pass_kernel_compute(p, t);
        for (auto& fn : out.stage_fns) {
            if (fn.kind == dsl::StageKind::Compute && drop_first_dequeue(fn.body)) break;
        }
        return out;
    };
}

}  // namespace adsl::lowering
