// Acceptance checks over the fixture corpus. Prints one PASS/FAIL line per
// criterion and exits non-zero when any fails.
#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "../support/support.hpp"
#include "adsl/cli/commands.hpp"
#include "adsl/lowering/passes.hpp"
#include "adsl/rules.hpp"
#include "adsl/semantic/alignment.hpp"
#include "adsl/semantic/checks.hpp"
#include "adsl/target/check.hpp"
#include "adsl/target/emit.hpp"
#include "adsl/target/interpret.hpp"
#include "adsl/vm/compare.hpp"
#include "adsl/vm/interpreter.hpp"
#include "adsl/vm/reference.hpp"
#include "adsl/vm/tensor_io.hpp"
#include "adsl/vm/timed.hpp"

using namespace adsl;
using adsl::testing::fixtures_dir;

namespace {

struct Result {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

// Pinned oracle tolerances.
vm::Tolerance pinned(dsl::DType t) {
    if (t == dsl::DType::F16) return {1e-2, 1e-3};
    return {1e-5, 1e-6};
}

constexpr int kSeedsPerShape = 20;

struct Loaded {
    cli::FixtureManifest manifest;
    dsl::Program program;
    target::TargetUnit unit;
};

std::vector<Loaded> load_all() {
    std::vector<Loaded> out;
    for (auto& m : cli::load_corpus(fixtures_dir())) {
        auto p = adsl::testing::load_fixture_program(m);
        auto u = adsl::testing::lower_or_throw(p);
        out.push_back(Loaded{m, std::move(p), std::move(u)});
    }
    return out;
}

Result triangle(const std::vector<Loaded>& corpus) {
    Result r;
    const auto t0 = std::chrono::steady_clock::now();
    std::set<std::string> cats;
    int runs = 0;
    double worst_f32 = 0, worst_f16 = 0;
    for (const auto& f : corpus) {
        cats.insert(f.manifest.category);
        const vm::OperatorSpec* spec = vm::find_operator(f.manifest.oracle);
        for (const auto& shape : f.manifest.shapes) {
            for (int seed = 0; seed < kSeedsPerShape; ++seed) {
                const std::string where = f.manifest.name + " " + semantic::shape_to_string(shape) + " seed " +
                                          std::to_string(seed);
                auto in = vm::random_inputs(f.program, *spec, shape, static_cast<uint64_t>(seed));
                auto want = vm::reference_eval(f.manifest.oracle, in);
                auto dsl_out = vm::run_functional(f.program, in, {});
                auto tgt_out = target::interpret_target(f.unit, in, {});
                ++runs;
                if (!dsl_out.ok() || !tgt_out.ok()) {
                    r.fail(where + ": interpreter error");
                    continue;
                }
                for (const auto& [name, ref] : want) {
                    const auto& a = dsl_out->at(name);
                    const auto tol = pinned(ref.dtype);
                    auto cmp = vm::compare_tensors(a, ref, tol.rel, tol.abs);
                    double& worst = ref.dtype == dsl::DType::F16 ? worst_f16 : worst_f32;
                    worst = std::max(worst, cmp.worst_abs_error);
                    if (!cmp.pass) r.fail(where + " " + name + " vs oracle: " + cmp.summary());
                    if (!vm::bitwise_equal(a, tgt_out->at(name))) r.fail(where + " " + name + ": interpreters differ");
                }
            }
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (corpus.size() < 14) r.fail("only " + std::to_string(corpus.size()) + " fixtures");
    if (cats.size() != cli::categories().size()) r.fail("categories covered: " + std::to_string(cats.size()));
    if (secs >= 120.0) r.fail("took " + std::to_string(secs) + " s");
    if (r.pass) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "%zu fixtures, %zu categories, %d runs, worst abs err f32 %.3g f16 %.3g, %.1f s",
                      corpus.size(), cats.size(), runs, worst_f32, worst_f16, secs);
        r.detail = buf;
    }
    return r;
}

Result soundness(const std::vector<Loaded>& corpus) {
    Result r;
    for (const auto& f : corpus) {
        auto res = lowering::run_pipeline(f.program, {});
        if (!res.unit) {
            r.fail(f.manifest.name + ": pipeline stopped at pass " + std::to_string(res.failed_pass));
            continue;
        }
        if (res.trace.records.size() != 4) r.fail(f.manifest.name + ": trace has " + std::to_string(res.trace.records.size()) + " passes");
        for (const auto& rec : res.trace.records) {
            if (rec.repair_attempts != 0 || !rec.accepted || !rec.before.empty())
                r.fail(f.manifest.name + ": pass " + std::to_string(rec.pass_id) + " needed repair");
        }
        if (!target::check_structure(*res.unit).empty()) r.fail(f.manifest.name + ": final unit rejected");
    }
    if (r.pass) r.detail = std::to_string(corpus.size()) + " fixtures, 0 repairs, final units accepted";
    return r;
}

std::set<std::string> rule_set(const Diagnostics& d) {
    std::set<std::string> s;
    for (const auto& x : d)
        if (x.severity == Severity::Error) s.insert(x.rule_id);
    return s;
}

target::StageFn& fn_of_kind(target::TargetUnit& t, dsl::StageKind k) {
    for (auto& f : t.stage_fns)
        if (f.kind == k) return f;
    throw std::runtime_error("no stage function of that kind");
}

std::size_t index_of(const std::vector<target::Instr>& body, target::Instr::Kind k) {
    for (std::size_t i = 0; i < body.size(); ++i)
        if (body[i].kind == k) return i;
    throw std::runtime_error("instruction kind not found");
}

Result sensitivity() {
    using K = target::Instr::Kind;
    Result r;
    const auto base = adsl::testing::lower_or_throw(adsl::testing::load_fixture_program("relu"));
    if (!target::check_structure(base).empty()) r.fail("relu unit is not clean");

    struct TgtCase {
        std::string_view rule;
        std::function<void(target::TargetUnit&)> mutate;
    };
    const std::vector<TgtCase> tgt = {
        {rules::kTgtStageMix, [](target::TargetUnit& t) { fn_of_kind(t, dsl::StageKind::Compute).kind = dsl::StageKind::CopyIn; }},
        {rules::kTgtDeqFirst,
         [](target::TargetUnit& t) {
             auto& body = fn_of_kind(t, dsl::StageKind::Compute).body;
             const auto i = index_of(body, K::DeQue);
             auto deq = body[i];
             body.erase(body.begin() + static_cast<std::ptrdiff_t>(i));
             body.insert(body.begin() + static_cast<std::ptrdiff_t>(index_of(body, K::Vector)) + 1, deq);
         }},
        {rules::kTgtQueueImbalance,
         [](target::TargetUnit& t) {
             auto& body = fn_of_kind(t, dsl::StageKind::Compute).body;
             body.erase(body.begin() + static_cast<std::ptrdiff_t>(index_of(body, K::EnQue)));
         }},
        {rules::kTgtGmInCompute,
         [](target::TargetUnit& t) {
             auto& body = fn_of_kind(t, dsl::StageKind::Compute).body;
             body[index_of(body, K::Vector)].operands[1].name = "x";
         }},
        {rules::kTgtBarrierPlace,
         [](target::TargetUnit& t) { t.process_body[index_of(t.process_body, K::For)].body.push_back(target::Instr::sync_all()); }},
    };
    int caught = 0;
    for (const auto& c : tgt) {
        auto u = base;
        c.mutate(u);
        auto got = rule_set(target::check_structure(u));
        if (got == std::set<std::string>{std::string(c.rule)}) ++caught;
        else {
            std::string s;
            for (const auto& x : got) s += x + " ";
            r.fail(std::string(c.rule) + " mutation gave {" + s + "}");
        }
    }

    const std::string relu = adsl::testing::fixture_source("relu");
    using adsl::testing::replace_once;
    const std::vector<std::pair<std::string_view, std::string>> dsl_cases = {
        {rules::kStgG2lPlace, replace_once(relu, "compute act {", "compute act { copy_g2l(x_in[0..n], x[off..off + n]);")},
        {rules::kStgSyncPlace, replace_once(relu, "let off =", "sync_all;\n        let off =")},
        {rules::kBufUbOverflow, replace_once(relu, "tiling tile = 256", "tiling tile = 65536")},
        {rules::kTilGap, replace_once(relu, "block_start + block_len - off)", "block_start + block_len - off - 1)")},
        {rules::kTilRationale, replace_once(relu, "\"1 KiB per stream buffer, depth 2 in and out uses 4 KiB of UB\"", "\"\"")},
    };
    for (const auto& [rule, src] : dsl_cases) {
        auto p = adsl::testing::parse_or_throw(src);
        auto got = rule_set(semantic::run_checks(p, {}));
        if (got == std::set<std::string>{std::string(rule)}) ++caught;
        else {
            std::string s;
            for (const auto& x : got) s += x + " ";
            r.fail(std::string(rule) + " program gave {" + s + "}");
        }
    }
    if (r.pass) r.detail = std::to_string(caught) + "/10 negatives rejected with exactly their rule id";
    return r;
}

std::string copy_program(int64_t n, dsl::DType dt, int64_t tile) {
    const std::string t(dsl::dtype_name(dt));
    std::ostringstream s;
    s << "host copy_host(x: [N] " << t << ", out y: [N] " << t << ") {\n"
      << "    shape N = " << n << ";\n"
      << "    tiling tile = " << tile << " @ \"sweep tile\";\n"
      << "    launch copy<1>(x, y, tile) over 1;\n}\n"
      << "kernel copy(x, y, tile) {\n"
      << "    alloc_ub a: " << t << "[tile] stream_in;\n"
      << "    alloc_ub b: " << t << "[tile] stream_out;\n"
      << "    for i in 0..ceil_div(N_len, tile) {\n"
      << "        let off = i * tile;\n"
      << "        let k = min(tile, N_len - off);\n"
      << "        copyin load { copy_g2l(a[0..k], x[off..off + k]); }\n"
      << "        compute move { adds(b[0..k], a[0..k], 0.0); }\n"
      << "        copyout store { copy_l2g(y[off..off + k], b[0..k]); }\n"
      << "    }\n}\n";
    std::string out = s.str();
    // The kernel sees the element count as a literal.
    for (std::size_t pos; (pos = out.find("N_len")) != std::string::npos;) out.replace(pos, 5, std::to_string(n));
    return out;
}

int count_kind(const target::TargetUnit& t, target::Instr::Kind k) {
    int c = 0;
    std::function<void(const std::vector<target::Instr>&)> walk = [&](const std::vector<target::Instr>& body) {
        for (const auto& i : body) {
            if (i.kind == k) ++c;
            walk(i.body);
        }
    };
    for (const auto& f : t.stage_fns) walk(f.body);
    return c;
}

Result alignment_sweep() {
    Result r;
    int programs = 0, padded = 0;
    for (dsl::DType dt : {dsl::DType::F16, dsl::DType::F32}) {
        const int64_t size = dsl::dtype_size(dt);
        for (int64_t n = 1; n <= 128; ++n) {
            for (int64_t tile : {n, int64_t{12}}) {
                const auto p = adsl::testing::parse_or_throw(copy_program(n, dt, tile));
                const std::string where = std::string(dsl::dtype_name(dt)) + " n=" + std::to_string(n) +
                                          " tile=" + std::to_string(tile);
                // Independent expectation: any transfer with an unaligned byte count or offset.
                bool expect_pad = false;
                for (int64_t off = 0; off < n; off += tile) {
                    const int64_t k = std::min(tile, n - off);
                    if ((k * size) % 32 != 0 || (off * size) % 32 != 0) expect_pad = true;
                }
                auto res = lowering::run_pipeline(p, {});
                ++programs;
                if (!res.unit) {
                    r.fail(where + ": pipeline failed");
                    continue;
                }
                const auto& u = *res.unit;
                const int pads = count_kind(u, target::Instr::Kind::DataCopyPad);
                const int plain = count_kind(u, target::Instr::Kind::DataCopy);
                padded += pads > 0;
                if ((expect_pad && (pads != 2 || plain != 0)) || (!expect_pad && (pads != 0 || plain != 2)))
                    r.fail(where + ": " + std::to_string(pads) + " padded copies, expected " + (expect_pad ? "2" : "0"));
                const bool text_pad = target::emit_text(u).kernel.find("DataCopyPad") != std::string::npos;
                if (text_pad != expect_pad) r.fail(where + ": emitted text disagrees");
                if (lowering::pass_alignment(p, u, {}) != u) r.fail(where + ": alignment pass not idempotent");
                if (!target::unaligned_plain_copies(u, {}).empty()) r.fail(where + ": unaligned plain copy remains");
            }
        }
    }
    if (r.pass) r.detail = std::to_string(programs) + " programs, " + std::to_string(padded) + " padded, idempotent";
    return r;
}

// Fewest tiles any block of the launch streams through.
int64_t min_tiles_per_block(const dsl::Program& p, const semantic::ShapeMap& shape, const vm::NpuConfig& cfg) {
    auto plan = semantic::eval_host(p, shape, cfg);
    const int64_t tile = plan->tiling("tile");
    int64_t n = INT64_MAX;
    for (const auto& b : plan->per_block_ranges) n = std::min(n, (b.len + tile - 1) / tile);
    return n;
}

Result cost_properties(const std::vector<Loaded>& corpus) {
    Result r;
    vm::NpuConfig d2, d1, wide;
    d1.queue_depth_in = d1.queue_depth_out = 1;
    wide.num_cores = d2.num_cores * 2;
    int checks = 0;
    bool strict_seen = false;
    for (const auto& f : corpus) {
        const vm::OperatorSpec* spec = vm::find_operator(f.manifest.oracle);
        for (const auto& shape : f.manifest.shapes) {
            const std::string where = f.manifest.name + " " + semantic::shape_to_string(shape);
            auto in = vm::random_inputs(f.program, *spec, shape, 7);
            auto a = vm::run_timed(f.program, in, d2);
            auto b = vm::run_timed(f.program, in, d1);
            auto c = vm::run_timed(f.program, in, wide);
            if (!a.ok() || !b.ok() || !c.ok()) {
                r.fail(where + ": timed run failed");
                continue;
            }
            const auto& ca = a->cost;
            ++checks;
            if (ca.makespan_cycles > b->cost.makespan_cycles)
                r.fail(where + ": depth 2 makespan " + std::to_string(ca.makespan_cycles) + " > depth 1 " +
                       std::to_string(b->cost.makespan_cycles));
            if (ca.makespan_cycles > ca.total_latency) r.fail(where + ": makespan exceeds summed latency");
            int64_t busiest = 0;
            for (auto q : ca.per_queue_busy) busiest = std::max(busiest, q);
            if (ca.makespan_cycles < busiest) r.fail(where + ": makespan below busiest queue");
            if (c->cost.makespan_cycles > ca.makespan_cycles)
                r.fail(where + ": doubling cores raised makespan " + std::to_string(ca.makespan_cycles) + " -> " +
                       std::to_string(c->cost.makespan_cycles));
            if (f.manifest.name == "relu" && min_tiles_per_block(f.program, shape, d2) >= 8) {
                strict_seen = true;
                if (ca.makespan_cycles >= b->cost.makespan_cycles)
                    r.fail(where + ": double buffering gives no gain (" + std::to_string(ca.makespan_cycles) + " vs " +
                           std::to_string(b->cost.makespan_cycles) + ")");
                else
                    r.detail = "relu " + semantic::shape_to_string(shape) + " " + std::to_string(ca.makespan_cycles) +
                               " < " + std::to_string(b->cost.makespan_cycles) + " cycles";
            }
        }
    }
    if (!strict_seen) r.fail("no relu shape with at least 8 tiles per block");
    if (r.pass) r.detail = std::to_string(checks) + " fixture shapes; " + r.detail;
    return r;
}

// Everything check + compile + sim produce for the corpus, concatenated.
std::string full_run(const std::vector<Loaded>& corpus) {
    std::string all;
    for (const auto& f : corpus) {
        std::ostringstream out, err;
        cli::cmd_check(f.manifest.program_path(), {}, out, err);
        all += out.str();
        auto res = lowering::run_pipeline(f.program, {});
        auto src = target::emit_text(*res.unit);
        all += src.host + src.kernel + lowering::to_json(res.trace).dump();
        const vm::OperatorSpec* spec = vm::find_operator(f.manifest.oracle);
        auto in = vm::random_inputs(f.program, *spec, f.manifest.shapes.front(), 3);
        auto timed = vm::run_timed(f.program, in, {});
        for (const auto& [name, t] : timed->outputs) all += name + vm::encode_tensor(t);
        all += vm::to_json(timed->cost).dump();
        auto tgt = target::interpret_target(res.unit.value(), in, {});
        for (const auto& [name, t] : *tgt) all += name + vm::encode_tensor(t);
    }
    return all;
}

Result determinism(const std::vector<Loaded>& corpus) {
    Result r;
    const std::string a = full_run(corpus), b = full_run(corpus);
    if (a != b) r.fail("two runs differ");
    std::ostringstream out, err;
    if (cli::cmd_goldens(fixtures_dir(), {}, false, out, err) != 0) r.fail("goldens: " + out.str() + err.str());
    if (r.pass) r.detail = std::to_string(a.size()) + " bytes identical across runs, goldens pass";
    return r;
}

Result tiling_coverage() {
    Result r;
    std::mt19937_64 rng(20240607);
    std::uniform_int_distribution<int64_t> dim(1, 10000), tile_d(1, 512), cores_d(1, 32);
    const std::string base = adsl::testing::fixture_source("relu");
    for (int trial = 0; trial < 1000; ++trial) {
        const int64_t n = dim(rng), tile = tile_d(rng);
        vm::NpuConfig cfg;
        cfg.num_cores = cores_d(rng);
        const std::string where = "N=" + std::to_string(n) + " tile=" + std::to_string(tile) +
                                  " cores=" + std::to_string(cfg.num_cores);
        std::string src = adsl::testing::replace_once(base, "shape N = 16384;\n    shape N = 1000;",
                                                      "shape N = " + std::to_string(n) + ";");
        src = adsl::testing::replace_once(src, "tiling tile = 256", "tiling tile = " + std::to_string(tile));
        const auto p = adsl::testing::parse_or_throw(src);
        auto tiling = semantic::check_tiling(p, cfg);
        if (!tiling.ok()) {
            r.fail(where + ": " + (tiling.diagnostics.empty() ? "rejected" : tiling.diagnostics.front().rule_id));
            continue;
        }
        // Summation oracle: with x_i = i + 1 > 0, relu is the identity and
        // the outputs must add up to n (n + 1) / 2 exactly.
        vm::TensorValue x = vm::TensorValue::zeros(dsl::DType::F32, {n});
        for (int64_t i = 0; i < n; ++i) x.data[static_cast<std::size_t>(i)] = static_cast<double>(i + 1);
        auto y = vm::run_functional(p, {{"x", x}}, cfg);
        if (!y.ok()) {
            r.fail(where + ": run failed");
            continue;
        }
        double sum = 0;
        for (double v : y->at("y").data) sum += v;
        if (sum != static_cast<double>(n) * static_cast<double>(n + 1) / 2.0) r.fail(where + ": sum mismatch");
        const auto& plan = tiling->shapes.front().plan;
        int64_t covered = 0, next = 0;
        for (const auto& b : plan.per_block_ranges) {
            if (b.start != next) r.fail(where + ": ranges not contiguous");
            next = b.start + b.len;
            covered += b.len;
        }
        if (covered != n) r.fail(where + ": ranges cover " + std::to_string(covered));
    }
    if (r.pass) r.detail = "1000 random trials partition exactly";
    return r;
}

}  // namespace

int main() {
    std::vector<Loaded> corpus;
    try {
        corpus = load_all();
    } catch (const std::exception& e) {
        std::cout << "FAIL setup: " << e.what() << '\n';
        return 1;
    }
    const std::pair<const char*, std::function<Result()>> criteria[] = {
        {"1 triangle equivalence", [&] { return triangle(corpus); }},
        {"2 pipeline soundness", [&] { return soundness(corpus); }},
        {"3 checker sensitivity", [] { return sensitivity(); }},
        {"4 alignment sweep", [] { return alignment_sweep(); }},
        {"5 cost properties", [&] { return cost_properties(corpus); }},
        {"6 determinism", [&] { return determinism(corpus); }},
        {"7 tiling coverage", [] { return tiling_coverage(); }},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Result r;
        try {
            r = run();
        } catch (const std::exception& e) {
            r.fail(std::string("exception: ") + e.what());
        }
        failed += !r.pass;
        std::cout << (r.pass ? "PASS " : "FAIL ") << name << ": " << r.detail << std::endl;
    }
    return failed ? 1 : 0;
}
