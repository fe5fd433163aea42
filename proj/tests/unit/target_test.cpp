#include <gtest/gtest.h>

#include "../support/support.hpp"
#include "adsl/lowering/passes.hpp"
#include "adsl/rules.hpp"
#include "adsl/target/check.hpp"
#include "adsl/target/emit.hpp"
#include "adsl/target/interpret.hpp"
#include "adsl/vm/interpreter.hpp"
#include "adsl/vm/reference.hpp"

using namespace adsl;
using K = target::Instr::Kind;

namespace {

target::TargetUnit relu_unit() { return adsl::testing::lower_or_throw(adsl::testing::load_fixture_program("relu")); }

target::StageFn& compute_fn(target::TargetUnit& t) {
    for (auto& f : t.stage_fns)
        if (f.kind == dsl::StageKind::Compute) return f;
    throw std::runtime_error("no compute function");
}

std::set<std::string> rules_of(const Diagnostics& d) {
    std::set<std::string> s;
    for (const auto& x : d) s.insert(x.rule_id);
    return s;
}

// Puts back a DeQue for every queue a stage frees without dequeuing.
target::TargetUnit reinsert_dequeues(const target::TargetUnit& in, const Diagnostics&) {
    target::TargetUnit t = in;
    for (auto& f : t.stage_fns) {
        std::set<std::string> deq, freed;
        for (const auto& i : f.body) {
            if (i.kind == K::DeQue) deq.insert(i.name);
            if (i.kind == K::FreeTensor) freed.insert(i.name);
        }
        for (auto it = freed.rbegin(); it != freed.rend(); ++it)
            if (!deq.count(*it)) f.body.insert(f.body.begin(), target::Instr::queue_op(K::DeQue, *it));
    }
    return t;
}

}  // namespace

TEST(Structure, UndeclaredQueueAndBadCall) {
    auto t = relu_unit();
    compute_fn(t).body.insert(compute_fn(t).body.begin(), target::Instr::queue_op(K::DeQue, "ghost"));
    EXPECT_TRUE(rules_of(target::check_structure(t)).count(std::string(rules::kTgtUndeclared)));

    auto u = relu_unit();
    u.process_body[0].body.push_back(target::Instr::call("ComputeNothing", {}));
    EXPECT_EQ(rules_of(target::check_structure(u)), std::set<std::string>{std::string(rules::kTgtCall)});

    auto v = relu_unit();
    v.process_body[0].body.pop_back();  // the store is never called
    EXPECT_EQ(rules_of(target::check_structure(v)), std::set<std::string>{std::string(rules::kTgtCall)});
}

TEST(Structure, DepthOutOfRange) {
    auto t = relu_unit();
    for (auto& s : t.init_stmts)
        if (s.kind == target::InitStmt::Kind::InitQueue) s.depth = 9;
    EXPECT_TRUE(rules_of(target::check_structure(t)).count(std::string(rules::kTgtQueueImbalance)));
}

TEST(Structure, PartialUnitsCheckOnlyPresentSections) {
    auto p = adsl::testing::load_fixture_program("softmax");
    auto host = lowering::pass_host(p);
    EXPECT_TRUE(target::check_structure(host).empty());
    auto init = lowering::pass_kernel_init(p, host, {});
    EXPECT_TRUE(target::check_structure(init).empty());
}

// Property: every single-instruction deletion inside a stage function of
// every fixture is either rejected or leaves queue traffic untouched.
TEST(Structure, DeletingAQueueOpIsAlwaysCaught) {
    for (const auto& m : cli::load_corpus(adsl::testing::fixtures_dir())) {
        const auto base = adsl::testing::lower_or_throw(adsl::testing::load_fixture_program(m));
        for (std::size_t f = 0; f < base.stage_fns.size(); ++f) {
            for (std::size_t i = 0; i < base.stage_fns[f].body.size(); ++i) {
                if (!target::is_queue_op(base.stage_fns[f].body[i].kind)) continue;
                auto t = base;
                t.stage_fns[f].body.erase(t.stage_fns[f].body.begin() + static_cast<std::ptrdiff_t>(i));
                EXPECT_TRUE(has_errors(target::check_structure(t))) << m.name << " " << base.stage_fns[f].name << " #" << i;
            }
        }
    }
}

TEST(Interpret, MatchesDslInterpreterOnEveryFixture) {
    for (const auto& m : cli::load_corpus(adsl::testing::fixtures_dir())) {
        auto p = adsl::testing::load_fixture_program(m);
        auto unit = adsl::testing::lower_or_throw(p);
        const auto* spec = vm::find_operator(m.oracle);
        for (const auto& shape : m.shapes) {
            auto in = vm::random_inputs(p, *spec, shape, 99);
            auto a = vm::run_functional(p, in, {});
            auto b = target::interpret_target(unit, in, {});
            ASSERT_TRUE(a.ok() && b.ok()) << m.name;
            for (const auto& [name, t] : *a) EXPECT_TRUE(vm::bitwise_equal(t, b->at(name))) << m.name << " " << name;
        }
    }
}

TEST(Interpret, StrictModeFaultsOnUnpaddedUnalignedCopy) {
    auto p = adsl::testing::load_fixture_program("softmax");
    auto t = lowering::pass_kernel_compute(p, lowering::pass_kernel_init(p, lowering::pass_host(p), {}));
    auto in = target::zero_inputs(t, {{"R", 37}, {"C", 100}});
    EXPECT_THROW(target::interpret_target(t, in, {}), InternalError);
    target::InterpretOptions loose;
    loose.strict_alignment = false;
    int unaligned = 0;
    loose.trace = [&](const target::CopyEvent& e) { unaligned += !e.aligned; };
    EXPECT_TRUE(target::interpret_target(t, in, {}, loose).ok());
    EXPECT_GT(unaligned, 0);
    EXPECT_FALSE(target::unaligned_plain_copies(t, {}).empty());
}

TEST(Emit, KernelTextHasRoutinesAndMarkers) {
    auto t = adsl::testing::lower_or_throw(adsl::testing::load_fixture_program("softmax"));
    auto src = target::emit_text(t);
    for (const auto& f : t.stage_fns) EXPECT_NE(src.kernel.find("__aicore__ inline void " + f.name + "("), std::string::npos) << f.name;
    EXPECT_NE(src.kernel.find("void Process()"), std::string::npos);
    EXPECT_NE(src.kernel.find("TQue<QuePosition::VECIN, 2> x_in;"), std::string::npos);
    EXPECT_NE(src.kernel.find("DataCopyPad"), std::string::npos);
    EXPECT_NE(src.host.find("struct SoftmaxTilingData"), std::string::npos);
    EXPECT_NE(src.host.find("softmax<<<tiling.blocks>>>"), std::string::npos);
    EXPECT_EQ(src.kernel, target::emit_text(t).kernel);
}

TEST(Lowering, StopAfterHostHasNoStageFunctions) {
    auto p = adsl::testing::load_fixture_program("softmax");
    lowering::PipelineOptions o;
    o.stop_after = 1;
    auto r = lowering::run_pipeline(p, {}, o);
    ASSERT_TRUE(r.unit);
    EXPECT_TRUE(r.unit->has_host);
    EXPECT_FALSE(r.unit->has_init);
    EXPECT_TRUE(r.unit->stage_fns.empty());
    EXPECT_TRUE(target::emit_text(*r.unit).kernel.empty());
    EXPECT_EQ(r.trace.records.size(), 1u);
}

TEST(Lowering, QueueDepthComesFromConfig) {
    vm::NpuConfig cfg;
    cfg.queue_depth_in = 3;
    cfg.queue_depth_out = 1;
    auto t = adsl::testing::lower_or_throw(adsl::testing::load_fixture_program("relu"), cfg);
    for (const auto& s : t.init_stmts) {
        if (s.kind != target::InitStmt::Kind::InitQueue) continue;
        EXPECT_EQ(s.depth, s.pos == target::QueuePos::VecIn ? 3 : 1);
    }
}

TEST(Lowering, StageParamsAreTheLoopValuesUsed) {
    auto t = adsl::testing::lower_or_throw(adsl::testing::load_fixture_program("relu"));
    const auto* load = t.find_fn("CopyInLoad");
    ASSERT_NE(load, nullptr);
    EXPECT_EQ(load->params, (std::vector<std::string>{"n", "off"}));
    EXPECT_EQ(t.find_fn("ComputeAct")->params, (std::vector<std::string>{"n"}));
}

TEST(Lowering, DroppedDequeueIsRejectedAtPassThree) {
    auto p = adsl::testing::load_fixture_program("relu");
    lowering::PipelineOptions o;
    o.passes[2] = lowering::pass_compute_dropping_dequeue();
    auto r = lowering::run_pipeline(p, {}, o);
    EXPECT_FALSE(r.unit);
    EXPECT_EQ(r.failed_pass, 3);
    ASSERT_EQ(r.trace.records.size(), 3u);
    EXPECT_FALSE(r.trace.records[2].accepted);
    EXPECT_EQ(r.trace.records[2].repair_attempts, o.max_repairs);
    EXPECT_TRUE(has_rule(r.diagnostics, rules::kTgtDeqFirst));
}

TEST(Lowering, RepairHookCanFixAGateFailure) {
    auto p = adsl::testing::load_fixture_program("relu");
    lowering::PipelineOptions o;
    o.passes[2] = lowering::pass_compute_dropping_dequeue();
    o.hook = reinsert_dequeues;
    auto r = lowering::run_pipeline(p, {}, o);
    ASSERT_TRUE(r.unit);
    EXPECT_EQ(r.trace.records[2].repair_attempts, 1);
    EXPECT_FALSE(r.trace.records[2].before.empty());
    EXPECT_TRUE(r.trace.records[2].after.empty());
    EXPECT_EQ(*r.unit, adsl::testing::lower_or_throw(p));
}

TEST(Lowering, SemanticErrorsStopBeforeAnyPass) {
    auto src = adsl::testing::replace_once(adsl::testing::fixture_source("relu"), "copyin load {", "copyout load {");
    auto r = lowering::run_pipeline(adsl::testing::parse_or_throw(src), {});
    EXPECT_FALSE(r.unit);
    EXPECT_EQ(r.failed_pass, 0);
    EXPECT_TRUE(r.trace.records.empty());
    EXPECT_TRUE(has_errors(r.diagnostics));
}

TEST(Lowering, PadSitesIsIdempotent) {
    auto p = adsl::testing::load_fixture_program("sum_rows");
    auto t = adsl::testing::lower_or_throw(p);
    std::set<int> all;
    for (const auto& f : t.stage_fns)
        for (const auto& i : f.body)
            if (target::is_global_copy(i.kind)) all.insert(i.site);
    auto once = lowering::pad_sites(t, all);
    EXPECT_EQ(lowering::pad_sites(once, all), once);
    auto in = vm::random_inputs(p, *vm::find_operator("sum_rows"), {{"R", 30}, {"C", 45}}, 1);
    // Padding every site keeps results bitwise identical.
    EXPECT_TRUE(vm::bitwise_equal(target::interpret_target(once, in, {})->at("y"),
                                  target::interpret_target(t, in, {})->at("y")));
}
