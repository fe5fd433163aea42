#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "../support/support.hpp"
#include "adsl/rules.hpp"
#include "adsl/vm/compare.hpp"
#include "adsl/vm/interpreter.hpp"
#include "adsl/vm/numeric.hpp"
#include "adsl/vm/reference.hpp"
#include "adsl/vm/tensor_io.hpp"
#include "adsl/vm/timed.hpp"

using namespace adsl;
using vm::TensorValue;

TEST(Config, DefaultsRoundTripThroughText) {
    vm::NpuConfig cfg;
    EXPECT_EQ(vm::validate(cfg), "");
    EXPECT_EQ(vm::parse_config(vm::render_config(cfg)), cfg);
}

TEST(Config, ParsesKeysAndComments) {
    auto cfg = vm::parse_config("# machine\nnum_cores = 4\n  queue_depth_in=1  # shallow\n");
    EXPECT_EQ(cfg.num_cores, 4);
    EXPECT_EQ(cfg.queue_depth_in, 1);
    EXPECT_EQ(cfg.queue_depth_out, vm::NpuConfig{}.queue_depth_out);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(vm::parse_config("cores = 4"), std::invalid_argument);
    EXPECT_THROW(vm::parse_config("num_cores = four"), std::invalid_argument);
    EXPECT_THROW(vm::parse_config("num_cores = 0"), std::invalid_argument);
}

TEST(TensorIo, RoundTripsEveryDtype) {
    std::mt19937_64 rng(1);
    for (auto dt : {dsl::DType::F16, dsl::DType::F32, dsl::DType::I32, dsl::DType::U8}) {
        std::vector<double> v(37);
        for (auto& x : v) x = vm::round_to(dt, static_cast<double>(rng() % 200) - 100.0 + 0.25);
        auto t = TensorValue::from(dt, {37}, v);
        auto back = vm::decode_tensor(vm::encode_tensor(t));
        EXPECT_EQ(back.dtype, dt);
        EXPECT_EQ(back.shape, t.shape);
        EXPECT_TRUE(vm::bitwise_equal(back, t));
    }
}

TEST(TensorIo, RejectsTruncatedInput) {
    auto bytes = vm::encode_tensor(TensorValue::zeros(dsl::DType::F32, {4, 4}));
    EXPECT_THROW(vm::decode_tensor(bytes.substr(0, bytes.size() - 1)), std::runtime_error);
    EXPECT_THROW(vm::decode_tensor("nope"), std::runtime_error);
}

TEST(Numeric, F16RoundingMatchesBitLayout) {
    // 1 + 2^-10 is the f16 successor of 1; halfway values round to even.
    EXPECT_EQ(vm::round_f16(1.0 + std::ldexp(1.0, -10)), 1.0 + std::ldexp(1.0, -10));
    EXPECT_EQ(vm::round_f16(1.0 + std::ldexp(1.0, -11)), 1.0);
    EXPECT_EQ(vm::round_f16(1.0 + 3 * std::ldexp(1.0, -11)), 1.0 + std::ldexp(1.0, -9));
    EXPECT_TRUE(std::isinf(vm::round_f16(70000.0)));
    for (uint16_t b : {uint16_t{0x3c00}, uint16_t{0x0001}, uint16_t{0x7bff}, uint16_t{0xc000}})
        EXPECT_EQ(vm::f16_bits(vm::f16_from_bits(b)), b);
}

TEST(Numeric, IntegerRoundingSaturates) {
    EXPECT_EQ(vm::round_to(dsl::DType::U8, 300.0), 255.0);
    EXPECT_EQ(vm::round_to(dsl::DType::U8, -4.0), 0.0);
    EXPECT_EQ(vm::round_to(dsl::DType::I32, 2.5), 2.0);
    EXPECT_EQ(vm::round_to(dsl::DType::F32, 0.1), static_cast<double>(0.1f));
}

TEST(Compare, ToleranceBoundary) {
    auto ref = TensorValue::from(dsl::DType::F32, {2}, {1.0, 100.0});
    auto ok = TensorValue::from(dsl::DType::F32, {2}, {1.0 + 0.5e-5, 100.0});
    EXPECT_TRUE(vm::compare_tensors(ok, ref, 1e-5, 1e-6).pass);
    auto bad = TensorValue::from(dsl::DType::F32, {2}, {1.0, 100.01});
    auto rep = vm::compare_tensors(bad, ref, 1e-5, 1e-6);
    EXPECT_FALSE(rep.pass);
    EXPECT_EQ(rep.worst_index, 1);
    EXPECT_EQ(rep.failures, 1);
}

TEST(Compare, NanAndShapeMismatch) {
    auto a = TensorValue::from(dsl::DType::F32, {1}, {std::nan("")});
    EXPECT_TRUE(vm::compare_tensors(a, a, 0, 0).pass);
    auto b = TensorValue::from(dsl::DType::F32, {1}, {0.0});
    EXPECT_FALSE(vm::compare_tensors(a, b, 1, 1).pass);
    EXPECT_THROW(vm::compare_tensors(b, TensorValue::zeros(dsl::DType::F32, {2}), 0, 0), std::invalid_argument);
}

TEST(Reference, SmallHandCases) {
    auto x = TensorValue::from(dsl::DType::F32, {2, 4}, {1, 2, 3, 4, -1, 5, 0, 2});
    auto sum = vm::reference_eval("sum_rows", {{"x", x}});
    EXPECT_EQ(sum.at("y").data, (std::vector<double>{10, 6}));
    auto mx = vm::reference_eval("max_rows", {{"x", x}});
    EXPECT_EQ(mx.at("y").data, (std::vector<double>{4, 5}));
    auto cs = vm::reference_eval("cumsum_rows", {{"x", x}});
    EXPECT_EQ(cs.at("y").data, (std::vector<double>{1, 3, 6, 10, -1, 4, 4, 6}));
    auto mp = vm::reference_eval("max_pool", {{"x", x}});
    EXPECT_EQ(mp.at("y").data, (std::vector<double>{4, 5}));
    auto ap = vm::reference_eval("avg_pool", {{"x", x}});
    EXPECT_EQ(ap.at("y").data, (std::vector<double>{2.5, 1.5}));
    EXPECT_THROW(vm::reference_eval("nope", {{"x", x}}), std::invalid_argument);
    EXPECT_THROW(vm::reference_eval("relu", {}), std::invalid_argument);
}

TEST(Reference, SoftmaxRowsSumToOne) {
    auto p = adsl::testing::load_fixture_program("softmax");
    auto in = vm::random_inputs(p, *vm::find_operator("softmax_rows"), {{"R", 5}, {"C", 33}}, 9);
    auto y = vm::reference_eval("softmax_rows", in).at("y");
    for (int r = 0; r < 5; ++r) {
        double s = 0;
        for (int c = 0; c < 33; ++c) s += y.data[static_cast<std::size_t>(r * 33 + c)];
        EXPECT_NEAR(s, 1.0, 1e-5);
    }
}

TEST(Reference, RandomInputsAreSeededAndInDomain) {
    auto p = adsl::testing::load_fixture_program("masked_cumsum");
    const auto* spec = vm::find_operator("masked_cumsum_rows");
    auto a = vm::random_inputs(p, *spec, {{"R", 4}, {"C", 16}}, 1);
    auto b = vm::random_inputs(p, *spec, {{"R", 4}, {"C", 16}}, 1);
    EXPECT_EQ(a, b);
    for (double v : a.at("mask").data) EXPECT_TRUE(v == 0.0 || v == 1.0);
    for (double v : a.at("x").data) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    EXPECT_EQ(a.at("mask").dtype, dsl::DType::U8);
}

TEST(Interpreter, ReluMatchesOracle) {
    auto p = adsl::testing::load_fixture_program("relu");
    auto in = vm::random_inputs(p, *vm::find_operator("relu"), {{"N", 1000}}, 4);
    auto out = vm::run_functional(p, in, {});
    ASSERT_TRUE(out.ok());
    EXPECT_EQ(out->at("y"), vm::reference_eval("relu", in).at("y"));
}

TEST(Interpreter, InputProblemsAreDiagnostics) {
    auto p = adsl::testing::load_fixture_program("relu");
    auto missing = vm::run_functional(p, {}, {});
    EXPECT_FALSE(missing.ok());
    EXPECT_TRUE(has_rule(missing.diagnostics, rules::kSemShape));
    auto wrong = vm::run_functional(p, {{"x", TensorValue::zeros(dsl::DType::F16, {10})}}, {});
    EXPECT_FALSE(wrong.ok());
    EXPECT_TRUE(has_rule(wrong.diagnostics, rules::kSemDtype));
}

TEST(Interpreter, UndeclaredShapesRunToo) {
    auto p = adsl::testing::load_fixture_program("softmax");
    auto in = vm::random_inputs(p, *vm::find_operator("softmax_rows"), {{"R", 3}, {"C", 17}}, 2);
    auto out = vm::run_functional(p, in, {});
    ASSERT_TRUE(out.ok());
    auto want = vm::reference_eval("softmax_rows", in).at("y");
    EXPECT_TRUE(vm::compare_tensors(out->at("y"), want, 1e-5, 1e-6).pass);
}

TEST(Timed, LatencyFollowsConfig) {
    vm::NpuConfig cfg;
    EXPECT_EQ(vm::instruction_latency(vm::Queue::MTE2, 1, cfg), cfg.lat_issue + cfg.lat_mte_per_256B);
    EXPECT_EQ(vm::instruction_latency(vm::Queue::MTE3, 257, cfg), cfg.lat_issue + 2 * cfg.lat_mte_per_256B);
    EXPECT_EQ(vm::instruction_latency(vm::Queue::VEC, 1024, cfg), cfg.lat_issue + 4 * cfg.lat_vec_per_256B);
    EXPECT_EQ(vm::instruction_latency(vm::Queue::SCALAR, 0, cfg), cfg.lat_scalar);
}

TEST(Timed, CountsAndBoundsForRelu) {
    auto p = adsl::testing::load_fixture_program("relu");
    auto in = vm::random_inputs(p, *vm::find_operator("relu"), {{"N", 1000}}, 4);
    vm::NpuConfig cfg;
    auto r = vm::run_timed(p, in, cfg);
    ASSERT_TRUE(r.ok());
    const auto& c = r->cost;
    // 8 blocks of 125 elements, one tile of 256 each: one load, one relu, one store per block.
    EXPECT_EQ(c.count(vm::Queue::MTE2), 8);
    EXPECT_EQ(c.count(vm::Queue::VEC), 8);
    EXPECT_EQ(c.count(vm::Queue::MTE3), 8);
    EXPECT_EQ(c.per_block_makespan.size(), 8u);
    EXPECT_LE(c.makespan_cycles, c.total_latency);
    for (auto q : vm::kQueues) EXPECT_GE(c.makespan_cycles, c.busy(q));
    EXPECT_EQ(r->outputs.at("y"), vm::run_functional(p, in, cfg)->at("y"));
    auto j = vm::to_json(c);
    EXPECT_EQ(j.at("per_queue_busy").size(), 4u);
}

TEST(Timed, OneCoreSerializesBlocks) {
    auto p = adsl::testing::load_fixture_program("relu");
    auto in = vm::random_inputs(p, *vm::find_operator("relu"), {{"N", 1000}}, 4);
    vm::NpuConfig one;
    one.num_cores = 1;
    auto r = vm::run_timed(p, in, one);
    ASSERT_TRUE(r.ok());
    int64_t sum = 0;
    for (auto b : r->cost.per_block_makespan) sum += b;
    EXPECT_EQ(r->cost.makespan_cycles, sum);
}
