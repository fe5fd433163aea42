#include <random>

#include <gtest/gtest.h>

#include "../support/support.hpp"
#include "adsl/rules.hpp"
#include "adsl/semantic/alignment.hpp"
#include "adsl/semantic/checks.hpp"
#include "adsl/semantic/host_eval.hpp"

using namespace adsl;
using adsl::testing::fixture_source;
using adsl::testing::parse_or_throw;
using adsl::testing::replace_once;

namespace {

Diagnostics check(const std::string& src, const vm::NpuConfig& cfg = {}) {
    return semantic::run_checks(parse_or_throw(src), cfg);
}

struct RuleCase {
    const char* rule;
    const char* fixture;
    const char* from;
    const char* to;
};

const RuleCase kCases[] = {
    {"SEM-UNDEF", "relu", "vrelu(y_out[0..n], x_in[0..n]);", "vrelu(y_out[0..n], z_in[0..n]);"},
    {"SEM-DUP", "relu", "alloc_ub y_out: f32[tile] stream_out;", "alloc_ub y_out: f32[tile] stream_out;\n    alloc_ub y_out: f32[tile] temp;"},
    {"SEM-ARITY", "relu", "vrelu(y_out[0..n], x_in[0..n]);", "vrelu(y_out[0..n]);"},
    {"SEM-ARITY", "relu", "launch relu<blocks>(x, y, tile)", "launch relu<blocks>(x, y)"},
    {"SEM-KIND", "relu", "vrelu(y_out[0..n], x_in[0..n]);", "vrelu(y_out[0..n], tile);"},
    {"SEM-DTYPE", "relu", "alloc_ub y_out: f32[tile] stream_out;", "alloc_ub y_out: f16[tile] stream_out;"},
    {"STG-G2L-PLACE", "relu", "copyin load {", "copyout load {"},
    {"STG-L2G-PLACE", "relu", "copyout store {", "copyin store {"},
    {"STG-COMPUTE-PLACE", "relu", "compute act {", "copyin act {"},
    {"STG-GM-IN-COMPUTE", "relu", "vrelu(y_out[0..n], x_in[0..n]);", "vrelu(y_out[0..n], x[0..n]);"},
    {"STG-SYNC-PLACE", "relu", "compute act {", "compute act { sync_all;"},
    {"STG-NESTED", "relu", "compute act {", "compute act { compute inner { vrelu(y_out[0..n], x_in[0..n]); }"},
    {"STG-USE-BEFORE-DEF", "relu", "copyin load {", "compute early { vrelu(y_out[0..n], x_in[0..n]); }\n        copyin load {"},
    {"STG-UNCONSUMED", "softmax", "copyout store { copy_l2g(y[off..off + cols], y_out[0..cols]); }",
     "copyin again { copy_g2l(x_in[0..cols], x[off..off + cols]); }\n        copyout store { copy_l2g(y[off..off + cols], y_out[0..cols]); }"},
    {"BUF-UB-OVERFLOW", "relu", "tiling tile = 256", "tiling tile = 65536"},
    {"BUF-L1-OVERFLOW", "softmax", "alloc_ub s: f32[8] temp;", "alloc_ub s: f32[8] temp;\n    alloc_l1 big: f32[1048576] temp;"},
    {"SEM-SPACE", "softmax", "alloc_ub s: f32[8] temp;", "alloc_l1 s: f32[8] temp;"},
    {"BUF-SLICE-OOB", "relu", "vrelu(y_out[0..n], x_in[0..n]);", "vrelu(y_out[0..n], x_in[1..n + 1]);"},
    {"BUF-ROLE", "relu", "alloc_ub x_in: f32[tile] stream_in;", "alloc_ub x_in: f32[tile] temp;"},
    {"BUF-COUNT", "relu", "vrelu(y_out[0..n], x_in[0..n]);", "vrelu(y_out[0..n], x_in[0..n - 1]);"},
    {"BUF-LOCAL-ALIGN", "sum_rows", "copy_g2l(x_in[0..nr * pitch]", "copy_g2l(x_in[1..nr * pitch + 1]"},
    {"TIL-NONPOS", "relu", "tiling tile = 256", "tiling tile = 0"},
    {"TIL-GAP", "relu", "let n = min(tile, block_start + block_len - off);", "let n = min(tile - 1, block_start + block_len - off);"},
    {"TIL-OVERLAP", "relu", "let n = min(tile, block_start + block_len - off);", "let n = min(tile + 1, block_start + block_len + 1 - off);"},
    {"TIL-RATIONALE", "relu", "@ \"at least 64 elements per block keeps transfers worthwhile\"", "@ \"  \""},
    {"TIL-CYCLE", "relu", "tiling tile = 256", "tiling tile = blocks * 0 + tile"},
    {"SEM-SHAPE", "relu", "shape N = 16384;", "shape M = 16384;"},
};

}  // namespace

TEST(Checks, EveryFixtureIsClean) {
    for (const auto& m : cli::load_corpus(adsl::testing::fixtures_dir())) {
        auto d = semantic::run_checks(adsl::testing::load_fixture_program(m), {});
        EXPECT_FALSE(has_errors(d)) << m.name << ": " << (d.empty() ? "" : to_json_line(d[0]));
    }
}

TEST(Checks, EachRuleFires) {
    for (const auto& c : kCases) {
        const std::string src = replace_once(fixture_source(c.fixture), c.from, c.to);
        Outcome<dsl::Program> parsed = dsl::parse_program(src);
        Diagnostics d = parsed.ok() ? semantic::run_checks(*parsed, {}) : parsed.diagnostics;
        std::string got;
        for (const auto& x : d) got += to_json_line(x) + "\n";
        EXPECT_TRUE(has_rule(d, c.rule)) << c.rule << " not reported; got\n" << got;
        for (const auto& x : d) {
            if (x.rule_id == c.rule) {
                EXPECT_GE(x.span.line, 1) << c.rule;
            }
        }
    }
}

TEST(Checks, EveryCatalogRuleIsDocumentedInTheCatalog) {
    std::set<std::string> ids;
    for (auto r : rules::kAll) ids.insert(std::string(r));
    for (const auto& c : kCases) EXPECT_TRUE(ids.count(c.rule)) << c.rule;
}

TEST(Checks, BlocksBeyondCoresIsOnlyAWarning) {
    const std::string src = replace_once(fixture_source("relu"), "min(CORES, ceil_div(N, 64))", "ceil_div(N, 64)");
    auto d = check(src);
    EXPECT_FALSE(has_errors(d));
    EXPECT_TRUE(has_rule(d, rules::kSemBlocksExceedCores));
}

TEST(HostEval, PartitionProperties) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
        const int64_t d = 1 + static_cast<int64_t>(rng() % 5000), b = 1 + static_cast<int64_t>(rng() % 70);
        auto parts = semantic::partition(d, b);
        ASSERT_EQ(static_cast<int64_t>(parts.size()), b);
        int64_t next = 0, lo = INT64_MAX, hi = 0;
        for (const auto& p : parts) {
            EXPECT_EQ(p.start, next);
            next += p.len;
            lo = std::min(lo, p.len);
            hi = std::max(hi, p.len);
        }
        EXPECT_EQ(next, d);
        EXPECT_LE(hi - lo, 1);
    }
}

TEST(HostEval, CoresBuiltinFollowsConfig) {
    auto p = adsl::testing::load_fixture_program("relu");
    for (int64_t cores : {1, 3, 8, 32}) {
        vm::NpuConfig cfg;
        cfg.num_cores = cores;
        auto plan = semantic::eval_host(p, {{"N", 16384}}, cfg);
        ASSERT_TRUE(plan.ok());
        EXPECT_EQ(plan->num_blocks, std::min<int64_t>(cores, (16384 + 63) / 64));
        EXPECT_EQ(plan->domain, 16384);
    }
}

TEST(HostEval, MissingDimension) {
    auto p = adsl::testing::load_fixture_program("relu");
    auto plan = semantic::eval_host(p, {}, {});
    EXPECT_FALSE(plan.ok());
    EXPECT_TRUE(has_rule(plan.diagnostics, rules::kSemShape));
}

TEST(Alignment, RecordsMatchByteArithmetic) {
    auto p = adsl::testing::load_fixture_program("softmax");
    auto rep = semantic::analyze_alignment(p, vm::NpuConfig{});
    ASSERT_FALSE(rep.records.empty());
    for (const auto& r : rep.records)
        EXPECT_EQ(r.aligned, r.byte_count % 32 == 0 && r.offset_bytes % 32 == 0 && r.stride_bytes % 32 == 0);
    // C = 100 f32 rows are 400 bytes, so both transfer sites are unaligned.
    EXPECT_EQ(rep.unaligned_sites().size(), 2u);
}

TEST(Alignment, AlignedProgramHasNoUnalignedSites) {
    const std::string src = replace_once(fixture_source("relu"), "shape N = 1000;", "");
    auto rep = semantic::analyze_alignment(parse_or_throw(src), vm::NpuConfig{});
    EXPECT_TRUE(rep.unaligned_sites().empty());
}
