#include <random>

#include <gtest/gtest.h>

#include "../support/support.hpp"
#include "adsl/dsl/expr.hpp"
#include "adsl/dsl/parser.hpp"
#include "adsl/dsl/render.hpp"
#include "adsl/rules.hpp"

using namespace adsl;
using adsl::testing::fixture_source;

namespace {

std::vector<std::string> fixture_names() {
    std::vector<std::string> names;
    for (const auto& m : cli::load_corpus(adsl::testing::fixtures_dir())) names.push_back(m.name);
    return names;
}

int64_t eval_const(const std::string& text) {
    auto p = dsl::parse_program("host h(x: [" + text + "] f32) { launch k<1>(x); }\nkernel k(x) { }");
    EXPECT_TRUE(p.ok());
    auto r = dsl::evaluate_int(p->host.params[0].dims[0], [](std::string_view) { return std::optional<dsl::Value>{}; });
    return std::get<int64_t>(r);
}

}  // namespace

TEST(Parser, ParsesEveryFixture) {
    for (const auto& name : fixture_names()) {
        auto r = dsl::parse_program(fixture_source(name));
        EXPECT_TRUE(r.ok()) << name;
        EXPECT_TRUE(r.diagnostics.empty()) << name;
    }
}

TEST(Parser, RenderRoundTripIsStructurallyEqual) {
    for (const auto& name : fixture_names()) {
        auto a = dsl::parse_program(fixture_source(name));
        ASSERT_TRUE(a.ok()) << name;
        const std::string text = dsl::render_program(*a);
        auto b = dsl::parse_program(text);
        ASSERT_TRUE(b.ok()) << name << "\n" << text;
        EXPECT_EQ(*a, *b) << name;
        EXPECT_EQ(text, dsl::render_program(*b)) << name;
    }
}

TEST(Parser, ReportsSyntaxErrorWithSpan) {
    const std::string src = "host h(x: [N] f32) {\n    launch k<1>(x)\n}\nkernel k(x) { copyin a { copy_g2l(; } }";
    auto r = dsl::parse_program(src);
    ASSERT_FALSE(r.ok());
    ASSERT_FALSE(r.diagnostics.empty());
    EXPECT_EQ(r.diagnostics[0].rule_id.rfind("PARSE-", 0), 0u);
    EXPECT_EQ(r.diagnostics[0].span.line, 4);
}

TEST(Parser, UnknownDtypeAndPrimitive) {
    auto r = dsl::parse_program("host h(x: [4] f64) { launch k<1>(x); }\nkernel k(x) { }");
    ASSERT_FALSE(r.ok());
    EXPECT_TRUE(has_rule(r.diagnostics, rules::kParseSyntax));
    auto q = dsl::parse_program("host h(x: [4] f32) { launch k<1>(x); }\nkernel k(x) { compute c { vsqrt(x[0..1], x[0..1]); } }");
    ASSERT_FALSE(q.ok());
    EXPECT_NE(q.diagnostics[0].message.find("vsqrt"), std::string::npos);
}

// Property: corrupting a valid program at random never throws and any
// failure carries a span inside the source.
TEST(Parser, RandomCorruptionNeverThrows) {
    const std::string base = fixture_source("softmax");
    std::mt19937_64 rng(11);
    const std::string junk = "{}[]();:,.@\"<>+-*/%=0123456789abcxyz \n";
    for (int i = 0; i < 2000; ++i) {
        std::string s = base;
        const int edits = 1 + static_cast<int>(rng() % 4);
        for (int e = 0; e < edits; ++e) {
            const std::size_t pos = rng() % s.size();
            switch (rng() % 3) {
                case 0: s.erase(pos, 1 + rng() % 5); break;
                case 1: s.insert(pos, 1, junk[rng() % junk.size()]); break;
                default: s[pos] = junk[rng() % junk.size()]; break;
            }
            if (s.empty()) s = "x";
        }
        Outcome<dsl::Program> r;
        ASSERT_NO_THROW(r = dsl::parse_program(s)) << s;
        if (!r.ok()) {
            ASSERT_FALSE(r.diagnostics.empty());
            for (const auto& d : r.diagnostics) {
                EXPECT_GE(d.span.line, 1);
                EXPECT_LE(d.span.offset, s.size());
            }
        }
    }
}

TEST(Expr, IntegerBuiltins) {
    EXPECT_EQ(eval_const("ceil_div(10, 3)"), 4);
    EXPECT_EQ(eval_const("align_up(33, 32)"), 64);
    EXPECT_EQ(eval_const("min(7, 3) + max(2, 5)"), 8);
    EXPECT_EQ(eval_const("2 + 3 * 4"), 14);
    EXPECT_EQ(eval_const("(2 + 3) * 4"), 20);
    EXPECT_EQ(eval_const("17 % 5"), 2);
}

TEST(Expr, FoldMatchesEvaluate) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
        const int64_t a = static_cast<int64_t>(rng() % 1000) + 1, b = static_cast<int64_t>(rng() % 64) + 1;
        const std::string text = "ceil_div(" + std::to_string(a) + " * 3, " + std::to_string(b) + ") + align_up(" +
                                 std::to_string(a) + ", 32) - min(" + std::to_string(a) + ", " + std::to_string(b) + ")";
        auto p = dsl::parse_program("host h(x: [" + text + "] f32) { launch k<1>(x); }\nkernel k(x) { }");
        ASSERT_TRUE(p.ok());
        const auto& e = p->host.params[0].dims[0];
        auto folded = dsl::as_constant(dsl::fold(e));
        ASSERT_TRUE(folded.has_value());
        const int64_t want = (a * 3 + b - 1) / b + (a + 31) / 32 * 32 - std::min(a, b);
        EXPECT_EQ(*folded, want);
    }
}

TEST(Expr, DivisionByZeroIsAnError) {
    auto p = dsl::parse_program("host h(x: [4 / 0] f32) { launch k<1>(x); }\nkernel k(x) { }");
    ASSERT_TRUE(p.ok());
    auto r = dsl::evaluate_int(p->host.params[0].dims[0], [](std::string_view) { return std::optional<dsl::Value>{}; });
    EXPECT_TRUE(std::holds_alternative<dsl::EvalError>(r));
}
