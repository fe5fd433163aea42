#include "adsl/dsl/parser.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

#include "adsl/dsl/expr.hpp"
#include "adsl/dsl/primitives.hpp"
#include "adsl/rules.hpp"
#include "lexer.hpp"

namespace adsl::dsl {

using detail::Tok;
using detail::Token;

namespace {

constexpr std::array kReserved = {
    "host", "kernel", "tiling", "launch", "shape", "alloc_ub", "alloc_l1", "copyin", "compute",
    "copyout", "for", "in", "let", "sync_all", "out", "work", "over", "stream_in", "stream_out",
    "temp", "f16", "f32", "i32", "u8", "min", "max", "ceil_div", "align_up",
};

constexpr int kMaxDepth = 200;

struct ParseFailure {};

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Outcome<Program> run() {
        Outcome<Program> out;
        try {
            out.value = program();
        } catch (const ParseFailure&) {
            out.value.reset();
        }
        out.diagnostics = std::move(diags_);
        return out;
    }

  private:
    // ---- token helpers ----------------------------------------------------
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t k = std::min(i_ + ahead, toks_.size() - 1);
        return toks_[k];
    }
    bool at(Tok t) const { return peek().kind == t; }
    bool at_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }
    const Token& take() {
        const Token& t = toks_[i_];
        if (i_ + 1 < toks_.size()) ++i_;
        return t;
    }

    [[noreturn]] void fail(std::string_view rule, const Span& span, std::string msg) {
        diags_.push_back(make_error(std::string(rule), span, std::move(msg)));
        throw ParseFailure{};
    }
    [[noreturn]] void syntax(std::string msg) { fail(rules::kParseSyntax, peek().span, std::move(msg)); }

    const Token& expect(Tok t, std::string_view context) {
        if (!at(t)) {
            syntax("expected " + std::string(detail::token_name(t)) + " " + std::string(context) + ", found " +
                   describe(peek()));
        }
        return take();
    }
    void expect_word(std::string_view w) {
        if (!at_word(w)) syntax("expected '" + std::string(w) + "', found " + describe(peek()));
        take();
    }
    void optional_semi() {
        if (at(Tok::Semi)) take();
    }
    static std::string describe(const Token& t) {
        if (t.kind == Tok::Ident || t.kind == Tok::Int || t.kind == Tok::Float) return "'" + t.text + "'";
        return std::string(detail::token_name(t.kind));
    }

    std::string identifier(std::string_view context) {
        const Token& t = expect(Tok::Ident, context);
        if (is_reserved_word(t.text)) fail(rules::kParseSyntax, t.span, "reserved word '" + t.text + "' used as a name");
        return t.text;
    }

    static Span cover(const Span& a, const Span& b) {
        Span s = a;
        if (b.offset + static_cast<std::size_t>(b.len) > a.offset)
            s.len = static_cast<int>(b.offset + static_cast<std::size_t>(b.len) - a.offset);
        return s;
    }
    Span since(const Span& start) const {
        const Token& prev = toks_[i_ == 0 ? 0 : i_ - 1];
        return cover(start, prev.span);
    }

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& parser) : p(parser) {
            if (++p.depth_ > kMaxDepth) p.syntax("nesting too deep");
        }
        ~DepthGuard() { --p.depth_; }
    };

    // ---- program ----------------------------------------------------------
    Program program() {
        std::optional<HostFn> host;
        std::optional<KernelFn> kernel;
        while (!at(Tok::End)) {
            if (at_word("host")) {
                if (host) fail(rules::kParseDup, peek().span, "a program has exactly one host function");
                host = host_fn();
            } else if (at_word("kernel")) {
                if (kernel) fail(rules::kParseDup, peek().span, "a program has exactly one kernel function");
                kernel = kernel_fn();
            } else {
                syntax("expected 'host' or 'kernel', found " + describe(peek()));
            }
        }
        if (!host) syntax("missing host function");
        if (!kernel) syntax("missing kernel function");
        Program p;
        p.name = kernel->name;
        p.host = std::move(*host);
        p.kernel = std::move(*kernel);
        return p;
    }

    // ---- host -------------------------------------------------------------
    HostFn host_fn() {
        HostFn h;
        Span start = peek().span;
        expect_word("host");
        h.name = identifier("after 'host'");
        expect(Tok::LParen, "to open the host parameter list");
        if (!at(Tok::RParen)) {
            h.params.push_back(tensor_param());
            while (at(Tok::Comma)) {
                take();
                h.params.push_back(tensor_param());
            }
        }
        expect(Tok::RParen, "to close the host parameter list");
        expect(Tok::LBrace, "to open the host body");
        bool have_launch = false;
        while (!at(Tok::RBrace)) {
            if (at_word("shape")) {
                h.shapes.push_back(shape_decl());
            } else if (at_word("tiling")) {
                h.tiling.push_back(tiling_decl());
            } else if (at_word("launch")) {
                if (have_launch) fail(rules::kParseDup, peek().span, "host function has more than one launch");
                h.launch = launch_stmt();
                have_launch = true;
            } else {
                syntax("expected 'shape', 'tiling' or 'launch' in host body, found " + describe(peek()));
            }
        }
        if (!have_launch) syntax("host function has no launch statement");
        expect(Tok::RBrace, "to close the host body");
        h.span = since(start);
        return h;
    }

    TensorParam tensor_param() {
        TensorParam t;
        Span start = peek().span;
        if (at_word("out")) {
            take();
            t.role = TensorRole::Out;
        } else if (at_word("work")) {
            take();
            t.role = TensorRole::Work;
        }
        t.name = identifier("as a tensor parameter name");
        expect(Tok::Colon, "after tensor parameter name");
        expect(Tok::LBracket, "to open the dimension list");
        if (!at(Tok::RBracket)) {
            t.dims.push_back(expr());
            while (at(Tok::Comma)) {
                take();
                t.dims.push_back(expr());
            }
        }
        expect(Tok::RBracket, "to close the dimension list");
        t.dtype = dtype();
        t.span = since(start);
        return t;
    }

    DType dtype() {
        const Token& t = expect(Tok::Ident, "as a dtype");
        auto d = parse_dtype(t.text);
        if (!d) fail(rules::kParseSyntax, t.span, "unknown dtype '" + t.text + "' (expected f16, f32, i32 or u8)");
        return *d;
    }

    ShapeDecl shape_decl() {
        ShapeDecl s;
        Span start = peek().span;
        expect_word("shape");
        while (true) {
            std::string name = identifier("in shape declaration");
            expect(Tok::Assign, "in shape binding");
            bool negative = false;
            if (at(Tok::Minus)) {
                take();
                negative = true;
            }
            const Token& v = expect(Tok::Int, "as a shape value");
            int64_t value = int_literal(v);
            s.bindings.emplace_back(std::move(name), negative ? -value : value);
            if (!at(Tok::Comma)) break;
            take();
        }
        optional_semi();
        s.span = since(start);
        return s;
    }

    TilingDecl tiling_decl() {
        TilingDecl t;
        Span start = peek().span;
        expect_word("tiling");
        t.name = identifier("as a tiling parameter name");
        expect(Tok::Assign, "in tiling declaration");
        t.expr = expr();
        expect(Tok::At, "before the tiling rationale annotation");
        t.rationale = expect(Tok::String, "as the tiling rationale").text;
        optional_semi();
        t.span = since(start);
        return t;
    }

    LaunchStmt launch_stmt() {
        LaunchStmt l;
        Span start = peek().span;
        expect_word("launch");
        l.kernel = identifier("as the launched kernel");
        expect(Tok::Lt, "to open the block count");
        l.num_blocks = expr();
        expect(Tok::Gt, "to close the block count");
        expect(Tok::LParen, "to open the launch arguments");
        if (!at(Tok::RParen)) {
            l.args.push_back(expr());
            while (at(Tok::Comma)) {
                take();
                l.args.push_back(expr());
            }
        }
        expect(Tok::RParen, "to close the launch arguments");
        if (at_word("over")) {
            take();
            l.domain = expr();
        }
        optional_semi();
        l.span = since(start);
        return l;
    }

    // ---- kernel -----------------------------------------------------------
    KernelFn kernel_fn() {
        KernelFn k;
        Span start = peek().span;
        expect_word("kernel");
        k.name = identifier("after 'kernel'");
        expect(Tok::LParen, "to open the kernel parameter list");
        if (!at(Tok::RParen)) {
            k.params.push_back(kernel_param());
            while (at(Tok::Comma)) {
                take();
                k.params.push_back(kernel_param());
            }
        }
        expect(Tok::RParen, "to close the kernel parameter list");
        expect(Tok::LBrace, "to open the kernel body");
        while (!at(Tok::RBrace)) {
            if (at_word("alloc_ub") || at_word("alloc_l1")) {
                k.buffers.push_back(buffer_decl());
            } else {
                k.body.push_back(stmt());
            }
        }
        expect(Tok::RBrace, "to close the kernel body");
        k.span = since(start);
        return k;
    }

    KernelParam kernel_param() {
        Span s = peek().span;
        return KernelParam{identifier("as a kernel parameter"), s};
    }

    BufferDecl buffer_decl() {
        BufferDecl b;
        Span start = peek().span;
        b.space = take().text == "alloc_ub" ? MemSpace::UB : MemSpace::L1;
        b.name = identifier("as a buffer name");
        expect(Tok::Colon, "after buffer name");
        b.dtype = dtype();
        expect(Tok::LBracket, "to open the buffer capacity");
        b.capacity = expr();
        expect(Tok::RBracket, "to close the buffer capacity");
        const Token& role = expect(Tok::Ident, "as the buffer role");
        if (role.text == "stream_in") b.role = BufferRole::StreamIn;
        else if (role.text == "stream_out") b.role = BufferRole::StreamOut;
        else if (role.text == "temp") b.role = BufferRole::Temp;
        else fail(rules::kParseSyntax, role.span, "unknown buffer role '" + role.text + "' (expected stream_in, stream_out or temp)");
        optional_semi();
        b.span = since(start);
        return b;
    }

    std::vector<Stmt> block_body() {
        std::vector<Stmt> body;
        expect(Tok::LBrace, "to open a block");
        while (!at(Tok::RBrace)) {
            if (at_word("alloc_ub") || at_word("alloc_l1"))
                syntax("buffers must be declared at the top level of the kernel");
            body.push_back(stmt());
        }
        expect(Tok::RBrace, "to close a block");
        return body;
    }

    Stmt stmt() {
        DepthGuard guard(*this);
        Stmt s;
        Span start = peek().span;
        if (at_word("for")) {
            take();
            ForStmt f;
            f.var = identifier("as the loop variable");
            expect_word("in");
            f.begin = expr();
            expect(Tok::DotDot, "in loop range");
            f.end = expr();
            f.body = block_body();
            s.node = std::move(f);
        } else if (at_word("let")) {
            take();
            LetStmt l;
            l.name = identifier("after 'let'");
            expect(Tok::Assign, "in let statement");
            l.value = expr();
            optional_semi();
            s.node = std::move(l);
        } else if (at_word("copyin") || at_word("compute") || at_word("copyout")) {
            StageBlock b;
            const std::string& kw = take().text;
            b.kind = kw == "copyin" ? StageKind::CopyIn : kw == "compute" ? StageKind::Compute : StageKind::CopyOut;
            Span label_span = peek().span;
            b.label = identifier("as the block label");
            if (!labels_.insert(b.label).second)
                fail(rules::kParseDup, label_span, "duplicate stage block label '" + b.label + "'");
            b.body = block_body();
            s.node = std::move(b);
        } else if (at_word("sync_all")) {
            take();
            optional_semi();
            s.node = SyncStmt{};
        } else if (at(Tok::Ident) && peek(1).kind == Tok::LParen) {
            s.node = primitive_call();
        } else {
            syntax("expected a statement, found " + describe(peek()));
        }
        s.span = since(start);
        return s;
    }

    PrimitiveCall primitive_call() {
        const Token& name = take();
        auto op = find_primitive(name.text);
        if (!op) fail(rules::kParseSyntax, name.span, "unknown primitive '" + name.text + "'");
        PrimitiveCall c;
        c.op = *op;
        c.site.value = next_site_++;
        expect(Tok::LParen, "to open primitive arguments");
        if (!at(Tok::RParen)) {
            c.args.push_back(operand());
            while (at(Tok::Comma)) {
                take();
                c.args.push_back(operand());
            }
        }
        expect(Tok::RParen, "to close primitive arguments");
        optional_semi();
        return c;
    }

    Operand operand() {
        Operand o;
        Span start = peek().span;
        if (at(Tok::Ident) && peek(1).kind == Tok::LBracket) {
            o.kind = Operand::Kind::Slice;
            o.name = identifier("as a sliced buffer or tensor");
            take();  // [
            o.begin = expr();
            expect(Tok::DotDot, "in slice");
            o.end = expr();
            expect(Tok::RBracket, "to close slice");
        } else {
            o.kind = Operand::Kind::Scalar;
            o.scalar = expr();
        }
        o.span = since(start);
        return o;
    }

    // ---- expressions ------------------------------------------------------
    Expr expr() {
        DepthGuard guard(*this);
        Span start = peek().span;
        Expr lhs = term();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            char op = take().text[0];
            Expr rhs = term();
            lhs = Expr::binary(op, std::move(lhs), std::move(rhs), since(start));
        }
        return lhs;
    }

    Expr term() {
        Span start = peek().span;
        Expr lhs = unary();
        while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
            char op = take().text[0];
            Expr rhs = unary();
            lhs = Expr::binary(op, std::move(lhs), std::move(rhs), since(start));
        }
        return lhs;
    }

    Expr unary() {
        DepthGuard guard(*this);
        if (at(Tok::Minus)) {
            Span start = take().span;
            Expr inner = unary();
            return Expr::neg(std::move(inner), since(start));
        }
        return primary();
    }

    int64_t int_literal(const Token& t) {
        int64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size())
            fail(rules::kParseLex, t.span, "integer literal out of range");
        return v;
    }

    Expr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Int: {
                take();
                return Expr::integer(int_literal(t), t.span);
            }
            case Tok::Float: {
                take();
                char* endp = nullptr;
                double v = std::strtod(t.text.c_str(), &endp);
                if (!std::isfinite(v)) fail(rules::kParseLex, t.span, "float literal out of range");
                return Expr::floating(v, t.span);
            }
            case Tok::Ident: {
                if (is_builtin_function(t.text) && peek(1).kind == Tok::LParen) {
                    Span start = take().span;
                    std::string fn = t.text;
                    take();  // (
                    std::vector<Expr> args;
                    if (!at(Tok::RParen)) {
                        args.push_back(expr());
                        while (at(Tok::Comma)) {
                            take();
                            args.push_back(expr());
                        }
                    }
                    expect(Tok::RParen, "to close the call");
                    if (args.size() != 2) fail(rules::kParseSyntax, since(start), "'" + fn + "' takes 2 arguments");
                    return Expr::call(std::move(fn), std::move(args), since(start));
                }
                std::string name = identifier("in expression");
                return Expr::ident(std::move(name), t.span);
            }
            case Tok::LParen: {
                take();
                Expr e = expr();
                expect(Tok::RParen, "to close parenthesized expression");
                return e;
            }
            default: syntax("expected an expression, found " + describe(t));
        }
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    int depth_ = 0;
    int next_site_ = 0;
    std::set<std::string> labels_;
    Diagnostics diags_;
};

}  // namespace

bool is_reserved_word(std::string_view word) {
    for (auto r : kReserved) {
        if (word == r) return true;
    }
    return false;
}

Outcome<Program> parse_program(std::string_view source) {
    auto lexed = detail::lex(source);
    if (!lexed.diagnostics.empty()) {
        Outcome<Program> out;
        out.diagnostics = std::move(lexed.diagnostics);
        return out;
    }
    return Parser(std::move(lexed.tokens)).run();
}

}  // namespace adsl::dsl
