#include "adsl/dsl/render.hpp"

#include <charconv>
#include <cmath>

#include "adsl/dsl/primitives.hpp"

namespace adsl::dsl {

namespace {

int precedence(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Binary: return (e.op == '+' || e.op == '-') ? 1 : 2;
        case Expr::Kind::Neg: return 3;
        default: return 4;
    }
}

void expr_to(const Expr& e, std::string& out);

void child_to(const Expr& c, int min_prec, std::string& out) {
    if (precedence(c) < min_prec) {
        out += '(';
        expr_to(c, out);
        out += ')';
    } else {
        expr_to(c, out);
    }
}

void expr_to(const Expr& e, std::string& out) {
    switch (e.kind) {
        case Expr::Kind::Int:
            if (e.int_value < 0) {
                out += '(' + std::to_string(e.int_value) + ')';
            } else {
                out += std::to_string(e.int_value);
            }
            break;
        case Expr::Kind::Float:
            if (std::signbit(e.float_value)) {
                out += '(' + render_float(e.float_value) + ')';
            } else {
                out += render_float(e.float_value);
            }
            break;
        case Expr::Kind::Ident: out += e.name; break;
        case Expr::Kind::Neg:
            out += '-';
            child_to(e.args[0], 4, out);
            break;
        case Expr::Kind::Binary: {
            int p = precedence(e);
            child_to(e.args[0], p, out);
            out += ' ';
            out += e.op;
            out += ' ';
            child_to(e.args[1], p + 1, out);
            break;
        }
        case Expr::Kind::Call:
            out += e.name;
            out += '(';
            for (std::size_t k = 0; k < e.args.size(); ++k) {
                if (k) out += ", ";
                expr_to(e.args[k], out);
            }
            out += ')';
            break;
    }
}

void indent(std::string& out, int level) { out.append(static_cast<std::size_t>(level) * 4, ' '); }

std::string role_prefix(TensorRole r) {
    switch (r) {
        case TensorRole::Out: return "out ";
        case TensorRole::Work: return "work ";
        default: return "";
    }
}

void operand_to(const Operand& o, std::string& out) {
    if (o.kind == Operand::Kind::Slice) {
        out += o.name + "[" + render_expr(o.begin) + ".." + render_expr(o.end) + "]";
    } else {
        out += render_expr(o.scalar);
    }
}

void stmts_to(const std::vector<Stmt>& body, int level, std::string& out);

void stmt_to(const Stmt& s, int level, std::string& out) {
    indent(out, level);
    if (auto* c = std::get_if<PrimitiveCall>(&s.node)) {
        out += primitive_info(c->op).name;
        out += '(';
        for (std::size_t k = 0; k < c->args.size(); ++k) {
            if (k) out += ", ";
            operand_to(c->args[k], out);
        }
        out += ");\n";
    } else if (auto* l = std::get_if<LetStmt>(&s.node)) {
        out += "let " + l->name + " = " + render_expr(l->value) + ";\n";
    } else if (auto* f = std::get_if<ForStmt>(&s.node)) {
        out += "for " + f->var + " in " + render_expr(f->begin) + ".." + render_expr(f->end) + " {\n";
        stmts_to(f->body, level + 1, out);
        indent(out, level);
        out += "}\n";
    } else if (auto* b = std::get_if<StageBlock>(&s.node)) {
        out += std::string(stage_keyword(b->kind)) + " " + b->label + " {\n";
        stmts_to(b->body, level + 1, out);
        indent(out, level);
        out += "}\n";
    } else {
        out += "sync_all;\n";
    }
}

void stmts_to(const std::vector<Stmt>& body, int level, std::string& out) {
    for (const auto& s : body) stmt_to(s, level, out);
}

}  // namespace

std::string render_float(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

std::string quote_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\\\"";
        else if (c == '\\') out += "\\\\";
        else if (c == '\n') out += "\\n";
        else out += c;
    }
    out += '"';
    return out;
}

std::string render_expr(const Expr& e) {
    std::string out;
    expr_to(e, out);
    return out;
}

std::string render_program(const Program& p) {
    std::string out;
    const HostFn& h = p.host;
    out += "host " + h.name + "(";
    for (std::size_t k = 0; k < h.params.size(); ++k) {
        const auto& t = h.params[k];
        if (k) out += ", ";
        out += role_prefix(t.role) + t.name + ": [";
        for (std::size_t d = 0; d < t.dims.size(); ++d) {
            if (d) out += ", ";
            out += render_expr(t.dims[d]);
        }
        out += "] " + std::string(dtype_name(t.dtype));
    }
    out += ") {\n";
    for (const auto& s : h.shapes) {
        indent(out, 1);
        out += "shape ";
        for (std::size_t k = 0; k < s.bindings.size(); ++k) {
            if (k) out += ", ";
            out += s.bindings[k].first + " = " + std::to_string(s.bindings[k].second);
        }
        out += ";\n";
    }
    for (const auto& t : h.tiling) {
        indent(out, 1);
        out += "tiling " + t.name + " = " + render_expr(t.expr) + " @ " + quote_string(t.rationale) + ";\n";
    }
    indent(out, 1);
    out += "launch " + h.launch.kernel + "<" + render_expr(h.launch.num_blocks) + ">(";
    for (std::size_t k = 0; k < h.launch.args.size(); ++k) {
        if (k) out += ", ";
        out += render_expr(h.launch.args[k]);
    }
    out += ")";
    if (h.launch.domain) out += " over " + render_expr(*h.launch.domain);
    out += ";\n}\n\n";

    const KernelFn& k = p.kernel;
    out += "kernel " + k.name + "(";
    for (std::size_t i = 0; i < k.params.size(); ++i) {
        if (i) out += ", ";
        out += k.params[i].name;
    }
    out += ") {\n";
    for (const auto& b : k.buffers) {
        indent(out, 1);
        out += std::string(mem_space_keyword(b.space)) + " " + b.name + ": " + std::string(dtype_name(b.dtype)) + "[" +
               render_expr(b.capacity) + "] " + std::string(buffer_role_name(b.role)) + ";\n";
    }
    stmts_to(k.body, 1, out);
    out += "}\n";
    return out;
}

}  // namespace adsl::dsl
