#include <algorithm>

#include "adsl/dsl/primitives.hpp"
#include "adsl/lowering/passes.hpp"
#include "adsl/semantic/walker.hpp"

namespace adsl::lowering {

using dsl::Stmt;
using target::Instr;
using K = Instr::Kind;

namespace {

void collect_operand_idents(const dsl::Operand& o, std::vector<std::string>& out) {
    if (o.kind == dsl::Operand::Kind::Slice) {
        dsl::collect_idents(o.begin, out);
        dsl::collect_idents(o.end, out);
    } else {
        dsl::collect_idents(o.scalar, out);
    }
}

// Identifiers referenced by a stage body, in first-use order.
void collect_body_idents(const std::vector<Stmt>& body, std::vector<std::string>& out) {
    for (const auto& s : body) {
        if (auto* c = std::get_if<dsl::PrimitiveCall>(&s.node)) {
            for (const auto& o : c->args) collect_operand_idents(o, out);
        } else if (auto* l = std::get_if<dsl::LetStmt>(&s.node)) {
            dsl::collect_idents(l->value, out);
        } else if (auto* f = std::get_if<dsl::ForStmt>(&s.node)) {
            dsl::collect_idents(f->begin, out);
            dsl::collect_idents(f->end, out);
            collect_body_idents(f->body, out);
        }
    }
}

class Lowerer {
  public:
    Lowerer(const dsl::Program& p, target::TargetUnit& t) : p_(p), t_(t) {}

    void run() {
        scope_.clear();
        t_.process_body = process(p_.kernel.body);
    }

  private:
    std::vector<Instr> process(const std::vector<Stmt>& body) {
        std::vector<Instr> out;
        for (const auto& s : body) {
            if (auto* l = std::get_if<dsl::LetStmt>(&s.node)) {
                out.push_back(Instr::let(l->name, l->value));
                scope_.push_back(l->name);
            } else if (auto* f = std::get_if<dsl::ForStmt>(&s.node)) {
                const std::size_t mark = scope_.size();
                scope_.push_back(f->var);
                out.push_back(Instr::loop(f->var, f->begin, f->end, process(f->body)));
                scope_.resize(mark);
            } else if (auto* b = std::get_if<dsl::StageBlock>(&s.node)) {
                out.push_back(stage(*b));
            } else if (std::holds_alternative<dsl::SyncStmt>(s.node)) {
                out.push_back(Instr::sync_all());
                scope_.clear();
            } else {
                throw InternalError("pass_kernel_compute: primitive outside a stage block");
            }
        }
        return out;
    }

    Instr stage(const dsl::StageBlock& b) {
        target::StageFn fn;
        fn.kind = b.kind;
        fn.label = b.label;
        fn.name = target::stage_fn_name(b.kind, b.label);

        std::vector<std::string> used;
        collect_body_idents(b.body, used);
        for (const auto& n : used) {
            if (std::find(scope_.begin(), scope_.end(), n) != scope_.end() &&
                std::find(fn.params.begin(), fn.params.end(), n) == fn.params.end())
                fn.params.push_back(n);
        }

        const semantic::StageIo io = semantic::stage_io(p_.kernel, b);
        auto ops = [&](K k, const std::set<std::string>& names) {
            for (const auto& n : names) fn.body.push_back(Instr::queue_op(k, n));
        };
        switch (b.kind) {
            case dsl::StageKind::CopyIn: ops(K::AllocTensor, io.writes); break;
            case dsl::StageKind::Compute:
                ops(K::DeQue, io.reads);
                ops(K::AllocTensor, io.writes);
                break;
            case dsl::StageKind::CopyOut: ops(K::DeQue, io.reads); break;
        }
        for (auto& i : stage_body(b.body)) fn.body.push_back(std::move(i));
        switch (b.kind) {
            case dsl::StageKind::CopyIn: ops(K::EnQue, io.writes); break;
            case dsl::StageKind::Compute:
                ops(K::EnQue, io.writes);
                ops(K::FreeTensor, io.reads);
                break;
            case dsl::StageKind::CopyOut: ops(K::FreeTensor, io.reads); break;
        }

        std::vector<dsl::Expr> args;
        for (const auto& n : fn.params) args.push_back(dsl::Expr::ident(n));
        Instr call = Instr::call(fn.name, std::move(args));
        t_.stage_fns.push_back(std::move(fn));
        return call;
    }

    std::vector<Instr> stage_body(const std::vector<Stmt>& body) {
        std::vector<Instr> out;
        for (const auto& s : body) {
            if (auto* c = std::get_if<dsl::PrimitiveCall>(&s.node)) {
                Instr i;
                i.kind = dsl::is_transfer(c->op) ? K::DataCopy : K::Vector;
                i.op = c->op;
                i.operands = c->args;
                i.site = c->site.value;
                out.push_back(std::move(i));
            } else if (auto* l = std::get_if<dsl::LetStmt>(&s.node)) {
                out.push_back(Instr::let(l->name, l->value));
            } else if (auto* f = std::get_if<dsl::ForStmt>(&s.node)) {
                out.push_back(Instr::loop(f->var, f->begin, f->end, stage_body(f->body)));
            } else {
                throw InternalError("pass_kernel_compute: unexpected statement inside a stage block");
            }
        }
        return out;
    }

    const dsl::Program& p_;
    target::TargetUnit& t_;
    std::vector<std::string> scope_;  // process-level lets and loop variables in scope
};

}  // namespace

target::TargetUnit pass_kernel_compute(const dsl::Program& p, target::TargetUnit t) {
    t.stage_fns.clear();
    Lowerer(p, t).run();
    t.has_kernel = true;
    return t;
}

}  // namespace adsl::lowering
