#include <set>

#include "adsl/dsl/primitives.hpp"
#include "adsl/rules.hpp"
#include "adsl/semantic/checks.hpp"
#include "adsl/semantic/symbols.hpp"
#include "adsl/semantic/walker.hpp"

namespace adsl::semantic {

using namespace adsl::dsl;

namespace {

class StagingChecker {
  public:
    explicit StagingChecker(const Program& p) : p_(p) {
        for (std::size_t i = 0; i < p.kernel.params.size(); ++i) {
            if (kernel_param_is_tensor(p, i)) tensors_.insert(p.kernel.params[i].name);
        }
    }

    Diagnostics run() {
        body(p_.kernel.body, nullptr, false);
        return std::move(diags_);
    }

  private:
    void error(std::string_view rule, const Span& span, std::string msg) {
        diags_.push_back(make_error(std::string(rule), span, std::move(msg)));
    }

    static std::string where(const StageBlock* stage) {
        if (!stage) return "outside any stage block";
        return "in " + std::string(stage_keyword(stage->kind)) + " block '" + stage->label + "'";
    }

    void body(const std::vector<Stmt>& stmts, const StageBlock* stage, bool in_loop) {
        for (const auto& s : stmts) {
            if (auto* c = std::get_if<PrimitiveCall>(&s.node)) {
                primitive(*c, s.span, stage);
            } else if (auto* f = std::get_if<ForStmt>(&s.node)) {
                body(f->body, stage, true);
            } else if (auto* b = std::get_if<StageBlock>(&s.node)) {
                if (stage) {
                    error(rules::kStgNested, s.span,
                          "stage block '" + b->label + "' is nested inside stage block '" + stage->label + "'");
                    continue;
                }
                dataflow(*b, s.span);
                body(b->body, b, in_loop);
            } else if (std::holds_alternative<SyncStmt>(s.node)) {
                if (stage || in_loop)
                    error(rules::kStgSyncPlace, s.span, "sync_all must appear at the top level of the kernel body");
            }
        }
    }

    void primitive(const PrimitiveCall& c, const Span& span, const StageBlock* stage) {
        const std::string name(primitive_info(c.op).name);
        StageKind kind = stage ? stage->kind : StageKind::Compute;
        if (c.op == Op::CopyG2L) {
            if (!stage || kind != StageKind::CopyIn)
                error(rules::kStgG2lPlace, span, "copy_g2l " + where(stage) + "; global loads belong in copyin blocks",
                      "move the transfer into a copyin block");
            return;
        }
        if (c.op == Op::CopyL2G) {
            if (!stage || kind != StageKind::CopyOut)
                error(rules::kStgL2gPlace, span, "copy_l2g " + where(stage) + "; global stores belong in copyout blocks",
                      "move the transfer into a copyout block");
            return;
        }
        if (!stage || kind != StageKind::Compute) {
            error(rules::kStgComputePlace, span, name + " " + where(stage) + "; compute primitives belong in compute blocks");
            return;
        }
        for (const auto& o : c.args) {
            if (o.kind == Operand::Kind::Slice && tensors_.count(o.name)) {
                error(rules::kStgGmInCompute, o.span,
                      name + " reads or writes global tensor '" + o.name + "' inside a compute block");
                return;
            }
        }
    }

    void error(std::string_view rule, const Span& span, std::string msg, std::string hint) {
        diags_.push_back(make_error(std::string(rule), span, std::move(msg), std::move(hint)));
    }

    void dataflow(const StageBlock& b, const Span& span) {
        StageIo io = stage_io(p_.kernel, b);
        for (const auto& name : io.reads) {
            const BufferDecl* d = p_.kernel.find_buffer(name);
            bool ok = true;
            if (b.kind == StageKind::Compute && d->role == BufferRole::StreamIn) ok = produced_in_.count(name) > 0;
            if (b.kind == StageKind::CopyOut && d->role == BufferRole::StreamOut) ok = produced_out_.count(name) > 0;
            if (!ok)
                error(rules::kStgUseBeforeDef, span,
                      std::string(stage_keyword(b.kind)) + " block '" + b.label + "' reads '" + name +
                          "' but no earlier stage block produces it");
        }
        for (const auto& name : io.writes) {
            const BufferDecl* d = p_.kernel.find_buffer(name);
            if (b.kind == StageKind::CopyIn && d->role == BufferRole::StreamIn) produced_in_.insert(name);
            if (b.kind == StageKind::Compute && d->role == BufferRole::StreamOut) produced_out_.insert(name);
        }
    }

    const Program& p_;
    std::set<std::string> tensors_;
    std::set<std::string> produced_in_;
    std::set<std::string> produced_out_;
    Diagnostics diags_;
};

}  // namespace

Diagnostics check_staging(const Program& p) { return StagingChecker(p).run(); }

}  // namespace adsl::semantic
