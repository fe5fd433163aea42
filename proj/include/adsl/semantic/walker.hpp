#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "adsl/diagnostic.hpp"
#include "adsl/dsl/ast.hpp"
#include "adsl/dsl/expr.hpp"
#include "adsl/semantic/host_eval.hpp"

namespace adsl::semantic {

/// An evaluated slice operand `name[begin..end]`.
struct SliceValue {
    std::string name;
    bool global = false;
    int64_t begin = 0;
    int64_t end = 0;
    int64_t len() const { return end - begin; }
};

/// One dynamic execution of a primitive call.
struct PrimInstance {
    const dsl::PrimitiveCall* call = nullptr;
    const dsl::Stmt* stmt = nullptr;
    const dsl::StageBlock* stage = nullptr;  // enclosing stage block, if any
    std::vector<SliceValue> slices;          // per operand; empty name for scalars
    std::vector<dsl::Value> scalars;         // per operand; only meaningful for scalars
    bool two_d = false;
    int64_t rows = 1;
    int64_t stride = 0;  // global row stride in elements (2-D transfers)
};

class KernelVisitor {
  public:
    virtual ~KernelVisitor() = default;
    virtual void enter_stage(const dsl::StageBlock&, const dsl::Stmt&) {}
    virtual void exit_stage(const dsl::StageBlock&, const dsl::Stmt&) {}
    virtual void primitive(const PrimInstance&) {}
    virtual void let(const dsl::LetStmt&, const dsl::Stmt&, const dsl::Value&) {}
    /// A visitor may stop the walk early (for example after its first error).
    virtual bool halted() const { return false; }
};

struct BufferInfo {
    const dsl::BufferDecl* decl = nullptr;
    int64_t capacity = 0;    // elements
    int64_t alloc_elems = 0; // capacity rounded up to a 32-byte multiple
};

/// Everything about one kernel launch that does not depend on the block.
struct KernelContext {
    const dsl::Program* program = nullptr;
    const LaunchPlan* plan = nullptr;
    std::map<std::string, BufferInfo> buffers;
    std::map<std::string, std::string> tensor_of;  // kernel param -> host tensor
    std::map<std::string, dsl::Value> scalars;     // kernel scalar params
    std::vector<std::vector<const dsl::Stmt*>> segments;  // top-level statements split at sync_all

    const BufferInfo& buffer(const std::string& name) const;
    const std::string& tensor(const std::string& kernel_name) const;
    dsl::DType dtype_of(const SliceValue& s) const;
};

/// Evaluates buffer capacities (KRN-EVAL on faults, BUF-NONPOS when not
/// positive) and splits the body into barrier segments.
Outcome<KernelContext> make_context(const dsl::Program& p, const LaunchPlan& plan);

inline constexpr int64_t kDefaultStepBudget = 20'000'000;

/// Abstractly executes one barrier segment for one block, reporting every
/// stage entry/exit, primitive and let to `v`. Evaluation faults come back
/// as KRN-EVAL. `budget` counts executed statements across calls.
Diagnostics walk_segment(const KernelContext& ctx, int64_t block, std::size_t segment, KernelVisitor& v,
                         int64_t& budget);

/// Number of elements a transfer writes to local memory: the slice plus
/// zero pad lanes up to the next 32-byte boundary. For 2-D transfers the
/// region is rows * pitch.
int64_t local_write_extent(const PrimInstance& t, dsl::DType dtype);

/// Byte size and 32-byte alignment of a dtype-sized element count.
inline int64_t align32(int64_t bytes) { return (bytes + 31) / 32 * 32; }

/// Stream buffers that a stage block writes and reads (syntactically).
struct StageIo {
    std::set<std::string> writes;
    std::set<std::string> reads;
};
StageIo stage_io(const dsl::KernelFn& k, const dsl::StageBlock& b);

/// Operand indices a primitive reads from / writes to local memory.
bool operand_is_read(dsl::Op op, std::size_t index);
bool operand_is_write(dsl::Op op, std::size_t index);

/// Tracks the producer/consumer protocol of stream buffers and per-lane
/// validity within the current production. Shared by the static check and
/// the interpreter so both agree on what is legal.
class StreamTracker {
  public:
    explicit StreamTracker(const KernelContext& ctx);

    struct Violation {
        std::string_view rule;
        std::string message;
        Span span;
    };

    void enter_stage(const dsl::StageBlock& b, const dsl::Stmt& s);
    void exit_stage(const dsl::StageBlock& b);
    void primitive(const PrimInstance& inst);
    void end_segment(const Span& span);

    const std::vector<Violation>& violations() const { return violations_; }

  private:
    void read(const std::string& buf, int64_t begin, int64_t end, const Span& span);
    void write(const std::string& buf, int64_t begin, int64_t end);

    const KernelContext& ctx_;
    std::map<std::string, bool> pending_;
    std::map<std::string, std::vector<bool>> valid_;
    std::map<const dsl::StageBlock*, StageIo> io_;
    std::vector<Violation> violations_;
};

}  // namespace adsl::semantic
