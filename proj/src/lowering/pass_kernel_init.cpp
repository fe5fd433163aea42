#include "adsl/lowering/passes.hpp"
#include "adsl/semantic/symbols.hpp"

namespace adsl::lowering {

using target::FieldKind;
using target::InitStmt;

target::TargetUnit pass_kernel_init(const dsl::Program& p, target::TargetUnit t, const vm::NpuConfig& cfg) {
    const dsl::KernelFn& k = p.kernel;
    for (std::size_t i = 0; i < k.params.size(); ++i) {
        InitStmt s;
        s.name = k.params[i].name;
        s.arg_index = static_cast<int>(i);
        if (semantic::kernel_param_is_tensor(p, i)) {
            const dsl::TensorParam* tp = p.find_tensor(p.host.launch.args[i].name);
            s.kind = InitStmt::Kind::SetGlobalBuffer;
            s.dtype = tp->dtype;
            t.kernel_state.push_back(target::KernelField{s.name, FieldKind::Global, tp->dtype});
        } else {
            s.kind = InitStmt::Kind::CopyTiling;
            t.kernel_state.push_back(target::KernelField{s.name, FieldKind::Scalar, dsl::DType::I32});
        }
        t.init_stmts.push_back(std::move(s));
    }
    for (const char* b : {"block_idx", "num_blocks", "block_start", "block_len"})
        t.kernel_state.push_back(target::KernelField{b, FieldKind::Builtin, dsl::DType::I32});
    InitStmt idx;
    idx.kind = InitStmt::Kind::GetBlockIdx;
    t.init_stmts.push_back(idx);
    InitStmt range;
    range.kind = InitStmt::Kind::BlockRange;
    t.init_stmts.push_back(range);

    for (const auto& b : k.buffers) {
        InitStmt s;
        s.name = b.name;
        s.dtype = b.dtype;
        s.capacity = b.capacity;
        s.space = b.space;
        switch (b.role) {
            case dsl::BufferRole::StreamIn:
                s.kind = InitStmt::Kind::InitQueue;
                s.pos = target::QueuePos::VecIn;
                s.depth = cfg.queue_depth_in;
                break;
            case dsl::BufferRole::StreamOut:
                s.kind = InitStmt::Kind::InitQueue;
                s.pos = target::QueuePos::VecOut;
                s.depth = cfg.queue_depth_out;
                break;
            case dsl::BufferRole::Temp: s.kind = InitStmt::Kind::InitBuf; break;
        }
        t.init_stmts.push_back(std::move(s));
    }
    t.has_init = true;
    return t;
}

}  // namespace adsl::lowering
