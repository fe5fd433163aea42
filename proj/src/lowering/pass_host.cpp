#include "adsl/lowering/passes.hpp"
#include "adsl/semantic/host_eval.hpp"

namespace adsl::lowering {

target::TargetUnit pass_host(const dsl::Program& p) {
    target::TargetUnit t;
    t.kernel_name = p.kernel.name;
    const dsl::HostFn& h = p.host;
    auto order = semantic::tiling_order(h);
    if (!order.ok()) throw InternalError("pass_host: tiling declarations are cyclic");
    for (std::size_t i : *order) {
        t.tiling_record.push_back(h.tiling[i].name);
        t.host_stmts.push_back(target::HostStmt{h.tiling[i].name, h.tiling[i].expr});
    }
    t.launch.kernel = h.launch.kernel;
    t.launch.num_blocks = h.launch.num_blocks;
    t.launch.domain = h.launch.domain;
    t.launch.args = h.launch.args;
    for (const auto& tp : h.params) t.launch.tensors.push_back(target::TensorDecl{tp.name, tp.role, tp.dims, tp.dtype});
    for (const auto& s : h.shapes) t.launch.shapes.emplace_back(s.bindings.begin(), s.bindings.end());
    t.has_host = true;
    return t;
}

}  // namespace adsl::lowering
