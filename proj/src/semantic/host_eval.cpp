#include "adsl/semantic/host_eval.hpp"

#include <algorithm>

#include "adsl/rules.hpp"
#include "adsl/semantic/symbols.hpp"

namespace adsl::semantic {

using namespace adsl::dsl;

std::vector<BlockRange> partition(int64_t domain, int64_t blocks) {
    std::vector<BlockRange> out;
    if (blocks <= 0 || domain < 0) return out;
    out.reserve(static_cast<std::size_t>(blocks));
    const int64_t base = domain / blocks;
    const int64_t extra = domain % blocks;
    for (int64_t b = 0; b < blocks; ++b) {
        out.push_back(BlockRange{b * base + std::min(b, extra), base + (b < extra ? 1 : 0)});
    }
    return out;
}

int64_t LaunchPlan::tiling(const std::string& name) const {
    for (const auto& [n, v] : tiling_values) {
        if (n == name) return v;
    }
    throw InternalError("unknown tiling parameter " + name);
}

int64_t LaunchPlan::numel(const std::string& tensor) const {
    auto it = tensor_dims.find(tensor);
    if (it == tensor_dims.end()) throw InternalError("unknown tensor " + tensor);
    int64_t n = 1;
    for (auto d : it->second) n *= d;
    return n;
}

Outcome<std::vector<std::size_t>> tiling_order(const HostFn& h) {
    const std::size_t n = h.tiling.size();
    std::vector<std::vector<std::size_t>> deps(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> ids;
        collect_idents(h.tiling[i].expr, ids);
        for (const auto& id : ids) {
            for (std::size_t j = 0; j < n; ++j) {
                if (h.tiling[j].name == id) deps[i].push_back(j);
            }
        }
    }
    Outcome<std::vector<std::size_t>> out;
    std::vector<std::size_t> order;
    std::vector<bool> done(n, false);
    while (order.size() < n) {
        bool progressed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (done[i]) continue;
            bool ready = std::all_of(deps[i].begin(), deps[i].end(), [&](std::size_t j) { return done[j]; });
            if (ready) {
                done[i] = true;
                order.push_back(i);
                progressed = true;
                break;
            }
        }
        if (!progressed) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!done[i]) {
                    out.diagnostics.push_back(make_error(std::string(rules::kTilCycle), h.tiling[i].span,
                                                         "tiling parameter '" + h.tiling[i].name +
                                                             "' depends on itself through a cycle"));
                    return out;
                }
            }
        }
    }
    out.value = std::move(order);
    return out;
}

std::vector<ShapeMap> declared_shapes(const Program& p) {
    std::vector<ShapeMap> out;
    for (const auto& s : p.host.shapes) {
        ShapeMap m;
        for (const auto& [k, v] : s.bindings) m[k] = v;
        out.push_back(std::move(m));
    }
    if (out.empty()) out.emplace_back();
    return out;
}

std::string shape_to_string(const ShapeMap& s) {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : s) {
        if (!first) out += ", ";
        first = false;
        out += k + "=" + std::to_string(v);
    }
    return out + "}";
}

Outcome<LaunchPlan> eval_host(const Program& p, const ShapeMap& shape, const vm::NpuConfig& cfg) {
    Outcome<LaunchPlan> out;
    auto fail = [&](std::string_view rule, const Span& span, std::string msg) {
        out.diagnostics.push_back(make_error(std::string(rule), span, std::move(msg) + " for shape " + shape_to_string(shape)));
        out.value.reset();
        return out;
    };
    const HostFn& h = p.host;
    LaunchPlan plan;

    // Dimension names come from input tensors.
    for (const auto& t : h.params) {
        if (t.role != TensorRole::In) continue;
        for (const auto& d : t.dims) {
            if (d.kind != Expr::Kind::Ident) continue;
            auto it = shape.find(d.name);
            if (it == shape.end()) return fail(rules::kSemShape, d.span, "no value for dimension '" + d.name + "'");
            if (it->second <= 0)
                return fail(rules::kTilNonPos, d.span, "dimension '" + d.name + "' is " + std::to_string(it->second));
            plan.shape[d.name] = it->second;
        }
    }

    auto lookup = [&](std::string_view n) -> std::optional<Value> {
        if (n == kHostCores) return Value::of_int(cfg.num_cores);
        auto it = plan.shape.find(std::string(n));
        if (it != plan.shape.end()) return Value::of_int(it->second);
        for (const auto& [name, v] : plan.tiling_values) {
            if (name == n) return Value::of_int(v);
        }
        return std::nullopt;
    };
    auto positive = [&](const Expr& e, const std::string& what, int64_t& result) -> bool {
        auto r = evaluate(e, lookup);
        if (auto* er = std::get_if<EvalError>(&r)) {
            fail(rules::kTilNonPos, er->span, what + ": " + er->message);
            return false;
        }
        Value v = std::get<Value>(r);
        if (v.is_float) {
            fail(rules::kTilNonPos, e.span, what + " is not an integer");
            return false;
        }
        if (v.i <= 0) {
            fail(rules::kTilNonPos, e.span, what + " evaluates to " + std::to_string(v.i));
            return false;
        }
        result = v.i;
        return true;
    };

    auto order = tiling_order(h);
    if (!order.ok()) {
        out.diagnostics = order.diagnostics;
        return out;
    }
    for (std::size_t i : *order) {
        const TilingDecl& t = h.tiling[i];
        int64_t v = 0;
        if (!positive(t.expr, "tiling parameter '" + t.name + "'", v)) return out;
        plan.tiling_values.emplace_back(t.name, v);
    }

    for (const auto& t : h.params) {
        std::vector<int64_t> dims;
        for (const auto& d : t.dims) {
            int64_t v = 0;
            if (!positive(d, "dimension of tensor '" + t.name + "'", v)) return out;
            dims.push_back(v);
        }
        int64_t n = 1;
        for (auto d : dims) {
            if (__builtin_mul_overflow(n, d, &n)) return fail(rules::kTilNonPos, t.span, "tensor '" + t.name + "' is too large");
        }
        plan.tensor_dims[t.name] = std::move(dims);
    }

    if (!positive(h.launch.num_blocks, "block count", plan.num_blocks)) return out;
    if (h.launch.domain) {
        if (!positive(*h.launch.domain, "launch domain", plan.domain)) return out;
    } else {
        plan.domain = plan.num_blocks;
    }
    if (plan.num_blocks > 1000000) return fail(rules::kTilNonPos, h.launch.num_blocks.span, "block count is unreasonably large");
    plan.per_block_ranges = partition(plan.domain, plan.num_blocks);

    for (const auto& a : h.launch.args) {
        KernelArg k;
        if (a.kind == Expr::Kind::Ident && p.find_tensor(a.name)) {
            k.is_tensor = true;
            k.tensor = a.name;
        } else {
            auto r = evaluate(a, lookup);
            if (auto* er = std::get_if<EvalError>(&r)) return fail(rules::kTilNonPos, er->span, "launch argument: " + er->message);
            k.scalar = std::get<Value>(r);
        }
        plan.args.push_back(std::move(k));
    }

    if (plan.num_blocks > cfg.num_cores) {
        out.diagnostics.push_back(make_warning(std::string(rules::kSemBlocksExceedCores), h.launch.num_blocks.span,
                                               std::to_string(plan.num_blocks) + " blocks on " +
                                                   std::to_string(cfg.num_cores) + " cores; extra blocks serialize"));
    }
    out.value = std::move(plan);
    return out;
}

Outcome<ShapeMap> shape_from_inputs(const Program& p, const std::map<std::string, std::vector<int64_t>>& input_dims) {
    Outcome<ShapeMap> out;
    ShapeMap shape;
    for (const auto& t : p.host.params) {
        if (t.role != TensorRole::In) continue;
        auto it = input_dims.find(t.name);
        if (it == input_dims.end()) {
            out.diagnostics.push_back(make_error(std::string(rules::kSemShape), t.span, "missing input tensor '" + t.name + "'"));
            return out;
        }
        if (it->second.size() != t.dims.size()) {
            out.diagnostics.push_back(make_error(std::string(rules::kSemShape), t.span,
                                                 "input '" + t.name + "' has rank " + std::to_string(it->second.size()) +
                                                     ", expected " + std::to_string(t.dims.size())));
            return out;
        }
        for (std::size_t i = 0; i < t.dims.size(); ++i) {
            const Expr& d = t.dims[i];
            int64_t actual = it->second[i];
            if (d.kind == Expr::Kind::Int) {
                if (d.int_value != actual) {
                    out.diagnostics.push_back(make_error(std::string(rules::kSemShape), d.span,
                                                         "input '" + t.name + "' dim " + std::to_string(i) + " is " +
                                                             std::to_string(actual) + ", expected " +
                                                             std::to_string(d.int_value)));
                    return out;
                }
            } else if (d.kind == Expr::Kind::Ident) {
                auto [pos, inserted] = shape.emplace(d.name, actual);
                if (!inserted && pos->second != actual) {
                    out.diagnostics.push_back(make_error(std::string(rules::kSemShape), d.span,
                                                         "dimension '" + d.name + "' bound to both " +
                                                             std::to_string(pos->second) + " and " + std::to_string(actual)));
                    return out;
                }
            }
        }
    }
    out.value = std::move(shape);
    return out;
}

}  // namespace adsl::semantic
