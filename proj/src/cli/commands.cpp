#include "adsl/cli/commands.hpp"

#include <cstdio>
#include <iostream>
#include <sstream>

#include "adsl/dsl/parser.hpp"
#include "adsl/lowering/pipeline.hpp"
#include "adsl/semantic/checks.hpp"
#include "adsl/target/emit.hpp"
#include "adsl/vm/interpreter.hpp"
#include "adsl/vm/reference.hpp"
#include "adsl/vm/tensor_io.hpp"
#include "adsl/vm/timed.hpp"

namespace adsl::cli {

namespace fs = std::filesystem;

namespace {

void print_diags(const Diagnostics& d, std::ostream& out) {
    for (const auto& x : d) out << to_json_line(x) << '\n';
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::optional<dsl::Program> checked_program(const fs::path& path, const vm::NpuConfig& cfg, std::ostream& diag_out,
                                            std::ostream& err, int& code) {
    auto p = load_program(path, diag_out, err, code);
    if (!p) return std::nullopt;
    auto d = semantic::run_checks(*p, cfg);
    print_diags(d, diag_out);
    if (has_errors(d)) {
        err << path.string() << ": semantic checks failed\n";
        code = kExitFailed;
        return std::nullopt;
    }
    return p;
}

}  // namespace

std::optional<dsl::Program> load_program(const fs::path& path, std::ostream& diag_out, std::ostream& err, int& code) {
    std::string src;
    try {
        src = read_file(path);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        code = kExitIo;
        return std::nullopt;
    }
    auto parsed = dsl::parse_program(src);
    if (!parsed.ok()) {
        print_diags(parsed.diagnostics, diag_out);
        err << path.string() << ": parse failed\n";
        code = kExitParse;
        return std::nullopt;
    }
    code = kExitOk;
    return std::move(parsed.value);
}

int cmd_check(const fs::path& program, const vm::NpuConfig& cfg, std::ostream& out, std::ostream& err) {
    int code = kExitOk;
    checked_program(program, cfg, out, err, code);
    return code;
}

int cmd_sim(const SimOptions& o, const vm::NpuConfig& cfg, std::ostream& out, std::ostream& err) {
    int code = kExitOk;
    auto p = checked_program(o.program, cfg, err, err, code);
    if (!p) return code;
    vm::TensorMap inputs;
    for (const auto& t : p->host.params) {
        if (t.role != dsl::TensorRole::In) continue;
        const fs::path f = o.inputs_dir / (t.name + kTensorExt);
        if (!fs::exists(f)) {
            err << "missing input tensor '" << t.name << "' (expected " << f.string() << ")\n";
            return kExitFailed;
        }
        try {
            inputs[t.name] = vm::read_tensor_file(f.string());
        } catch (const std::exception& e) {
            err << e.what() << '\n';
            return kExitIo;
        }
    }
    vm::TensorMap outputs;
    std::optional<vm::CostReport> cost;
    Diagnostics diags;
    if (o.timed) {
        auto r = vm::run_timed(*p, inputs, cfg);
        diags = r.diagnostics;
        if (r.ok()) {
            outputs = r->outputs;
            cost = r->cost;
        }
    } else {
        auto r = vm::run_functional(*p, inputs, cfg);
        diags = r.diagnostics;
        if (r.ok()) outputs = *r;
    }
    print_diags(diags, err);
    if (has_errors(diags)) return kExitFailed;
    try {
        for (const auto& [name, t] : outputs) write_file(o.out_dir / (name + kTensorExt), vm::encode_tensor(t));
        if (cost) {
            const std::string j = dump(vm::to_json(*cost));
            write_file(o.out_dir / "cost.json", j);
            if (o.json) out << j;
        }
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kExitIo;
    }
    if (!o.json) {
        for (const auto& [name, t] : outputs) out << name << " " << vm::shape_string(t.shape) << '\n';
        if (cost) out << "makespan_cycles " << cost->makespan_cycles << '\n';
    }
    return kExitOk;
}

int cmd_compile(const CompileOptions& o, const vm::NpuConfig& cfg, std::ostream& out, std::ostream& err) {
    int code = kExitOk;
    auto p = load_program(o.program, err, err, code);
    if (!p) return code;
    if (o.stop_after < 1 || o.stop_after > 4) {
        err << "--stop-after-pass must be between 1 and 4\n";
        return kExitUsage;
    }
    lowering::PipelineOptions opts;
    opts.stop_after = o.stop_after;
    if (o.inject_fault == "drop-dequeue") {
        opts.passes[2] = lowering::pass_compute_dropping_dequeue();
    } else if (!o.inject_fault.empty()) {
        err << "unknown fault '" << o.inject_fault << "'\n";
        return kExitUsage;
    }
    auto res = lowering::run_pipeline(*p, cfg, opts);
    const std::string base = p->kernel.name;
    try {
        if (!res.trace.records.empty())
            write_file(o.out_dir / (base + "_trace.json"), dump(lowering::to_json(res.trace)));
        if (res.unit) {
            auto src = target::emit_text(*res.unit);
            write_file(o.out_dir / (base + "_host" + o.extension), src.host);
            if (res.unit->has_init) write_file(o.out_dir / (base + "_kernel" + o.extension), src.kernel);
            if (o.stop_after < 4)
                write_file(o.out_dir / (base + "_pass" + std::to_string(o.stop_after) + o.extension),
                           target::render_unit(*res.unit));
        }
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kExitIo;
    }
    print_diags(res.diagnostics, err);
    if (!res.unit) {
        if (res.failed_pass > 0)
            err << "pipeline stopped: pass " << res.failed_pass << " (" << lowering::pass_name(res.failed_pass)
                << ") rejected\n";
        else
            err << o.program.string() << ": semantic checks failed\n";
        return kExitFailed;
    }
    for (const auto& r : res.trace.records)
        out << "pass " << r.pass_id << " " << lowering::pass_name(r.pass_id) << " accepted\n";
    return kExitOk;
}

vm::NpuConfig naive_config(const vm::NpuConfig& cfg) {
    vm::NpuConfig n = cfg;
    n.num_cores = 1;
    n.queue_depth_in = 1;
    n.queue_depth_out = 1;
    return n;
}

namespace {

// Empty when every output of `got` matches the oracle within tolerance.
std::string oracle_mismatch(const FixtureManifest& m, const vm::TensorMap& inputs, const vm::TensorMap& got) {
    const vm::TensorMap want = vm::reference_eval(m.oracle, inputs);
    for (const auto& [name, ref] : want) {
        auto it = got.find(name);
        if (it == got.end()) return "no output '" + name + "'";
        const vm::Tolerance tol = m.tolerance(ref.dtype);
        auto rep = vm::compare_tensors(it->second, ref, tol.rel, tol.abs);
        if (!rep.pass) return name + ": " + rep.summary();
    }
    return "";
}

}  // namespace

std::vector<BenchRow> bench_rows(const std::vector<FixtureManifest>& corpus, const vm::NpuConfig& cfg) {
    std::vector<BenchRow> rows;
    const vm::NpuConfig naive = naive_config(cfg);
    for (const auto& m : corpus) {
        std::optional<dsl::Program> p;
        std::string load_error;
        try {
            auto parsed = dsl::parse_program(read_file(m.program_path()));
            if (parsed.ok() && !has_errors(semantic::run_checks(*parsed, cfg)) &&
                !has_errors(semantic::run_checks(*parsed, naive)))
                p = std::move(parsed.value);
            else
                load_error = "program does not pass checks";
        } catch (const std::exception& e) {
            load_error = e.what();
        }
        const vm::OperatorSpec* spec = vm::find_operator(m.oracle);
        for (std::size_t i = 0; i < m.shapes.size(); ++i) {
            BenchRow row;
            row.fixture = m.name;
            row.shape = semantic::shape_to_string(m.shapes[i]);
            if (!p) {
                row.failed = true;
                row.note = load_error;
                rows.push_back(row);
                continue;
            }
            try {
                auto inputs = vm::random_inputs(*p, *spec, m.shapes[i], 1000 + i);
                auto fast = vm::run_timed(*p, inputs, cfg);
                auto slow = vm::run_timed(*p, inputs, naive);
                if (!fast.ok() || !slow.ok()) {
                    row.failed = true;
                    row.note = "simulation failed";
                } else {
                    row.makespan_cycles = fast->cost.makespan_cycles;
                    row.naive_makespan_cycles = slow->cost.makespan_cycles;
                    row.speedup = row.makespan_cycles > 0 ? static_cast<double>(row.naive_makespan_cycles) /
                                                                static_cast<double>(row.makespan_cycles)
                                                          : 0.0;
                    row.note = oracle_mismatch(m, inputs, fast->outputs);
                    if (row.note.empty()) row.note = oracle_mismatch(m, inputs, slow->outputs);
                    row.failed = !row.note.empty();
                }
            } catch (const std::exception& e) {
                row.failed = true;
                row.note = e.what();
            }
            rows.push_back(row);
        }
    }
    return rows;
}

nlohmann::json to_json(const BenchRow& r) {
    return {{"fixture", r.fixture},
            {"shape", r.shape},
            {"makespan_cycles", r.makespan_cycles},
            {"naive_makespan_cycles", r.naive_makespan_cycles},
            {"speedup", r.speedup},
            {"status", r.failed ? "FAILED" : "ok"},
            {"note", r.note}};
}

int cmd_bench(const fs::path& target, const vm::NpuConfig& cfg, bool json, std::ostream& out, std::ostream& err) {
    std::vector<FixtureManifest> corpus;
    try {
        if (fs::is_directory(target) && fs::exists(target / "manifest.json"))
            corpus.push_back(load_manifest(target / "manifest.json"));
        else if (fs::is_directory(target)) corpus = load_corpus(target);
        else corpus.push_back(load_manifest(target));
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kExitIo;
    }
    const auto rows = bench_rows(corpus, cfg);
    bool failed = false;
    for (const auto& r : rows) failed |= r.failed;
    if (json) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& r : rows) j.push_back(to_json(r));
        out << dump(j);
    } else {
        char line[256];
        std::snprintf(line, sizeof line, "%-22s %-24s %10s %10s %8s\n", "fixture", "shape", "cycles", "naive",
                      "speedup");
        out << line;
        for (const auto& r : rows) {
            if (r.failed) {
                std::snprintf(line, sizeof line, "%-22s %-24s FAILED  ", r.fixture.c_str(), r.shape.c_str());
                out << line << r.note << '\n';
                continue;
            }
            std::snprintf(line, sizeof line, "%-22s %-24s %10lld %10lld %8.3f\n", r.fixture.c_str(), r.shape.c_str(),
                          static_cast<long long>(r.makespan_cycles), static_cast<long long>(r.naive_makespan_cycles),
                          r.speedup);
            out << line;
        }
    }
    return failed ? kExitFailed : kExitOk;
}

GoldenSet golden_outputs(const FixtureManifest& m, const vm::NpuConfig& cfg) {
    auto parsed = dsl::parse_program(read_file(m.program_path()));
    if (!parsed.ok()) throw std::runtime_error(m.name + ": parse failed");
    auto res = lowering::run_pipeline(*parsed, cfg);
    if (!res.unit) throw std::runtime_error(m.name + ": pipeline failed");
    auto src = target::emit_text(*res.unit);
    return GoldenSet{src.host, src.kernel, dump(lowering::to_json(res.trace))};
}

namespace {

// 1-based line of the first difference, 0 when equal.
std::size_t first_diff_line(const std::string& a, const std::string& b) {
    if (a == b) return 0;
    std::size_t line = 1;
    for (std::size_t i = 0; i < a.size() && i < b.size() && a[i] == b[i]; ++i)
        if (a[i] == '\n') ++line;
    return line;
}

}  // namespace

int cmd_goldens(const fs::path& fixtures_dir, const vm::NpuConfig& cfg, bool update, std::ostream& out,
                std::ostream& err) {
    std::vector<FixtureManifest> corpus;
    try {
        corpus = load_corpus(fixtures_dir);
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kExitIo;
    }
    int failures = 0;
    for (const auto& m : corpus) {
        GoldenSet g;
        try {
            g = golden_outputs(m, cfg);
        } catch (const std::exception& e) {
            out << "FAIL " << m.name << ": " << e.what() << '\n';
            ++failures;
            continue;
        }
        const std::pair<const char*, const std::string*> files[] = {
            {"expected_host", &g.host}, {"expected_kernel", &g.kernel}, {"expected_trace.json", &g.trace}};
        std::vector<std::string> diffs;
        for (const auto& [file, text] : files) {
            const fs::path path = m.dir / file;
            try {
                if (update) {
                    write_file(path, *text);
                    continue;
                }
                if (!fs::exists(path)) {
                    diffs.push_back(std::string(file) + " (missing)");
                    continue;
                }
                if (auto line = first_diff_line(read_file(path), *text))
                    diffs.push_back(std::string(file) + " (line " + std::to_string(line) + ")");
            } catch (const std::exception& e) {
                err << e.what() << '\n';
                return kExitIo;
            }
        }
        if (update) {
            out << "updated " << m.name << '\n';
        } else if (diffs.empty()) {
            out << "pass " << m.name << '\n';
        } else {
            ++failures;
            out << "FAIL " << m.name << ":";
            for (const auto& d : diffs) out << ' ' << d;
            out << '\n';
        }
    }
    return failures ? kExitFailed : kExitOk;
}

}  // namespace adsl::cli
