#include <CLI11.hpp>

#include "adsl/cli/commands.hpp"

namespace adsl::cli {

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"adslc: check, simulate, compile and benchmark adsl kernels"};
    app.require_subcommand(1);
    std::string config_path;
    bool json = false;
    app.add_option("--config", config_path, "key = value machine config file");
    app.add_flag("--json", json, "machine-readable output where supported");

    std::string program, inputs_dir, out_dir = ".", fault, ext = ".txt", fixtures = "fixtures", target;
    bool timed = false, update = false;
    int stop_after = 4;

    auto* check = app.add_subcommand("check", "parse and run the semantic checks");
    check->add_option("program", program, "path to a .adsl file")->required();

    auto* sim = app.add_subcommand("sim", "run the functional (or timed) interpreter");
    sim->add_option("program", program)->required();
    sim->add_option("--inputs", inputs_dir, "directory with one <tensor>.adslt per input")->required();
    sim->add_option("--out", out_dir, "directory for output tensors and cost.json");
    sim->add_flag("--timed", timed, "also run the cost model and write cost.json");

    auto* compile = app.add_subcommand("compile", "lower to the target IR and emit sources");
    compile->add_option("program", program)->required();
    compile->add_option("--out", out_dir, "output directory");
    compile->add_option("--stop-after-pass", stop_after, "stop after pass N (1..4)");
    compile->add_option("--inject-fault", fault, "test double for pass 3: drop-dequeue");
    compile->add_option("--ext", ext, "extension of emitted sources");

    auto* bench = app.add_subcommand("bench", "cycle counts against the single-core depth-1 baseline");
    bench->add_option("target", target, "fixtures directory, one fixture directory or a manifest.json")->required();

    auto* goldens = app.add_subcommand("goldens", "compare emitted sources and traces with the fixture goldens");
    goldens->add_option("--fixtures", fixtures, "fixtures directory");
    goldens->add_flag("--update", update, "rewrite the goldens");

    for (auto* sub : {check, sim, compile, bench, goldens}) {
        sub->add_option("--config", config_path, "key = value machine config file");
        sub->add_flag("--json", json, "machine-readable output where supported");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, r;
        const int rc = app.exit(e, o, r);
        out << o.str();
        err << r.str();
        return rc == 0 ? kExitOk : kExitUsage;
    }

    vm::NpuConfig cfg;
    if (!config_path.empty()) {
        try {
            cfg = vm::load_config(config_path);
        } catch (const std::invalid_argument& e) {
            err << config_path << ": " << e.what() << '\n';
            return kExitUsage;
        } catch (const std::exception& e) {
            err << e.what() << '\n';
            return kExitIo;
        }
    }

    if (check->parsed()) return cmd_check(program, cfg, out, err);
    if (sim->parsed()) return cmd_sim(SimOptions{program, inputs_dir, out_dir, timed, json}, cfg, out, err);
    if (compile->parsed()) return cmd_compile(CompileOptions{program, out_dir, stop_after, fault, ext}, cfg, out, err);
    if (bench->parsed()) return cmd_bench(target, cfg, json, out, err);
    return cmd_goldens(fixtures, cfg, update, out, err);
}

}  // namespace adsl::cli
