// sttsim command line front end: single runs, sweeps, trace synthesis.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "sttsim/config.hpp"
#include "sttsim/harness.hpp"
#include "sttsim/trace.hpp"
#include "sttsim/types.hpp"

namespace {

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sttsim::ConfigError("cannot open output file: " + path);
    out << text;
}

int do_run(const std::string& config_path, const std::string& trace_path,
           const std::string& out_path, const std::string& format) {
    sttsim::RunConfig cfg = sttsim::load_config(config_path, true);
    if (!trace_path.empty()) cfg.trace.file = trace_path;
    const sttsim::SimReport report = sttsim::run_simulation(cfg);
    write_text(out_path, format == "csv" ? sttsim::report_to_csv_text(report)
                                         : sttsim::report_to_json_text(report));
    return 0;
}

int do_sweep(const std::string& config_path, const std::string& axis,
             const std::string& out_dir) {
    const sttsim::RunConfig cfg = sttsim::load_config(config_path, true);
    const sttsim::SweepResult sweep = sttsim::run_sweep(cfg, axis);
    if (out_dir.empty()) {
        std::cout << sttsim::sweep_to_csv_text(sweep);
        return 0;
    }
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    for (const auto& row : sweep.rows) {
        const auto name = "run_" + row.axis + "_" + row.value + ".json";
        write_text((dir / name).string(),
                   sttsim::report_to_json_text(row.report));
    }
    write_text((dir / "sweep.csv").string(), sttsim::sweep_to_csv_text(sweep));
    return 0;
}

int do_gen_trace(const std::string& spec_path, std::uint64_t seed,
                 bool seed_given, const std::string& out_path) {
    sttsim::SyntheticTraceSpec spec;
    std::uint64_t use_seed = seed_given ? seed : 1;
    if (!spec_path.empty()) {
        const sttsim::RunConfig cfg = sttsim::load_config(spec_path, true);
        spec = cfg.synthetic_spec();
        if (spec.length == 0) spec.length = sttsim::SyntheticTraceSpec{}.length;
        if (!seed_given) use_seed = cfg.trace.seed;
    }
    const auto trace = sttsim::generate_trace(spec, use_seed);
    std::ostringstream text;
    text << "# synthetic trace: " << trace.size() << " requests, seed "
         << use_seed << "\n";
    sttsim::write_trace(text, trace);
    write_text(out_path, text.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cache hierarchy attack/mitigation simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string trace_path;
    std::string out_path;
    std::string format = "json";
    std::string axis = "duration";
    std::string spec_path;
    std::uint64_t seed = 1;

    CLI::App* run = app.add_subcommand("run", "simulate one configuration");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--trace", trace_path, "trace file (overrides the config)");
    run->add_option("--out", out_path, "output path ('-' or empty = stdout)");
    run->add_option("--format", format, "report format")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI::App* sweep = app.add_subcommand("sweep", "sweep one config axis");
    sweep->add_option("--config", config_path, "config file")->required();
    sweep->add_option("--axis", axis,
                      "duration|policy|checkpoint_interval");
    sweep->add_option("--out", out_path,
                      "output directory for per-run json and sweep.csv "
                      "(empty = csv to stdout)");

    CLI::App* gen = app.add_subcommand("gen-trace", "synthesize a trace");
    gen->add_option("--spec", spec_path, "config file supplying trace.* keys");
    CLI::Option* seed_opt = gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--out", out_path, "output path ('-' or empty = stdout)");

    try {
        app.parse(argc, argv);
        if (*run) return do_run(config_path, trace_path, out_path, format);
        if (*sweep) return do_sweep(config_path, axis, out_path);
        return do_gen_trace(spec_path, seed, seed_opt->count() > 0, out_path);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const sttsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const sttsim::TraceError& e) {
        std::cerr << "trace error: " << e.what() << "\n";
        return 3;
    } catch (const std::logic_error& e) {
        // InvariantViolation, ProtocolError, HaltedError: the run is invalid
        std::cerr << "invariant violated: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
