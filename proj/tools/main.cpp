#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "tractionopt/config.hpp"
#include "tractionopt/pipeline.hpp"

using namespace tractionopt;

int main(int argc, char** argv)
{
    CLI::App app{"Traction inverter design-space explorer"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path = "config/default.json";
    std::string out_dir = "out";
    std::string fsw;
    int threads = 1;
    unsigned long seed = 0;
    bool quiet = false;
    app.add_option("--config", config_path, "Configuration file (JSON)");
    app.add_option("--out", out_dir, "Output bundle directory");
    app.add_option("--fsw", fsw, "Partial-load switching frequency in Hz, or 'opt' for the grid optimum");
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Reserved; the pipeline is deterministic");
    app.add_flag("--quiet", quiet, "Suppress progress messages");

    struct Command {
        const char* name;
        const char* help;
        std::vector<Stage> stages;
    };
    const std::vector<Command> commands{
        {"size-full-load", "Size the B6 baseline and every family at full load", {Stage::size, Stage::family}},
        {"evaluate-partial-load", "Evaluate every design over the drive cycle", {Stage::evaluate}},
        {"boundary-map", "Emit mode-boundary grid maps of the multi-mode designs", {Stage::boundary}},
        {"pareto", "Extract the area / energy-loss Pareto front", {Stage::pareto}},
        {"run", "Full pipeline", {Stage::size, Stage::family, Stage::evaluate, Stage::boundary, Stage::pareto}},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : commands) {
        subs.push_back(app.add_subcommand(c.name, c.help));
    }

    struct TraceRequest {
        std::string topology = "B6";
        std::string mode = "2L";
        std::string variant = "none";
        double speed_rpm = 0.0;
        double torque = 0.0;
        double fsw = 10e3;
        std::string file = "trace.csv";
    } trace;
    auto* dump = app.add_subcommand("dump-trace", "Debug: write the simulated period of one point as CSV");
    dump->add_option("--topology", trace.topology, "B6, TNPC or B6^2-Y");
    dump->add_option("--mode", trace.mode, "2L, 3L, Y or H");
    dump->add_option("--variant", trace.variant, "none, A, B or C");
    dump->add_option("--speed", trace.speed_rpm, "Motor speed [rpm]");
    dump->add_option("--torque", trace.torque, "Motor torque [Nm]");
    dump->add_option("--switching-frequency", trace.fsw, "Carrier frequency [Hz]");
    dump->add_option("--file", trace.file, "Output CSV");
    CLI11_PARSE(app, argc, argv);

    PipelineConfig config;
    try {
        config = load_config(config_path);
    } catch (const std::exception& e) {
        // Validation happens before any stage touches the output directory.
        std::cerr << "error: [config] " << e.what() << "\n";
        return 1;
    }
    if (dump->parsed()) {
        try {
            const SystemModel system(config.system);
            const auto topology = parse_topology(trace.topology);
            const auto mode = parse_mode(trace.mode);
            const auto variant = parse_variant(trace.variant);
            const auto mod = system.modulation(topology, mode, variant, trace.fsw);
            const auto sol = solve_operating_point(system.motor(topology), {trace.speed_rpm, trace.torque, 1.0},
                                                   voltage_limit(mode, config.system.dc_voltage));
            if (!sol.feasible) {
                throw InfeasibleError("point is electrically infeasible: " + sol.reason);
            }
            const auto tr = synthesize_period(mod, sol);
            std::ofstream out(trace.file);
            write_trace_csv(tr, out);
            std::cout << tr.sample_count << " samples written to " << trace.file << "\n";
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
        return 0;
    }
    try {
        RunOptions options;
        options.threads = threads;
        options.verbose = !quiet;
        for (std::size_t i = 0; i < commands.size(); ++i) {
            if (subs[i]->parsed()) {
                options.stages = commands[i].stages;
            }
        }
        if (!fsw.empty()) {
            FswPolicy p = config.policy;
            if (fsw == "opt") {
                p.optimal = true;
            } else {
                std::size_t used = 0;
                double f = 0.0;
                try {
                    f = std::stod(fsw, &used);
                } catch (const std::exception&) {
                    used = 0;
                }
                if (used != fsw.size() || !(f > 0)) {
                    std::cerr << "error: --fsw expects a positive frequency in Hz or 'opt'\n";
                    return 2;
                }
                p.optimal = false;
                p.fixed = f;
            }
            options.policy = p;
        }
        const auto summary = run_pipeline(config, out_dir, options);
        std::cout << "baseline B6 area: " << format_number(summary.baseline_area) << " mm^2\n";
        for (const auto& d : summary.designs) {
            std::cout << d.design << ": " << format_number(d.area) << " mm^2";
            if (d.delta_e) {
                std::cout << ", " << format_number(*d.delta_e) << " kWh/100km";
            }
            std::cout << "\n";
        }
        std::cout << "bundle: " << out_dir << " (" << summary.files.size() << " files, policy " << summary.policy
                  << ")\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
