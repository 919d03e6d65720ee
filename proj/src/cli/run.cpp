#include "caps/cli/run.hpp"

#include "caps/cli/result_io.hpp"
#include "caps/error.hpp"

#include <ostream>

namespace caps::cli {

namespace {

int run_sim(const RunConfig& cfg, std::ostream& out) {
    const auto grid = simulation_grid(cfg.tau_p, cfg.t0, cfg.cavity, cfg.dt, cfg.span);
    const auto pulse = gaussian_pulse(cfg.tau_p, cfg.t0, grid);
    const auto path = cfg.output_path();

    if (cfg.protocol == Protocol::GhzCloud) {
        const auto outcome = run_ghz_cloud(cfg.cloud, cfg.cavity, pulse);
        write_atomic(path, cloud_to_json(outcome));
        for (const auto& b : outcome.branches) {
            out << b.herald << ": P = " << format_number(b.probability)
                << "  S = " << format_number(b.schmidt_entropy) << "\n";
        }
    } else {
        const auto outcome = cfg.protocol == Protocol::Remote ? run_remote(cfg.cavity, pulse, cfg.weights)
                                                              : run_same_cavity(cfg.cavity, pulse, cfg.weights);
        write_atomic(path, outcome_to_json(outcome));
        for (const auto& b : outcome.branches) {
            out << b.herald << ": P = " << format_number(b.probability)
                << "  E = " << format_number(b.concurrence) << "\n";
        }
    }
    out << "wrote " << path.string() << "\n";
    return kExitOk;
}

int run_sweep_command(const RunConfig& cfg, std::ostream& out) {
    SweepSpec spec;
    spec.protocol = cfg.protocol;
    spec.axis = cfg.axis;
    spec.grid = cfg.sweep_grid;
    spec.tau_p = cfg.tau_p;
    spec.cooperativities = cfg.cooperativities;
    spec.gamma3 = cfg.cavity.gamma3();
    spec.t0 = cfg.t0;
    spec.detector_efficiency = cfg.cavity.detector_efficiency;
    spec.weights = cfg.weights;
    spec.dt = cfg.dt;
    spec.span = cfg.span;
    spec.threads = cfg.threads;

    const auto table = run_sweep(spec);
    const auto path = cfg.output_path();
    write_atomic(path, cfg.format == OutputFormat::Csv ? sweep_to_csv(table) : sweep_to_json(table));
    out << table.rows.size() << " rows, wrote " << path.string() << "\n";
    return kExitOk;
}

int run_validate(const RunConfig& cfg, std::ostream& out) {
    const auto checks = run_validation();
    bool all = true;
    for (const auto& c : checks) {
        out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        all = all && c.passed;
    }
    // The report file is optional: validate needs no files in or out.
    if (cfg.out) write_atomic(*cfg.out, validation_to_json(checks));
    out << (all ? "all checks passed" : "some checks failed") << "\n";
    return all ? kExitOk : kExitNumerical;
}

} // namespace

int exit_code_for(const Error& e) {
    if (e.code() == ErrorCode::Io) return kExitIo;
    if (e.is_numerical()) return kExitNumerical;
    return kExitUsage;
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        switch (config.command) {
        case Command::Sim: return run_sim(config, out);
        case Command::Sweep: return run_sweep_command(config, out);
        case Command::Validate: return run_validate(config, out);
        }
        return kExitUsage;
    } catch (const Error& e) {
        err << "caps: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "caps: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_config(args);
    } catch (const HelpRequested& help) {
        out << help.text;
        return kExitOk;
    } catch (const Error& e) {
        err << "caps: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return run_command(cfg, out, err);
}

} // namespace caps::cli
