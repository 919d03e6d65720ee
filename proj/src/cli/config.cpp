#include "caps/cli/config.hpp"

#include "caps/error.hpp"

#include <CLI11.hpp>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace caps::cli {

namespace {

struct OptionDef {
    const char* key;
    const char* help;
};

constexpr std::array kOptions{
    OptionDef{"C", "cooperativity g^2/(2 kappa Gamma3); excludes --g"},
    OptionDef{"g", "atom-cavity coupling in units of kappa; excludes --C"},
    OptionDef{"gamma3", "total excited-state decay Gamma3 (default 1)"},
    OptionDef{"gamma31", "decay rate |3> -> |1>"},
    OptionDef{"gamma32", "decay rate |3> -> |2>"},
    OptionDef{"tau-p", "pulse duration (amplitude FWHM) in 1/kappa (default 50)"},
    OptionDef{"t0", "pulse peak time (default 0)"},
    OptionDef{"dt", "grid step override"},
    OptionDef{"span", "time window length override, measured from t0 - 4 tau_p"},
    OptionDef{"weights", "initial atom amplitudes: balanced | w11,w12,w21,w22 | u1,u2/v1,v2 (re or re:im)"},
    OptionDef{"detector-efficiency", "detector efficiency in [0, 1] (default 1)"},
    OptionDef{"n-a", "atoms in cloud A"},
    OptionDef{"n-b", "atoms in cloud B"},
    OptionDef{"phi-a", "GHZ phase of cloud A [rad]"},
    OptionDef{"phi-b", "GHZ phase of cloud B [rad]"},
    OptionDef{"mode", "cloud scattering model: ideal | finite-c"},
    OptionDef{"protocol", "sweep protocol: same-cavity | remote"},
    OptionDef{"axis", "sweep axis: C | tau-p"},
    OptionDef{"grid-min", "smallest sweep value"},
    OptionDef{"grid-max", "largest sweep value"},
    OptionDef{"grid-points", "number of sweep values"},
    OptionDef{"c-values", "comma-separated cooperativities for the tau-p axis"},
    OptionDef{"threads", "sweep worker threads (0 = all cores)"},
    OptionDef{"out", "output file"},
    OptionDef{"format", "output format: json | csv"},
};

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorCode::Usage, msg); }

class Values {
public:
    explicit Values(std::map<std::string, std::string> v) : values_(std::move(v)) {}

    bool has(const std::string& key) const { return values_.contains(key); }

    const std::string& text(const std::string& key) const { return values_.at(key); }

    double number(const std::string& key) const {
        const std::string& s = text(key);
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
            usage("--" + key + ": expected a number, got '" + s + "'");
        }
        return v;
    }

    double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    long integer(const std::string& key) const {
        const std::string& s = text(key);
        long v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            usage("--" + key + ": expected an integer, got '" + s + "'");
        }
        return v;
    }

    double positive(const std::string& key) const {
        const double v = number(key);
        if (!(v > 0.0)) usage("--" + key + " must be positive");
        return v;
    }

    double non_negative(const std::string& key) const {
        const double v = number(key);
        if (!(v >= 0.0)) usage("--" + key + " must be >= 0");
        return v;
    }

private:
    std::map<std::string, std::string> values_;
};

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

cplx parse_amplitude(const std::string& text) {
    const auto colon = text.find(':');
    auto read = [&](const std::string& part) {
        const std::string s = trim(part);
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            usage("--weights: cannot read amplitude '" + text + "'");
        }
        return v;
    };
    if (colon == std::string::npos) return {read(text), 0.0};
    return {read(text.substr(0, colon)), read(text.substr(colon + 1))};
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) parts.push_back(trim(item));
    return parts;
}

void resolve_cavity(const Values& v, RunConfig& cfg, bool coupling_required) {
    const bool has_c = v.has("C");
    const bool has_g = v.has("g");
    if (has_c && has_g) usage("--C and --g are mutually exclusive (over-constrained)");
    if (!has_c && !has_g && coupling_required) usage("--C: one of --C or --g is required");

    double gamma3 = v.has("gamma3") ? v.non_negative("gamma3") : 1.0;
    double gamma31 = 0.5 * gamma3;
    double gamma32 = 0.5 * gamma3;
    const bool has31 = v.has("gamma31");
    const bool has32 = v.has("gamma32");
    if (has31 && has32) {
        gamma31 = v.non_negative("gamma31");
        gamma32 = v.non_negative("gamma32");
        if (v.has("gamma3") && std::abs(gamma31 + gamma32 - gamma3) > 1e-12) {
            usage("--gamma3: disagrees with --gamma31 + --gamma32");
        }
        gamma3 = gamma31 + gamma32;
    } else if (has31 || has32) {
        const std::string key = has31 ? "gamma31" : "gamma32";
        const double given = v.non_negative(key);
        const double other = gamma3 - given;
        if (other < 0.0) usage("--" + key + ": exceeds the total decay --gamma3");
        gamma31 = has31 ? given : other;
        gamma32 = has31 ? other : given;
    }

    CavityParams p;
    p.kappa = 1.0;
    p.gamma31 = gamma31;
    p.gamma32 = gamma32;
    if (has_c) {
        const double C = v.non_negative("C");
        if (!(gamma3 > 0.0)) usage("--C: cooperativity needs Gamma3 > 0");
        p.g = std::sqrt(2.0 * p.kappa * gamma3 * C);
    } else if (has_g) {
        p.g = v.non_negative("g");
    }
    if (v.has("detector-efficiency")) {
        p.detector_efficiency = v.number("detector-efficiency");
        if (!(p.detector_efficiency >= 0.0 && p.detector_efficiency <= 1.0)) {
            usage("--detector-efficiency must lie in [0, 1]");
        }
    }
    cfg.cavity = p;
    cfg.cooperativity = has_c ? v.number("C") : p.cooperativity();
}

RunConfig build(const std::string& command, const Values& v) {
    RunConfig cfg;
    if (command == "validate") {
        cfg.command = Command::Validate;
    } else if (command == "sweep") {
        cfg.command = Command::Sweep;
        cfg.protocol = v.has("protocol") ? parse_protocol(v.text("protocol")) : Protocol::SameCavity;
        if (cfg.protocol == Protocol::GhzCloud) usage("--protocol: sweeps support same-cavity and remote");
    } else {
        cfg.command = Command::Sim;
        cfg.protocol = parse_protocol(command);
    }

    if (v.has("tau-p")) cfg.tau_p = v.positive("tau-p");
    if (v.has("t0")) cfg.t0 = v.number("t0");
    if (v.has("dt")) cfg.dt = v.positive("dt");
    if (v.has("span")) cfg.span = v.positive("span");
    if (v.has("weights")) cfg.weights = parse_weights(v.text("weights"));
    if (v.has("threads")) {
        const long t = v.integer("threads");
        if (t < 0) usage("--threads must be >= 0");
        cfg.threads = static_cast<unsigned>(t);
    }

    if (v.has("n-a")) cfg.cloud.n_a = static_cast<int>(v.integer("n-a"));
    if (v.has("n-b")) cfg.cloud.n_b = static_cast<int>(v.integer("n-b"));
    if (cfg.cloud.n_a < 1) usage("--n-a must be >= 1");
    if (cfg.cloud.n_b < 1) usage("--n-b must be >= 1");
    cfg.cloud.phi_a = v.number_or("phi-a", 0.0);
    cfg.cloud.phi_b = v.number_or("phi-b", 0.0);
    if (v.has("mode")) {
        try {
            cfg.cloud.mode = parse_cloud_mode(v.text("mode"));
        } catch (const Error&) {
            usage("--mode: expected ideal or finite-c, got '" + v.text("mode") + "'");
        }
    }

    const bool needs_coupling =
        cfg.command == Command::Sim && !(cfg.protocol == Protocol::GhzCloud && cfg.cloud.mode == CloudMode::IdealCpf);
    resolve_cavity(v, cfg, needs_coupling);
    if (cfg.command == Command::Sweep && (v.has("C") || v.has("g"))) {
        usage("--C: the sweep sets the cooperativity from its grid; use --c-values for the tau-p axis");
    }

    if (cfg.command == Command::Sweep) {
        if (v.has("axis")) {
            try {
                cfg.axis = parse_sweep_axis(v.text("axis"));
            } catch (const Error&) {
                usage("--axis: expected C or tau-p, got '" + v.text("axis") + "'");
            }
        }
        const bool on_c = cfg.axis == SweepAxis::Cooperativity;
        const double lo = v.has("grid-min") ? v.positive("grid-min") : (on_c ? 0.01 : 0.5);
        const double hi = v.has("grid-max") ? v.positive("grid-max") : (on_c ? 20.0 : 50.0);
        const long n = v.has("grid-points") ? v.integer("grid-points") : (on_c ? 200 : 100);
        if (n < 1) usage("--grid-points must be >= 1");
        if (n > 1 && !(hi > lo)) usage("--grid-max must exceed --grid-min");
        cfg.sweep_grid = on_c ? log_grid(lo, hi, static_cast<std::size_t>(n))
                              : linear_grid(lo, hi, static_cast<std::size_t>(n));
        if (v.has("c-values")) {
            cfg.cooperativities.clear();
            for (const auto& part : split(v.text("c-values"), ',')) {
                double c = 0.0;
                const auto res = std::from_chars(part.data(), part.data() + part.size(), c);
                if (part.empty() || res.ec != std::errc{} || res.ptr != part.data() + part.size() || !(c > 0.0)) {
                    usage("--c-values: cannot read cooperativity '" + part + "'");
                }
                cfg.cooperativities.push_back(c);
            }
        }
    }

    cfg.format = cfg.command == Command::Sweep ? OutputFormat::Csv : OutputFormat::Json;
    if (v.has("format")) {
        const auto& f = v.text("format");
        if (f == "json") {
            cfg.format = OutputFormat::Json;
        } else if (f == "csv") {
            if (cfg.command != Command::Sweep) usage("--format: csv output is only available for sweeps");
            cfg.format = OutputFormat::Csv;
        } else {
            usage("--format: expected json or csv, got '" + f + "'");
        }
    }
    if (v.has("out")) cfg.out = v.text("out");
    return cfg;
}

} // namespace

std::filesystem::path RunConfig::output_path() const {
    if (out) return *out;
    std::filesystem::path dir = ".";
    if (const char* env = std::getenv("CAPS_OUT_DIR"); env && *env) dir = env;
    const std::string ext = format == OutputFormat::Csv ? ".csv" : ".json";
    switch (command) {
    case Command::Sim: return dir / (std::string(to_string(protocol)) + ext);
    case Command::Sweep:
        return dir / ("sweep-" + std::string(to_string(protocol)) + "-" + std::string(to_string(axis)) + ext);
    case Command::Validate: return dir / "validate.json";
    }
    return dir / ("caps" + ext);
}

AtomWeights parse_weights(const std::string& text) {
    const std::string t = trim(text);
    if (t == "balanced") return AtomWeights::balanced();
    try {
        if (const auto slash = t.find('/'); slash != std::string::npos) {
            const auto a = split(t.substr(0, slash), ',');
            const auto b = split(t.substr(slash + 1), ',');
            if (a.size() != 2 || b.size() != 2) usage("--weights: per-atom form needs 'u1,u2/v1,v2'");
            return AtomWeights::product({parse_amplitude(a[0]), parse_amplitude(a[1])},
                                        {parse_amplitude(b[0]), parse_amplitude(b[1])});
        }
        const auto parts = split(t, ',');
        if (parts.size() != 4) usage("--weights: expected four amplitudes w11,w12,w21,w22");
        return AtomWeights::normalized({parse_amplitude(parts[0]), parse_amplitude(parts[1]),
                                        parse_amplitude(parts[2]), parse_amplitude(parts[3])});
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Usage) throw;
        usage(std::string("--weights: ") + e.what());
    }
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) usage("--config: cannot open '" + path.string() + "'");
    std::set<std::string> known;
    for (const auto& o : kOptions) known.insert(o.key);

    std::map<std::string, std::string> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            usage("--config: line " + std::to_string(lineno) + " is not key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (!known.contains(key)) usage("--config: unknown key '" + key + "'");
        values[key] = trim(line.substr(eq + 1));
    }
    return values;
}

RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Heralded entanglement via single-photon scattering off single-sided cavities", "caps"};
    app.require_subcommand(1);

    std::map<std::string, std::map<std::string, std::string>> raw;
    std::map<std::string, std::string> config_paths;
    std::vector<std::pair<std::string, CLI::App*>> leaves;

    auto add_leaf = [&](CLI::App* parent, const std::string& name, const std::string& description,
                        const std::string& id) {
        CLI::App* leaf = parent->add_subcommand(name, description);
        for (const auto& o : kOptions) leaf->add_option(std::string("--") + o.key, raw[id][o.key], o.help);
        leaf->add_option("--config", config_paths[id], "flat key=value file with default option values");
        leaves.emplace_back(id, leaf);
    };

    CLI::App* sim = app.add_subcommand("sim", "Run one protocol and write a JSON result");
    sim->require_subcommand(1);
    add_leaf(sim, "same-cavity", "Both atoms in one cavity", "same-cavity");
    add_leaf(sim, "remote", "Atoms in two cavities behind a beam splitter", "remote");
    add_leaf(sim, "ghz-cloud", "Two GHZ-prepared atomic clouds", "ghz-cloud");
    add_leaf(&app, "sweep", "Sweep the cooperativity or the pulse duration", "sweep");
    add_leaf(&app, "validate", "Run the built-in oracle checks", "validate");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::string text = app.help();
        for (const auto& [id, leaf] : leaves) {
            if (leaf->parsed()) text = leaf->help();
        }
        throw HelpRequested{text};
    } catch (const CLI::ParseError& e) {
        usage(e.what());
    }

    for (const auto& [id, leaf] : leaves) {
        if (!leaf->parsed()) continue;
        std::map<std::string, std::string> values;
        if (leaf->count("--config") > 0) values = read_config_file(config_paths[id]);
        for (const auto& o : kOptions) {
            if (leaf->count(std::string("--") + o.key) > 0) values[o.key] = raw[id][o.key];
        }
        return build(id, Values(std::move(values)));
    }
    usage("no command given");
}

RunConfig parse_config(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return parse_config(args);
}

} // namespace caps::cli
