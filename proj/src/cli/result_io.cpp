#include "caps/cli/result_io.hpp"

#include "caps/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

namespace caps::cli {

namespace {

std::string num(double v) { return std::isfinite(v) ? format_number(v) : "null"; }

std::string pair(cplx z) { return "[" + num(z.real()) + ", " + num(z.imag()) + "]"; }

std::string json_string(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

// Minimal pretty-printer: the caller emits keys and values, this tracks
// commas and indentation.
class JsonWriter {
public:
    JsonWriter& open(std::string_view key, char bracket) {
        prefix(key);
        out_ << bracket << '\n';
        first_ = true;
        ++depth_;
        return *this;
    }

    JsonWriter& close(char bracket) {
        out_ << '\n';
        --depth_;
        indent();
        out_ << bracket;
        first_ = false;
        return *this;
    }

    JsonWriter& raw(std::string_view key, const std::string& value) {
        prefix(key);
        out_ << value;
        first_ = false;
        return *this;
    }

    JsonWriter& number(std::string_view key, double v) { return raw(key, num(v)); }
    JsonWriter& text(std::string_view key, std::string_view v) { return raw(key, json_string(v)); }

    std::string str() const { return out_.str() + "\n"; }

private:
    void indent() {
        for (int i = 0; i < depth_; ++i) out_ << "  ";
    }

    void prefix(std::string_view key) {
        if (depth_ > 0) {
            if (!first_) out_ << ",\n";
            indent();
        }
        if (!key.empty()) out_ << json_string(key) << ": ";
        first_ = false;
    }

    std::ostringstream out_;
    int depth_ = 0;
    bool first_ = true;
};

std::string matrix_pairs(const Matrix4c& m) {
    std::string s = "[";
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) s += (r || c ? ", " : "") + pair(m(r, c));
    }
    return s + "]";
}

std::string series(const PulseEnvelope& p, std::size_t stride) {
    std::string s = "[";
    for (std::size_t i = 0; i < p.size(); i += stride) s += (i ? ", " : "") + pair(p[i]);
    return s + "]";
}

void write_params(JsonWriter& w, const RunParams& p) {
    w.open("params", '{');
    w.number("C", p.cavity.cooperativity());
    w.number("g", p.cavity.g);
    w.number("kappa", p.cavity.kappa);
    w.number("gamma3", p.cavity.gamma3());
    w.number("gamma31", p.cavity.gamma31);
    w.number("gamma32", p.cavity.gamma32);
    w.number("detector_efficiency", p.cavity.detector_efficiency);
    if (p.cavity_b) {
        w.number("C_b", p.cavity_b->cooperativity());
        w.number("g_b", p.cavity_b->g);
        w.number("gamma3_b", p.cavity_b->gamma3());
    }
    w.number("tau_p", p.tau_p);
    w.number("t0", p.t0);
    w.number("t_start", p.grid.t_start);
    w.number("dt", p.grid.dt);
    w.number("n_points", static_cast<double>(p.grid.n_points));
    w.close('}');
}

void write_header(JsonWriter& w, Protocol protocol) {
    w.text("schema", kResultSchema);
    w.text("generator", "caps " CAPS_VERSION);
    w.text("protocol", to_string(protocol));
    w.raw("basis", R"(["11", "12", "21", "22"])");
}

} // namespace

std::string outcome_to_json(const ProtocolOutcome& outcome) {
    JsonWriter w;
    w.open("", '{');
    write_header(w, outcome.protocol);
    write_params(w, outcome.params);

    std::string weights = "[";
    for (std::size_t i = 0; i < 4; ++i) weights += (i ? ", " : "") + pair(outcome.weights.w[i]);
    w.raw("weights", weights + "]");
    w.number("total_probability", outcome.total_probability);

    w.open("branches", '[');
    for (const auto& b : outcome.branches) {
        w.open("", '{');
        w.text("herald", b.herald);
        w.number("probability", b.probability);
        w.number("concurrence", b.concurrence);
        w.number("purity", b.purity);
        w.raw("rho", b.state ? matrix_pairs(b.state->rho()) : "null");
        w.close('}');
    }
    w.close(']');

    const std::size_t n = outcome.input.size();
    const std::size_t stride = n <= kMaxEnvelopeSamples ? 1 : (n + kMaxEnvelopeSamples - 2) / (kMaxEnvelopeSamples - 1);
    w.open("envelopes", '{');
    w.number("stride", static_cast<double>(stride));
    std::string t = "[";
    for (std::size_t i = 0; i < n; i += stride) t += (i ? ", " : "") + num(outcome.input.grid().time(i));
    w.raw("t", t + "]");
    w.raw("input", series(outcome.input, stride));
    for (const auto& [name, env] : outcome.responses) w.raw(name, series(env, stride));
    w.close('}');

    w.close('}');
    return w.str();
}

std::string cloud_to_json(const CloudOutcome& outcome) {
    JsonWriter w;
    w.open("", '{');
    write_header(w, Protocol::GhzCloud);
    w.open("cloud", '{');
    w.number("n_a", outcome.spec.n_a);
    w.number("n_b", outcome.spec.n_b);
    w.number("phi_a", outcome.spec.phi_a);
    w.number("phi_b", outcome.spec.phi_b);
    w.text("mode", to_string(outcome.spec.mode));
    w.close('}');
    write_params(w, outcome.params);
    w.number("total_probability", outcome.total_probability);

    w.open("branches", '[');
    for (const auto& b : outcome.branches) {
        w.open("", '{');
        w.text("herald", b.herald);
        w.number("probability", b.probability);
        w.number("concurrence", b.concurrence);
        w.number("purity", b.purity);
        w.number("schmidt_entropy", b.schmidt_entropy);
        const Matrix2c& a = b.amplitudes;
        w.raw("amplitudes",
              "[" + pair(a(0, 0)) + ", " + pair(a(0, 1)) + ", " + pair(a(1, 0)) + ", " + pair(a(1, 1)) + "]");
        w.raw("rho", b.state ? matrix_pairs(b.state->rho()) : "null");
        w.close('}');
    }
    w.close(']');
    w.close('}');
    return w.str();
}

std::string validation_to_json(const std::vector<CheckResult>& checks) {
    JsonWriter w;
    w.open("", '{');
    w.text("schema", kResultSchema);
    w.text("generator", "caps " CAPS_VERSION);
    bool all = true;
    for (const auto& c : checks) all = all && c.passed;
    w.raw("passed", all ? "true" : "false");
    w.open("checks", '[');
    for (const auto& c : checks) {
        w.open("", '{');
        w.text("name", c.name);
        w.raw("passed", c.passed ? "true" : "false");
        w.text("detail", c.detail);
        w.close('}');
    }
    w.close(']');
    w.close('}');
    return w.str();
}

std::string sweep_to_csv(const SweepTable& table) {
    std::string out;
    for (const auto& [key, value] : table.metadata) out += "# " + key + ": " + value + "\n";
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
    out += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
        out += "\n";
    }
    return out;
}

std::string sweep_to_json(const SweepTable& table) {
    JsonWriter w;
    w.open("", '{');
    w.text("schema", kResultSchema);
    w.open("metadata", '{');
    for (const auto& [key, value] : table.metadata) w.text(key, value);
    w.close('}');
    std::string cols = "[";
    for (std::size_t i = 0; i < table.columns.size(); ++i) cols += (i ? ", " : "") + json_string(table.columns[i]);
    w.raw("columns", cols + "]");
    w.open("rows", '[');
    for (const auto& row : table.rows) {
        std::string r = "[";
        for (std::size_t i = 0; i < row.size(); ++i) r += (i ? ", " : "") + num(row[i]);
        w.raw("", r + "]");
    }
    w.close(']');
    w.close('}');
    return w.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target = path.has_parent_path() ? path : fs::path(".") / path;
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create directory '" + target.parent_path().string() + "': " + ec.message());

    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot open '" + tmp.string() + "' for writing");
        out << text;
        out.flush();
        if (!out) throw Error(ErrorCode::Io, "write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::Io, "cannot move result into '" + target.string() + "'");
    }
}

double ResultScalars::at(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) throw Error(ErrorCode::InvalidArgument, "result has no scalar '" + key + "'");
    return it->second;
}

namespace {

void flatten_pairs(const nlohmann::json& arr, const std::string& key, std::map<std::string, double>& out) {
    for (std::size_t i = 0; i < arr.size(); ++i) {
        out[key + "." + std::to_string(i) + ".re"] = arr[i][0].get<double>();
        out[key + "." + std::to_string(i) + ".im"] = arr[i][1].get<double>();
    }
}

} // namespace

ResultScalars read_result(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Io, "malformed result file '" + path.string() + "': " + e.what());
    }

    ResultScalars r;
    r.schema = doc.value("schema", "");
    r.protocol = doc.value("protocol", "");
    if (r.schema != kResultSchema) throw Error(ErrorCode::Io, "unsupported schema '" + r.schema + "'");

    auto scalar = [&](const std::string& key, const nlohmann::json& v) {
        r.values[key] = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
    };
    for (const auto& section : {"params", "cloud"}) {
        if (!doc.contains(section)) continue;
        for (const auto& [k, v] : doc[section].items()) {
            if (v.is_number() || v.is_null()) scalar(std::string(section) + "." + k, v);
        }
    }
    if (doc.contains("weights")) flatten_pairs(doc["weights"], "weights", r.values);
    scalar("total_probability", doc.at("total_probability"));
    for (const auto& b : doc.at("branches")) {
        const std::string base = "branches." + b.at("herald").get<std::string>();
        for (const auto& [k, v] : b.items()) {
            if (v.is_number()) scalar(base + "." + k, v);
        }
        if (!b.at("rho").is_null()) flatten_pairs(b["rho"], base + ".rho", r.values);
        if (b.contains("amplitudes")) flatten_pairs(b["amplitudes"], base + ".amplitudes", r.values);
    }
    return r;
}

SweepTable read_sweep_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
    SweepTable table;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.starts_with("# ")) {
            const auto colon = line.find(": ");
            if (colon == std::string::npos) throw Error(ErrorCode::Io, "malformed metadata line '" + line + "'");
            table.metadata.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
            continue;
        }
        std::istringstream cells(line);
        std::string cell;
        if (!header) {
            while (std::getline(cells, cell, ',')) table.columns.push_back(cell);
            header = true;
            continue;
        }
        std::vector<double> row;
        while (std::getline(cells, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw Error(ErrorCode::Io, "malformed number '" + cell + "' in '" + path.string() + "'");
            }
        }
        if (row.size() != table.columns.size()) {
            throw Error(ErrorCode::Io, "row width does not match the header in '" + path.string() + "'");
        }
        table.rows.push_back(std::move(row));
    }
    if (!header) throw Error(ErrorCode::Io, "no header row in '" + path.string() + "'");
    return table;
}

} // namespace caps::cli
