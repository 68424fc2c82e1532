#include "kirchhoff/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace kirchhoff {

std::string to_string(InitFamily f) {
    switch (f) {
        case InitFamily::SineMode: return "sine-mode";
        case InitFamily::GaussianBump: return "gaussian-bump";
        case InitFamily::FourierRandom: return "fourier-random";
        case InitFamily::File: return "file";
    }
    return "unknown";
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::optional<double> to_double(const std::string& s) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size() || std::isnan(v)) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

std::optional<long long> to_int(const std::string& s) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

std::optional<bool> to_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    return std::nullopt;
}

struct KeyEntry {
    bool numeric;
    std::function<std::optional<std::string>(ExperimentConfig&, const std::string&)> apply;
};

std::optional<std::string> need_double(const std::string& v, double* out) {
    const auto d = to_double(v);
    if (!d) return "expected a real number, got '" + v + "'";
    *out = *d;
    return std::nullopt;
}

std::optional<std::string> need_int(const std::string& v, int* out) {
    const auto i = to_int(v);
    if (!i) return "expected an integer, got '" + v + "'";
    *out = static_cast<int>(*i);
    return std::nullopt;
}

std::optional<std::string> need_bool(const std::string& v, bool* out) {
    const auto b = to_bool(v);
    if (!b) return "expected true/false, got '" + v + "'";
    *out = *b;
    return std::nullopt;
}

const std::map<std::string, KeyEntry>& key_table() {
    static const std::map<std::string, KeyEntry> table = [] {
        std::map<std::string, KeyEntry> t;
        auto num = [&](const std::string& k, auto setter) { t[k] = {true, setter}; };
        auto other = [&](const std::string& k, auto setter) { t[k] = {false, setter}; };

        num("mesh.dimension", [](ExperimentConfig& c, const std::string& v) {
            return need_int(v, &c.mesh.dimension);
        });
        num("mesh.extent_x", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.mesh.extent_x);
        });
        num("mesh.extent_y", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.mesh.extent_y);
        });
        num("mesh.nodes_x", [](ExperimentConfig& c, const std::string& v) {
            return need_int(v, &c.mesh.nodes_x);
        });
        num("mesh.nodes_y", [](ExperimentConfig& c, const std::string& v) {
            return need_int(v, &c.mesh.nodes_y);
        });
        num("model.a", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.model.a);
        });
        num("model.b", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.model.b);
        });
        num("model.q", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.model.q);
        });
        other("init.family", [](ExperimentConfig& c, const std::string& v) -> std::optional<std::string> {
            if (v == "sine-mode") c.init.family = InitFamily::SineMode;
            else if (v == "gaussian-bump") c.init.family = InitFamily::GaussianBump;
            else if (v == "fourier-random") c.init.family = InitFamily::FourierRandom;
            else if (v == "file") c.init.family = InitFamily::File;
            else return "unknown initial-data family '" + v +
                        "' (expected sine-mode, gaussian-bump, fourier-random or file)";
            return std::nullopt;
        });
        num("init.amplitude", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.init.amplitude);
        });
        num("init.mode_x", [](ExperimentConfig& c, const std::string& v) {
            return need_int(v, &c.init.mode_x);
        });
        num("init.mode_y", [](ExperimentConfig& c, const std::string& v) {
            return need_int(v, &c.init.mode_y);
        });
        num("init.center_x", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.init.center_x);
        });
        num("init.center_y", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.init.center_y);
        });
        num("init.width", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.init.width);
        });
        other("init.file", [](ExperimentConfig& c, const std::string& v) -> std::optional<std::string> {
            c.init.file = v;
            return std::nullopt;
        });
        num("time.dt", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.time.dt);
        });
        num("time.t_end", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.time.t_end);
        });
        other("time.scheme", [](ExperimentConfig& c, const std::string& v) -> std::optional<std::string> {
            if (v == "semi-implicit") c.time.scheme = Scheme::SemiImplicit;
            else if (v == "fully-implicit") c.time.scheme = Scheme::FullyImplicit;
            else return "unknown scheme '" + v + "' (expected semi-implicit or fully-implicit)";
            return std::nullopt;
        });
        num("time.blowup_cap", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.time.blowup_cap);
        });
        num("time.dt_min", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.time.dt_min);
        });
        other("time.adaptive", [](ExperimentConfig& c, const std::string& v) {
            return need_bool(v, &c.time.adaptive);
        });
        num("time.snapshot_stride", [](ExperimentConfig& c, const std::string& v) {
            return need_int(v, &c.time.snapshot_stride);
        });
        num("time.growth_cap", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.time.growth_cap);
        });
        other("analysis.verify_decay", [](ExperimentConfig& c, const std::string& v) {
            return need_bool(v, &c.analysis.verify_decay);
        });
        other("analysis.omega_limit", [](ExperimentConfig& c, const std::string& v) {
            return need_bool(v, &c.analysis.omega_limit);
        });
        other("analysis.well_depth", [](ExperimentConfig& c, const std::string& v) {
            return need_bool(v, &c.analysis.well_depth);
        });
        other("analysis.bounds", [](ExperimentConfig& c, const std::string& v) {
            return need_bool(v, &c.analysis.bounds);
        });
        num("analysis.decay_slack", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.analysis.decay_slack);
        });
        num("analysis.bounds_s_factor", [](ExperimentConfig& c, const std::string& v) {
            return need_double(v, &c.analysis.bounds_s_factor);
        });
        num("analysis.bounds_samples", [](ExperimentConfig& c, const std::string& v) {
            return need_int(v, &c.analysis.bounds_samples);
        });
        num("analysis.gn_samples", [](ExperimentConfig& c, const std::string& v) {
            return need_int(v, &c.analysis.gn_samples);
        });
        other("output.dir", [](ExperimentConfig& c, const std::string& v) -> std::optional<std::string> {
            c.output_dir = v;
            return std::nullopt;
        });
        num("seed", [](ExperimentConfig& c, const std::string& v) -> std::optional<std::string> {
            const auto i = to_int(v);
            if (!i || *i < 0) return "expected a nonnegative integer, got '" + v + "'";
            c.seed = static_cast<std::uint64_t>(*i);
            return std::nullopt;
        });
        return t;
    }();
    return table;
}

} // namespace

std::optional<std::string> apply_key(ExperimentConfig& cfg, const std::string& key,
                                     const std::string& value) {
    const auto& table = key_table();
    const auto it = table.find(key);
    if (it == table.end()) return "unknown key '" + key + "'";
    return it->second.apply(cfg, value);
}

bool is_numeric_key(const std::string& key) {
    const auto& table = key_table();
    const auto it = table.find(key);
    return it != table.end() && it->second.numeric;
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> errors;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };

    check(cfg.mesh.dimension == 1 || cfg.mesh.dimension == 2, "mesh.dimension must be 1 or 2");
    check(cfg.mesh.extent_x > 0.0, "mesh.extent_x must be positive");
    check(cfg.mesh.nodes_x >= 3, "mesh.nodes_x must be at least 3");
    if (cfg.mesh.dimension == 2) {
        check(cfg.mesh.extent_y > 0.0, "mesh.extent_y must be positive");
        check(cfg.mesh.nodes_y >= 3, "mesh.nodes_y must be at least 3");
    }

    const ParamValidation pv =
        validate_params(ModelParams{cfg.model.a, cfg.model.b, cfg.model.q, cfg.mesh.dimension});
    errors.insert(errors.end(), pv.errors.begin(), pv.errors.end());

    check(std::isfinite(cfg.init.amplitude), "init.amplitude must be finite");
    check(cfg.init.mode_x >= 1, "init.mode_x must be at least 1");
    check(cfg.init.mode_y >= 1, "init.mode_y must be at least 1");
    check(cfg.init.width > 0.0, "init.width must be positive");
    if (cfg.init.family == InitFamily::File)
        check(!cfg.init.file.empty(), "init.family = file requires init.file");

    check(cfg.time.dt > 0.0, "time.dt must be positive");
    check(cfg.time.t_end > 0.0, "time.t_end must be positive");
    check(cfg.time.dt_min > 0.0 && cfg.time.dt_min <= cfg.time.dt,
          "time.dt_min must satisfy 0 < dt_min <= dt");
    check(cfg.time.blowup_cap > 0.0, "time.blowup_cap must be positive");
    check(cfg.time.snapshot_stride >= 1, "time.snapshot_stride must be at least 1");
    check(cfg.time.growth_cap > 0.0, "time.growth_cap must be positive");

    check(cfg.analysis.decay_slack >= 0.0, "analysis.decay_slack must be nonnegative");
    check(cfg.analysis.bounds_s_factor > 1.0, "analysis.bounds_s_factor must exceed 1");
    check(cfg.analysis.bounds_samples >= 1, "analysis.bounds_samples must be at least 1");
    check(cfg.analysis.gn_samples >= 1, "analysis.gn_samples must be at least 1");
    check(!cfg.output_dir.empty(), "output.dir must not be empty");
    return errors;
}

ParseResult parse_config(const std::string& text) {
    ParseResult result;
    ExperimentConfig cfg;
    std::vector<std::string> errors;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value', got '" +
                             line + "'");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            errors.push_back("line " + std::to_string(lineno) + ": empty key or value");
            continue;
        }
        if (auto err = apply_key(cfg, key, value))
            errors.push_back("line " + std::to_string(lineno) + " (" + key + "): " + *err);
    }

    const std::vector<std::string> invariant_errors = validate_config(cfg);
    errors.insert(errors.end(), invariant_errors.begin(), invariant_errors.end());

    if (errors.empty()) result.config = cfg;
    result.errors = std::move(errors);
    return result;
}

ParseResult parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ParseResult r;
        r.errors.push_back("cannot open config file '" + path + "'");
        return r;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace kirchhoff
