#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "openrabi/errors.hpp"
#include "openrabi/hilbert.hpp"
#include "openrabi/output.hpp"
#include "openrabi/params.hpp"

namespace openrabi {

enum class OutputFormat { Csv, Json };
enum class BoundsMode { Strict, Warn };

// Validated run configuration. Sources, in increasing precedence:
// built-in defaults, the config file, then --set overrides.
struct RunConfig {
    // [model]
    SystemParams params{};
    ModelKind kind = ModelKind::Rabi;

    // [run]
    int n_max = 12;
    bool auto_n_max = false;
    std::string initial_state = "g,0";
    double t_end = 0.0;  // 0 = auto (30/chi)
    bool auto_t_end = true;
    double dt_out = 1.0;
    double rtol = 1e-9;
    double atol = 1e-12;
    double tail_threshold = 1e-6;
    double window_fraction = 0.5;

    // [sweep]
    std::string sweep_key;  // empty = no sweep
    std::vector<double> sweep_values;
    std::string sweep_probe = "rate";

    // [output]
    std::string out_path = "-";
    OutputFormat format = OutputFormat::Csv;
    int workers = 0;  // 0 = OPEN_RABI_WORKERS or hardware concurrency
    BoundsMode bounds = BoundsMode::Strict;

    void set(const std::string& key, const std::string& value);
    void validate() const;
    std::string canonical() const;
    std::string config_hash() const { return hex64(fnv1a64(canonical())); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for " + key + ": '" + value + "'");
    }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// Grid syntax: "log:lo:hi:n", "lin:lo:hi:n" or "list:v1,v2,...".
inline std::vector<double> parse_grid(const std::string& spec) {
    const auto head = spec.find(':');
    if (head == std::string::npos)
        throw ConfigError("bad grid '" + spec + "' (want log:lo:hi:n, lin:lo:hi:n or list:...)");
    const std::string kind = spec.substr(0, head);
    const std::string rest = spec.substr(head + 1);
    std::vector<double> values;
    if (kind == "list") {
        for (const std::string& tok : split(rest, ','))
            values.push_back(parse_double("sweep.grid", trim(tok)));
        if (values.empty()) throw ConfigError("empty sweep list");
        return values;
    }
    const auto parts = split(rest, ':');
    if (parts.size() != 3) throw ConfigError("bad grid '" + spec + "'");
    const double lo = parse_double("sweep.grid", parts[0]);
    const double hi = parse_double("sweep.grid", parts[1]);
    const int n = parse_int("sweep.grid", parts[2]);
    if (n < 2) throw ConfigError("grid needs at least 2 points");
    if (kind == "log") {
        if (!(lo > 0.0 && hi > 0.0)) throw ConfigError("log grid needs positive bounds");
        for (int i = 0; i < n; ++i)
            values.push_back(lo * std::pow(hi / lo, double(i) / double(n - 1)));
    } else if (kind == "lin") {
        for (int i = 0; i < n; ++i)
            values.push_back(lo + (hi - lo) * double(i) / double(n - 1));
    } else {
        throw ConfigError("unknown grid kind '" + kind + "'");
    }
    return values;
}

}  // namespace detail

inline void RunConfig::set(const std::string& key, const std::string& value) {
    using detail::parse_double;
    using detail::parse_int;
    if (key == "model.kind") {
        if (value == "rabi")
            kind = ModelKind::Rabi;
        else if (value == "jc" || value == "jaynes-cummings")
            kind = ModelKind::JaynesCummings;
        else
            throw ConfigError("model.kind must be rabi or jc");
    } else if (key == "model.omega0") {
        params.omega0 = parse_double(key, value);
    } else if (key == "model.delta_plus") {
        // convenience: omega is pinned at 1, so delta_plus fixes omega0
        params.omega0 = parse_double(key, value) - params.omega;
    } else if (key == "model.g") {
        params.g = parse_double(key, value);
    } else if (key == "model.kappa") {
        params.kappa = parse_double(key, value);
    } else if (key == "model.gamma") {
        params.gamma = parse_double(key, value);
    } else if (key == "model.gamma_ph") {
        params.gamma_ph = parse_double(key, value);
    } else if (key == "model.Gamma_ph") {
        params.Gamma_ph = parse_double(key, value);
    } else if (key == "model.n_t") {
        params.n_t = parse_double(key, value);
    } else if (key == "run.n_max") {
        if (value == "auto") {
            auto_n_max = true;
        } else {
            auto_n_max = false;
            n_max = parse_int(key, value);
            if (n_max < 1) throw ConfigError("run.n_max must be >= 1");
        }
    } else if (key == "run.initial_state") {
        initial_state = value;
    } else if (key == "run.t_end") {
        if (value == "auto") {
            auto_t_end = true;
            t_end = 0.0;
        } else {
            auto_t_end = false;
            t_end = parse_double(key, value);
            if (!(t_end > 0.0)) throw ConfigError("run.t_end must be positive");
        }
    } else if (key == "run.dt_out") {
        dt_out = parse_double(key, value);
        if (!(dt_out > 0.0)) throw ConfigError("run.dt_out must be positive");
    } else if (key == "run.rtol") {
        rtol = parse_double(key, value);
    } else if (key == "run.atol") {
        atol = parse_double(key, value);
    } else if (key == "run.tail_threshold") {
        tail_threshold = parse_double(key, value);
    } else if (key == "run.window_fraction") {
        window_fraction = parse_double(key, value);
    } else if (key == "sweep.key") {
        sweep_key = value;
    } else if (key == "sweep.grid") {
        sweep_values = detail::parse_grid(value);
    } else if (key == "sweep.probe") {
        if (value != "rate" && value != "steady")
            throw ConfigError("sweep.probe must be rate or steady");
        sweep_probe = value;
    } else if (key == "output.path") {
        out_path = value;
    } else if (key == "output.format") {
        if (value == "csv")
            format = OutputFormat::Csv;
        else if (value == "json")
            format = OutputFormat::Json;
        else
            throw ConfigError("output.format must be csv or json");
    } else if (key == "output.workers") {
        workers = parse_int(key, value);
        if (workers < 0) throw ConfigError("output.workers must be >= 0");
    } else if (key == "output.bounds") {
        if (value == "strict")
            bounds = BoundsMode::Strict;
        else if (value == "warn")
            bounds = BoundsMode::Warn;
        else
            throw ConfigError("output.bounds must be strict or warn");
    } else {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
}

inline void RunConfig::validate() const {
    try {
        params.validate();
    } catch (const InvalidParams& e) {
        throw ConfigError(e.what());
    }
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw ConfigError("run.window_fraction must be in (0, 1]");
    if (!(rtol > 0.0) || !(atol > 0.0))
        throw ConfigError("run.rtol and run.atol must be positive");
    if (!sweep_key.empty() && sweep_values.empty())
        throw ConfigError("sweep.key set but sweep.grid missing");
    if (sweep_key.empty() && !sweep_values.empty())
        throw ConfigError("sweep.grid set but sweep.key missing");
}

inline std::string RunConfig::canonical() const {
    char buf[64];
    auto d = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream os;
    os << "model.Gamma_ph=" << d(params.Gamma_ph) << "\n"
       << "model.g=" << d(params.g) << "\n"
       << "model.gamma=" << d(params.gamma) << "\n"
       << "model.gamma_ph=" << d(params.gamma_ph) << "\n"
       << "model.kappa=" << d(params.kappa) << "\n"
       << "model.kind=" << (kind == ModelKind::Rabi ? "rabi" : "jc") << "\n"
       << "model.n_t=" << d(params.n_t) << "\n"
       << "model.omega0=" << d(params.omega0) << "\n"
       << "run.atol=" << d(atol) << "\n"
       << "run.dt_out=" << d(dt_out) << "\n"
       << "run.initial_state=" << initial_state << "\n"
       << "run.n_max=" << (auto_n_max ? std::string("auto") : std::to_string(n_max))
       << "\n"
       << "run.rtol=" << d(rtol) << "\n"
       << "run.t_end=" << (auto_t_end ? std::string("auto") : d(t_end)) << "\n"
       << "run.tail_threshold=" << d(tail_threshold) << "\n"
       << "run.window_fraction=" << d(window_fraction) << "\n";
    if (!sweep_key.empty()) {
        os << "sweep.key=" << sweep_key << "\n";
        os << "sweep.probe=" << sweep_probe << "\n";
        os << "sweep.grid=";
        for (std::size_t i = 0; i < sweep_values.size(); ++i)
            os << (i ? "," : "") << d(sweep_values[i]);
        os << "\n";
    }
    return os.str();
}

// Minimal INI reader: [section] headers, key = value lines, '#' or ';'
// comments. Unknown sections or keys are rejected.
inline RunConfig load_config(std::istream& in, RunConfig base = {}) {
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "run" && section != "sweep" &&
                section != "output")
                throw ConfigError("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": key outside a section");
        base.set(section + "." + key, value);
    }
    return base;
}

inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return load_config(in, std::move(base));
}

// "sec.key=value" as given on the command line.
inline void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--set expects section.key=value, got '" + assignment + "'");
    cfg.set(detail::trim(assignment.substr(0, eq)),
            detail::trim(assignment.substr(eq + 1)));
}

// Initial state grammar: "g,<k>" / "e,<k>" for basis states, "thermal"
// for the thermal field with the atom in its ground state.
inline DensityMatrix make_initial_state(const TruncatedSpace& space,
                                        const RunConfig& cfg) {
    const std::string& spec = cfg.initial_state;
    if (spec == "thermal")
        return DensityMatrix::thermal_field_atom_ground(space, cfg.params.n_t);
    const auto comma = spec.find(',');
    if (comma != std::string::npos) {
        const std::string atom = detail::trim(spec.substr(0, comma));
        const std::string fock = detail::trim(spec.substr(comma + 1));
        if (atom == "g" || atom == "e") {
            const int k = detail::parse_int("run.initial_state", fock);
            if (k < 0 || k > space.n_max())
                throw ConfigError("initial Fock index " + fock +
                                  " outside the truncated space");
            return DensityMatrix::pure(space, atom == "e" ? 1 : 0, k);
        }
    }
    throw ConfigError("bad initial_state '" + spec +
                      "' (want g,<k> / e,<k> / thermal)");
}

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("OPEN_RABI_WORKERS")) {
        const std::string v(env);
        if (!v.empty()) {
            const int n = detail::parse_int("OPEN_RABI_WORKERS", v);
            if (n < 1) throw ConfigError("OPEN_RABI_WORKERS must be >= 1");
            return n;
        }
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

}  // namespace openrabi
