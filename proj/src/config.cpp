#include "mfl/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfl/manybody.hpp"
#include "mfl/potential.hpp"

namespace mfl {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

bool to_long(const std::string& s, long& out) {
    try {
        std::size_t pos;
        out = std::stol(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool to_double(const std::string& s, double& out) {
    if (s == "inf") {
        out = std::numeric_limits<double>::infinity();
        return true;
    }
    try {
        std::size_t pos;
        out = std::stod(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

bool to_bool(const std::string& s, bool& out) {
    if (s == "true" || s == "1") {
        out = true;
        return true;
    }
    if (s == "false" || s == "0") {
        out = false;
        return true;
    }
    return false;
}

template <class T>
bool to_list(const std::string& s, std::vector<T>& out, bool (*conv)(const std::string&, T&)) {
    out.clear();
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        T v;
        if (!conv(trim(item), v)) return false;
        out.push_back(v);
    }
    return !out.empty();
}

bool to_int_list(const std::string& s, std::vector<int>& out) {
    std::vector<long> tmp;
    if (!to_list<long>(s, tmp, to_long)) return false;
    out.assign(tmp.begin(), tmp.end());
    return true;
}

struct Setter {
    // returns empty string on success, error text otherwise
    std::function<std::string(ExperimentConfig&, const std::string&)> fn;
};

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto str = [](std::string ExperimentConfig::* f, std::vector<std::string> allowed = {}) {
            return Setter{[f, allowed](ExperimentConfig& c, const std::string& v) -> std::string {
                if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end())
                    return "value '" + v + "' not allowed";
                c.*f = v;
                return "";
            }};
        };
        auto dbl = [](double ExperimentConfig::* f) {
            return Setter{[f](ExperimentConfig& c, const std::string& v) -> std::string {
                double d;
                if (!to_double(v, d)) return "expected a number";
                c.*f = d;
                return "";
            }};
        };
        auto integer = [](int ExperimentConfig::* f) {
            return Setter{[f](ExperimentConfig& c, const std::string& v) -> std::string {
                long d;
                if (!to_long(v, d)) return "expected an integer";
                c.*f = (int)d;
                return "";
            }};
        };
        auto lng = [](long ExperimentConfig::* f) {
            return Setter{[f](ExperimentConfig& c, const std::string& v) -> std::string {
                long d;
                if (!to_long(v, d)) return "expected an integer";
                c.*f = d;
                return "";
            }};
        };
        auto boolean = [](bool ExperimentConfig::* f) {
            return Setter{[f](ExperimentConfig& c, const std::string& v) -> std::string {
                bool b;
                if (!to_bool(v, b)) return "expected true/false";
                c.*f = b;
                return "";
            }};
        };

        t["run.kind"] = str(&ExperimentConfig::kind,
                            {"hartree", "nls", "pair", "manybody", "fock", "rate", "sweep", "fit"});
        t["run.seed"] = lng(&ExperimentConfig::seed);
        t["grid.dim"] = integer(&ExperimentConfig::grid_dim);
        t["grid.M"] = integer(&ExperimentConfig::grid_M);
        t["grid.L"] = dbl(&ExperimentConfig::grid_L);
        t["potential.kind"] = str(&ExperimentConfig::potential_kind, {"bump", "zero"});
        t["potential.amplitude"] = dbl(&ExperimentConfig::pot_amplitude);
        t["potential.radius"] = dbl(&ExperimentConfig::pot_radius);
        t["potential.sign"] = Setter{[](ExperimentConfig& c, const std::string& v) -> std::string {
            if (v == "attractive") c.pot_sign = -1;
            else if (v == "repulsive") c.pot_sign = +1;
            else return "expected attractive|repulsive";
            return "";
        }};
        t["scaling.N"] = Setter{[](ExperimentConfig& c, const std::string& v) -> std::string {
            if (!to_int_list(v, c.N_list)) return "expected integer list";
            return "";
        }};
        t["scaling.beta"] = dbl(&ExperimentConfig::beta);
        t["solver.dt"] = dbl(&ExperimentConfig::dt);
        t["solver.t_end"] = dbl(&ExperimentConfig::t_end);
        t["solver.record_every"] = integer(&ExperimentConfig::record_every);
        t["solver.residual_tol"] = dbl(&ExperimentConfig::residual_tol);
        t["solver.leak_tol"] = dbl(&ExperimentConfig::leak_tol);
        t["solver.memory_cap_mb"] = lng(&ExperimentConfig::memory_cap_mb);
        t["solver.workers"] = integer(&ExperimentConfig::workers);
        t["initial.kind"] = str(&ExperimentConfig::initial_kind, {"gaussian", "sech", "constant"});
        t["initial.width"] = dbl(&ExperimentConfig::init_width);
        t["initial.amplitude"] = dbl(&ExperimentConfig::init_amplitude);
        t["initial.momentum"] = dbl(&ExperimentConfig::init_momentum);
        t["initial.normalize"] = boolean(&ExperimentConfig::init_normalize);
        t["pickl.lambda"] = dbl(&ExperimentConfig::pickl_lambda);
        t["fit.t0"] = Setter{[](ExperimentConfig& c, const std::string& v) -> std::string {
            double d;
            if (!to_double(v, d)) return "expected a number";
            c.fit_t0 = d;
            return "";
        }};
        t["fit.t1"] = Setter{[](ExperimentConfig& c, const std::string& v) -> std::string {
            double d;
            if (!to_double(v, d)) return "expected a number";
            c.fit_t1 = d;
            return "";
        }};
        t["fit.points"] = str(&ExperimentConfig::fit_points);
        t["fock.t_samples"] = Setter{[](ExperimentConfig& c, const std::string& v) -> std::string {
            if (!to_list<double>(v, c.fock_t_samples, to_double)) return "expected number list";
            return "";
        }};
        t["nls.coupling"] = Setter{[](ExperimentConfig& c, const std::string& v) -> std::string {
            double d;
            if (!to_double(v, d)) return "expected a number";
            c.nls_coupling = d;
            c.use_profile_coupling = false;
            return "";
        }};
        t["sweep.kind"] = str(&ExperimentConfig::sweep_kind,
                              {"hartree", "nls", "pair", "manybody", "fock"});
        t["output.dir"] = str(&ExperimentConfig::output_dir);
        return t;
    }();
    return table;
}

std::string set_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    auto it = setters().find(key);
    if (it == setters().end()) return "unknown key '" + key + "'";
    const std::string err = it->second.fn(cfg, value);
    if (err.empty()) cfg.resolved[key] = value;
    return err;
}

}  // namespace

std::optional<ExperimentConfig> parse_config(const std::string& text,
                                             std::vector<ConfigError>& errors) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back({lineno, "expected 'section.key = value'"});
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string err = set_key(cfg, key, value);
        if (!err.empty()) errors.push_back({lineno, key + ": " + err});
    }
    if (cfg.kind.empty()) errors.push_back({0, "run.kind is required"});
    // range guards that don't need heavy machinery
    if (cfg.beta < 0.0 || cfg.beta > 1.0)
        errors.push_back({0, "scaling.beta out of [0,1]"});
    if (cfg.pickl_lambda <= 0.0 || cfg.pickl_lambda > 1.0)
        errors.push_back({0, "pickl.lambda out of (0,1]"});
    if (cfg.dt <= 0.0) errors.push_back({0, "solver.dt must be positive"});
    if (errors.empty()) return cfg;
    return std::nullopt;
}

bool apply_override(ExperimentConfig& cfg, const std::string& keyval, std::string& error) {
    const auto eq = keyval.find('=');
    if (eq == std::string::npos) {
        error = "override must be key=value";
        return false;
    }
    const std::string err = set_key(cfg, trim(keyval.substr(0, eq)), trim(keyval.substr(eq + 1)));
    if (!err.empty()) {
        error = err;
        return false;
    }
    return true;
}

void validate_config(const ExperimentConfig& cfg) {
    Grid g(cfg.grid_dim, cfg.grid_M, cfg.grid_L);  // throws invalid_argument on bad grid
    if (cfg.kind == "manybody" || cfg.kind == "rate" ||
        (cfg.kind == "sweep" && cfg.sweep_kind == "manybody")) {
        if (g.dim != 1) throw GuardError("manybody: grid must be 1D");
        for (int N : cfg.N_list) {
            if (N < 2 || N > 5) throw GuardError("manybody: N must be in [2,5]");
            const std::int64_t bytes = mb_bytes(g, N);
            if (bytes > cfg.memory_cap_mb * (std::int64_t)(1 << 20))
                throw GuardError("memory guard: 16*M^N = " + std::to_string(bytes) +
                                 " bytes exceeds cap " +
                                 std::to_string(cfg.memory_cap_mb * (std::int64_t)(1 << 20)));
        }
    }
    if (cfg.potential_kind == "bump" && cfg.kind != "fit") {
        BumpProfile p{cfg.pot_amplitude, cfg.pot_radius, cfg.pot_sign};
        const int min_pts = (cfg.kind == "fock") ? 4 : 8;
        for (int N : cfg.N_list) {
            try {
                (void)sample_scaled(p, N, cfg.beta, g, min_pts);
            } catch (const std::invalid_argument& e) {
                throw GuardError(e.what());
            }
        }
    }
    if (cfg.N_list.empty()) throw GuardError("empty sweep axis: scaling.N list is empty");
}

}  // namespace mfl
