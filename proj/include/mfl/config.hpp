#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfl/grid.hpp"

namespace mfl {

// Line-oriented config: "section.key = value", '#' comments, blank lines ok.
// parse() collects every violation (with line numbers) instead of stopping at
// the first; validate() runs the pre-flight guards.
struct ExperimentConfig {
    std::string kind;  // hartree | nls | pair | manybody | fock | rate | sweep | fit
    long seed = 1;

    int grid_dim = 1;
    int grid_M = 256;
    double grid_L = 16.0;

    std::string potential_kind = "bump";  // bump | zero
    double pot_amplitude = 1.0;
    double pot_radius = 1.0;
    int pot_sign = -1;  // attractive

    std::vector<int> N_list = {16};
    double beta = 0.0;

    double dt = 1e-3;
    double t_end = 1.0;
    int record_every = 10;
    double residual_tol = 1e-5;
    double leak_tol = 1e-6;
    long memory_cap_mb = 1024;
    int workers = 2;

    std::string initial_kind = "gaussian";  // gaussian | sech | constant
    double init_width = 1.0;
    double init_amplitude = 1.0;
    double init_momentum = 0.0;
    bool init_normalize = false;

    double pickl_lambda = 0.9;

    std::optional<double> fit_t0, fit_t1;
    std::string fit_points;  // CSV path for kind = fit

    std::vector<double> fock_t_samples = {0.2, 0.6, 1.0};
    double nls_coupling = 0.0;  // kind = nls with explicit coupling; 0 -> integral of v
    bool use_profile_coupling = true;

    std::string sweep_kind = "manybody";
    std::string output_dir = "out";

    std::map<std::string, std::string> resolved;  // every key as parsed, for report embedding
};

struct ConfigError {
    int line;  // 0 when not tied to a line
    std::string message;
};

// parse text; on success returns config, else fills errors
std::optional<ExperimentConfig> parse_config(const std::string& text, std::vector<ConfigError>& errors);

// apply a --set key=value override
bool apply_override(ExperimentConfig& cfg, const std::string& keyval, std::string& error);

// pre-flight guards (memory, resolution, ranges); throws GuardError on violation
void validate_config(const ExperimentConfig& cfg);

}  // namespace mfl
