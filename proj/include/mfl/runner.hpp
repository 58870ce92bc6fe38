#pragma once

#include <string>

#include "mfl/config.hpp"
#include "mfl/field.hpp"

namespace mfl {

// Build the initial field described by the config on the given grid.
Field initial_field(const ExperimentConfig& cfg, const Grid& g);

// Execute the experiment, write CSV/JSON/checkpoint artifacts under
// cfg.output_dir (atomically), and return the JSON summary text.
std::string run_experiment(const ExperimentConfig& cfg);

}  // namespace mfl
