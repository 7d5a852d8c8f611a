#pragma once

#include <string>
#include <vector>

#include "pathlab/csvio.hpp"

namespace pathlab {

struct ExperimentResult {
    int exit_code = 0;       // 0 ok, 2 config error, 3 tolerance violation, 4 numeric failure
    std::string message;     // single-line reason when exit_code != 0
    std::string artifact;    // path of the written table
    std::string manifest;    // path of the sidecar manifest
};

/// Runs the named experiment: resolves parameters against the experiment's
/// schema (unknown keys rejected, seed mandatory for stochastic runs),
/// writes the table in the requested format plus a JSON manifest with the
/// fully resolved configuration, and reports tolerance violations through
/// the exit code when strict mode is on.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::vector<std::string> experiment_names();
bool experiment_is_stochastic(const std::string& name);
std::string experiment_description(const std::string& name);

} // namespace pathlab
