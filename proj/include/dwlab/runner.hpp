#pragma once

#include "dwlab/config.hpp"

#include <json.hpp>

#include <exception>
#include <filesystem>
#include <string>

namespace dwlab {

enum ExitCode : int { exit_pass = 0, exit_fail = 1, exit_validation = 2, exit_numeric = 3, exit_hypothesis = 4 };

struct RunOutcome {
  int exit_code = exit_pass;
  nlohmann::ordered_json report;
};

/// Runs the configured pipeline, writing report.json and the pipeline's CSV
/// artifacts under `out_dir`. Library errors propagate.
RunOutcome run_pipeline(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Exit code and error category for an exception escaping a run.
int exit_code_for(const std::exception& e);
nlohmann::ordered_json error_json(const std::exception& e);

}  // namespace dwlab
