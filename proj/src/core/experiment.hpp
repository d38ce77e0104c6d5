#pragma once

#include <string>

#include "config.hpp"
#include "imaging.hpp"
#include "multilevel.hpp"

namespace flexbc {

struct CommandResult {
    int exit_code = 0;
    std::string report; // JSON
};

/// Exit codes: 0 success, 1 validation/equivalence failure, 2 configuration
/// or shape error, 3 numerical abort or step-bound violation.
constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_config_error = 2;
constexpr int exit_numerical_error = 3;

CommandResult cmd_run(const ExperimentConfig& cfg, bool quiet = false);
CommandResult cmd_compare(const ExperimentConfig& cfg, bool quiet = false);
CommandResult cmd_degrade(const ExperimentConfig& cfg, bool quiet = false);
CommandResult cmd_validate(const ExperimentConfig& cfg, bool quiet = false);
CommandResult cmd_equivalence(const ExperimentConfig& cfg, bool quiet = false);

/// Parses the config text and routes to the command; exceptions become exit
/// codes with the message in the report.
CommandResult dispatch(const std::string& subcommand, const std::string& config_json,
                       bool quiet = false);

} // namespace flexbc
