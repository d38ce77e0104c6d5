#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "schedule.hpp"
#include "solver.hpp"
#include "wavelet.hpp"

namespace flexbc {

struct ScheduleConfig {
    std::string kind = "flex"; // full|cyclic|reshuffled|flex|alternating|two_level|random_single|vscheme
    Index m = 8;
    std::vector<Index> perm;          // cyclic only; empty = identity
    std::optional<std::uint64_t> seed; // defaults to the experiment seed
};

struct StepConfig {
    std::string mode = "nonconvex"; // nonconvex|convex_g
    double safety = 0.99;
    std::optional<double> fixed_tau;
    bool acknowledge_bound_violation = false;
};

struct VariantConfig {
    std::string name;
    ScheduleConfig schedule;
    std::optional<StepConfig> step; // defaults to the base step config
};

struct EquivalenceConfig {
    Index steps = 50;
    Index m = 1;
    double tol = 1e-10;
    std::optional<double> tau; // defaults to 0.99 / beta(all-ones)
    bool fast_path = false;
};

struct ExperimentConfig {
    std::string image = "phantom";
    Index side = 64;
    Index blur_taps = 9;
    double blur_std = 7.0;
    std::string boundary = "periodic"; // periodic|symmetric
    double noise_sigma = 0.01;
    std::uint64_t seed = 1234;
    double lambda_a = 1e-10;
    double lambda_d = 1e-4;
    double eps_logsum = 1e-2;
    Index levels = 2;
    std::string grouping = "per_orientation"; // per_orientation|single_detail
    ScheduleConfig schedule;
    StepConfig step;
    Index cycles = 200;
    double tol_displacement = 1e-9;
    bool record_residual = false;
    bool allow_uncertified = false;
    std::string out_dir = "out";
    std::vector<VariantConfig> variants;
    EquivalenceConfig equivalence;
};

/// Parses and validates a JSON config; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);

/// Full resolved configuration (defaults filled in) as JSON; loading it
/// reproduces the identical run.
std::string resolved_config_json(const ExperimentConfig& cfg);

/// Applies a dotted-key override ("schedule.m=5") to a JSON document before
/// parsing; values parse as JSON when possible, else as strings.
std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& overrides);

Schedule make_schedule(const ScheduleConfig& sc, Index blocks, std::uint64_t default_seed);
StepPolicy make_step_policy(const StepConfig& sc);
DetailGrouping parse_grouping(const std::string& grouping);

} // namespace flexbc
