#pragma once

#include <cstdint>
#include <string>

#include "reach/curriculum.hpp"
#include "reach/dataset.hpp"
#include "reach/robot.hpp"

namespace reach {

struct EvalConfig {
    int trials = 1000;
    int repeats = 5;
    int envchange_trials = 500;
    bool parallel = true;  ///< run repeats concurrently
};

/// Everything a curriculum run depends on. Unspecified keys keep these defaults.
struct ExperimentConfig {
    std::uint64_t seed = 1;
    KinematicModel robot;
    BabbleConfig babble;
    CurriculumConfig curriculum;
    EvalConfig eval;
};

/// Canonical JSON text: fixed key order, every field present.
std::string dump_config(const ExperimentConfig& config);

/// Parses JSON text over the defaults. Unknown keys are rejected so typos
/// do not silently fall back to defaults.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& config);

/// Digest of the canonical dump.
std::string config_digest(const ExperimentConfig& config);
std::string robot_digest(const KinematicModel& robot);

} // namespace reach
