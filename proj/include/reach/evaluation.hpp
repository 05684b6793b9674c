#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reach/config.hpp"
#include "reach/curriculum.hpp"

namespace reach {

/// Mean and sample standard deviation across repeats.
struct Summary {
    double mean = 0.0;
    double std = 0.0;
};

struct RepeatStats {
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    int successes = 0;
};

struct TrialRecord {
    int repeat = 0;
    int trial = 0;
    double error = 0.0;
    bool success = false;
    std::string reason;  ///< failure reason, "none" on success
};

/// Table-style statistics: computed per repeat, then aggregated across repeats.
struct EvalReport {
    std::string stage;
    std::string units;
    int trials = 0;
    int repeats = 0;
    std::uint64_t seed = 0;
    std::string config_digest;

    std::vector<RepeatStats> per_repeat;
    Summary median;
    Summary min;
    Summary max;
    Summary successes;
    double success_rate = 0.0;  ///< mean successes / trials
    std::vector<TrialRecord> log;

    /// Fraction of all logged trials whose error is strictly below `threshold`.
    double fraction_below(double threshold) const;
};

/// Models a stage evaluation may need. For eyehand and envchange, `arm` is
/// the arm model that belongs with `eyehand` (after transfer or adaptation).
struct ModelSet {
    std::optional<StageModel> gaze;
    std::optional<StageModel> arm;
    std::optional<StageModel> eyehand;
};

struct EvalOptions {
    int trials = 1000;
    int repeats = 5;
    std::uint64_t seed = 1;
    bool parallel = true;
    std::string config_digest;
};

/// Stages: gaze, arm, eyehand, envchange (eye-hand reaching with the
/// upper-arm rotation locked at zero). Targets depend only on the stage and
/// the seed, so two model sets evaluated with the same options see the same
/// targets. Throws InvalidArgument for missing models or trials < 1.
EvalReport eval_stage(const std::string& stage, const ModelSet& models, const KinematicModel& robot,
                      const CurriculumConfig& config, const EvalOptions& options);

struct AdaptationComparison {
    EvalReport original;
    EvalReport adapted;
    double verdict = 0.0;  ///< adapted minus original mean successes
};

/// Paired envchange evaluation of two eyehand/arm pairs. Throws
/// InvalidArgument when the bundles were built for different robots.
AdaptationComparison compare_adaptation(const ModelSet& original, const ModelSet& adapted,
                                        const KinematicModel& robot, const CurriculumConfig& config,
                                        const EvalOptions& options);

/// Summary CSV: one row per repeat, then "mean" and "std" rows.
void write_metrics_csv(std::ostream& out, const EvalReport& report);
void write_trials_csv(std::ostream& out, const EvalReport& report);
void write_comparison_csv(std::ostream& out, const AdaptationComparison& cmp);

/// Writes <dir>/<stage>_metrics.csv and <dir>/<stage>_trials.csv.
void write_report(const std::string& dir, const EvalReport& report);

/// Neuron weights of a map, one row per neuron, columns w0..w{d-1}.
void write_weights_csv(const std::string& path, const GwrNetwork& net);

/// Shortest round-trip decimal text of a double.
std::string format_number(double v);

struct CurriculumRun {
    std::map<std::string, EvalReport> reports;  ///< gaze, arm, eyehand
    AdaptationComparison adaptation;
};

/// Generates every dataset, trains every stage, adapts, evaluates and writes
/// data/, models/, metrics/ and config.json below `out_dir`. Progress lines go
/// to `log` when given.
CurriculumRun run_curriculum(const ExperimentConfig& config, const std::string& out_dir,
                             std::ostream* log = nullptr);

/// Seed for a named step of a run ("data/gaze", "train/arm", "eval/eyehand", ...).
std::uint64_t step_seed(const ExperimentConfig& config, const std::string& step);

} // namespace reach
