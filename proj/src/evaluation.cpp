#include "reach/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <numeric>
#include <ostream>
#include <random>

#include "reach/error.hpp"

namespace reach {

namespace fs = std::filesystem;

namespace {

// Pixel error charged when the target leaves the view or centering cannot
// recall a command: the largest distance from the image centre to a corner.
constexpr double kLostTargetPx = 50.0;
constexpr double kPixelMargin = 5.0;
constexpr double kMinDepth = 30.0;
constexpr double kMaxDepth = 70.0;

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Summary summarize(const std::vector<double>& v) {
    Summary s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

const StageModel& require(const std::optional<StageModel>& m, const char* what) {
    if (!m) throw InvalidArgument(std::string("missing model: ") + what);
    return *m;
}

TrialRecord gaze_trial(const StageModel& gaze, const KinematicModel& robot, const CurriculumConfig& config,
                       std::mt19937_64& rng) {
    RobotState state;
    Target target;
    for (;;) {
        state.head = {uniform(rng, robot.head_limits[0].min, robot.head_limits[0].max),
                      uniform(rng, robot.head_limits[1].min, robot.head_limits[1].max)};
        const double u = uniform(rng, kPixelMargin, robot.image_width - kPixelMargin);
        const double v = uniform(rng, kPixelMargin, robot.image_height - kPixelMargin);
        const double depth = uniform(rng, kMinDepth, kMaxDepth);
        const Eigen::Vector3d ray(1.0, (robot.principal_u - u) / robot.focal_px, (robot.principal_v - v) / robot.focal_px);
        target = {camera_pose(robot, state.head) * (ray * depth), robot.ball_radius};
        if (perceive_target(robot, state, target).visible()) break;
    }

    TrialRecord rec;
    try {
        const auto res = gaze_control(gaze, robot, state, target, config);
        rec.error = res.centroid ? res.pixel_error : kLostTargetPx;
        rec.success = res.centered;
        rec.reason = res.centered ? "none" : (res.centroid ? "not-centered" : "lost");
    } catch (const NoAssociationError&) {
        rec.error = kLostTargetPx;
        rec.reason = "no-association";
    }
    return rec;
}

TrialRecord arm_trial(const StageModel& arm, const KinematicModel& robot, const CurriculumConfig& config,
                      std::mt19937_64& rng) {
    const RobotState rest;
    const Eigen::Vector3d target = forward_kinematics(robot, random_arm_pose(robot, rest, rng));
    RobotState state = rest;
    TrialRecord rec;
    rec.reason = "none";
    try {
        state = apply_motor(robot, rest, JointGroup::Arm, recall_arm(arm, target), CommandMode::Absolute).state;
    } catch (const NoAssociationError&) {
        rec.reason = "no-association";
    }
    rec.error = (forward_kinematics(robot, state.arm) - target).norm();
    rec.success = rec.error <= config.success_tolerance_cm;
    if (!rec.success && rec.reason == "none") rec.reason = "out-of-tolerance";
    return rec;
}

/// Grasp points of random unlocked poses that the head can centre.
Target reach_target(const KinematicModel& robot, std::mt19937_64& rng) {
    const RobotState free;
    for (;;) {
        const Eigen::Vector3d p = grasp_point(robot, random_arm_pose(robot, free, rng));
        if (centering_head_angles(robot, p)) return {p, robot.ball_radius};
    }
}

TrialRecord reach_trial(const ModelSet& models, const KinematicModel& robot, const CurriculumConfig& config,
                        bool locked, std::mt19937_64& rng) {
    const Target target = reach_target(robot, rng);
    RobotState start;
    if (locked) start.lock_arm_joint(kUpperArmRotation, 0.0);
    const auto out = reach(*models.gaze, *models.eyehand, *models.arm, robot, start, target, config);
    TrialRecord rec;
    rec.error = out.error_cm;
    rec.success = out.success;
    rec.reason = out.success ? "none" : (out.reason == ReachFailure::None ? "out-of-tolerance" : to_string(out.reason));
    return rec;
}

void write_row(std::ostream& out, std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
        if (!first) out << ',';
        out << c;
        first = false;
    }
    out << '\n';
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    return out;
}

} // namespace

double EvalReport::fraction_below(double threshold) const {
    if (log.empty()) return 0.0;
    const auto n = std::count_if(log.begin(), log.end(), [&](const TrialRecord& r) { return r.error < threshold; });
    return static_cast<double>(n) / static_cast<double>(log.size());
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::uint64_t step_seed(const ExperimentConfig& config, const std::string& step) { return derive_seed(config.seed, step); }

EvalReport eval_stage(const std::string& stage, const ModelSet& models, const KinematicModel& robot,
                      const CurriculumConfig& config, const EvalOptions& options) {
    if (options.trials < 1 || options.repeats < 1) throw InvalidArgument("trials and repeats must be >= 1");

    std::function<TrialRecord(std::mt19937_64&)> trial;
    std::string units = "cm";
    if (stage == "gaze") {
        const StageModel* gaze = &require(models.gaze, "gaze");
        trial = [&, gaze](std::mt19937_64& rng) { return gaze_trial(*gaze, robot, config, rng); };
        units = "px";
    } else if (stage == "arm") {
        const StageModel* arm = &require(models.arm, "arm");
        trial = [&, arm](std::mt19937_64& rng) { return arm_trial(*arm, robot, config, rng); };
    } else if (stage == "eyehand" || stage == "envchange") {
        require(models.gaze, "gaze");
        require(models.eyehand, "eyehand");
        require(models.arm, "arm");
        const bool locked = stage == "envchange";
        trial = [&, locked](std::mt19937_64& rng) { return reach_trial(models, robot, config, locked, rng); };
    } else {
        throw InvalidArgument("unknown evaluation stage '" + stage + "'");
    }

    const auto run_repeat = [&](int r) {
        std::mt19937_64 rng(derive_seed(options.seed, stage + "/" + std::to_string(r)));
        std::vector<TrialRecord> recs;
        recs.reserve(static_cast<std::size_t>(options.trials));
        for (int t = 0; t < options.trials; ++t) {
            auto rec = trial(rng);
            rec.repeat = r;
            rec.trial = t;
            recs.push_back(std::move(rec));
        }
        return recs;
    };

    std::vector<std::vector<TrialRecord>> results;
    if (options.parallel && options.repeats > 1) {
        std::vector<std::future<std::vector<TrialRecord>>> jobs;
        for (int r = 0; r < options.repeats; ++r) jobs.push_back(std::async(std::launch::async, run_repeat, r));
        for (auto& j : jobs) results.push_back(j.get());
    } else {
        for (int r = 0; r < options.repeats; ++r) results.push_back(run_repeat(r));
    }

    EvalReport report;
    report.stage = stage;
    report.units = units;
    report.trials = options.trials;
    report.repeats = options.repeats;
    report.seed = options.seed;
    report.config_digest = options.config_digest;

    std::vector<double> medians, mins, maxs, successes;
    for (auto& recs : results) {
        std::vector<double> errors;
        RepeatStats s;
        for (const auto& rec : recs) {
            errors.push_back(rec.error);
            s.successes += rec.success ? 1 : 0;
        }
        s.median = median_of(errors);
        s.min = *std::min_element(errors.begin(), errors.end());
        s.max = *std::max_element(errors.begin(), errors.end());
        report.per_repeat.push_back(s);
        medians.push_back(s.median);
        mins.push_back(s.min);
        maxs.push_back(s.max);
        successes.push_back(s.successes);
        report.log.insert(report.log.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
    }
    report.median = summarize(medians);
    report.min = summarize(mins);
    report.max = summarize(maxs);
    report.successes = summarize(successes);
    report.success_rate = report.successes.mean / options.trials;
    return report;
}

AdaptationComparison compare_adaptation(const ModelSet& original, const ModelSet& adapted,
                                        const KinematicModel& robot, const CurriculumConfig& config,
                                        const EvalOptions& options) {
    const auto& a = require(original.eyehand, "original eyehand");
    const auto& b = require(adapted.eyehand, "adapted eyehand");
    if (a.provenance.robot_digest != b.provenance.robot_digest)
        throw InvalidArgument("bundles were built for different robot configurations");

    ModelSet adapted_set = adapted;
    if (!adapted_set.gaze) adapted_set.gaze = original.gaze;

    AdaptationComparison cmp;
    cmp.original = eval_stage("envchange", original, robot, config, options);
    cmp.adapted = eval_stage("envchange", adapted_set, robot, config, options);
    cmp.original.stage = "envchange-original";
    cmp.adapted.stage = "envchange-adapted";
    cmp.verdict = cmp.adapted.successes.mean - cmp.original.successes.mean;
    return cmp;
}

void write_metrics_csv(std::ostream& out, const EvalReport& r) {
    write_row(out, {"stage", "units", "repeat", "trials", "median", "min", "max", "successes", "success_rate",
                    "config_digest"});
    const auto n = std::to_string(r.trials);
    for (std::size_t i = 0; i < r.per_repeat.size(); ++i) {
        const auto& s = r.per_repeat[i];
        write_row(out, {r.stage, r.units, std::to_string(i), n, format_number(s.median), format_number(s.min),
                        format_number(s.max), std::to_string(s.successes),
                        format_number(static_cast<double>(s.successes) / r.trials), r.config_digest});
    }
    write_row(out, {r.stage, r.units, "mean", n, format_number(r.median.mean), format_number(r.min.mean),
                    format_number(r.max.mean), format_number(r.successes.mean), format_number(r.success_rate),
                    r.config_digest});
    write_row(out, {r.stage, r.units, "std", n, format_number(r.median.std), format_number(r.min.std),
                    format_number(r.max.std), format_number(r.successes.std),
                    format_number(r.successes.std / r.trials), r.config_digest});
}

void write_trials_csv(std::ostream& out, const EvalReport& r) {
    write_row(out, {"repeat", "trial", "error", "success", "reason"});
    for (const auto& t : r.log)
        write_row(out, {std::to_string(t.repeat), std::to_string(t.trial), format_number(t.error),
                        t.success ? "1" : "0", t.reason});
}

void write_comparison_csv(std::ostream& out, const AdaptationComparison& cmp) {
    write_row(out, {"repeat", "original_successes", "adapted_successes", "difference", "original_median",
                    "adapted_median"});
    for (std::size_t i = 0; i < cmp.original.per_repeat.size(); ++i) {
        const auto& o = cmp.original.per_repeat[i];
        const auto& a = cmp.adapted.per_repeat[i];
        write_row(out, {std::to_string(i), std::to_string(o.successes), std::to_string(a.successes),
                        std::to_string(a.successes - o.successes), format_number(o.median),
                        format_number(a.median)});
    }
    write_row(out, {"mean", format_number(cmp.original.successes.mean), format_number(cmp.adapted.successes.mean),
                    format_number(cmp.verdict), format_number(cmp.original.median.mean),
                    format_number(cmp.adapted.median.mean)});
}

void write_report(const std::string& dir, const EvalReport& report) {
    fs::create_directories(dir);
    auto m = open_out(fs::path(dir) / (report.stage + "_metrics.csv"));
    write_metrics_csv(m, report);
    auto t = open_out(fs::path(dir) / (report.stage + "_trials.csv"));
    write_trials_csv(t, report);
}

void write_weights_csv(const std::string& path, const GwrNetwork& net) {
    auto out = open_out(path);
    for (int k = 0; k < net.dim(); ++k) out << (k ? ",w" : "w") << k;
    out << '\n';
    for (int i = 0; i < net.size(); ++i) {
        const auto w = net.weight(i);
        for (std::size_t k = 0; k < w.size(); ++k) out << (k ? "," : "") << format_number(w[k]);
        out << '\n';
    }
}

CurriculumRun run_curriculum(const ExperimentConfig& config, const std::string& out_dir, std::ostream* log) {
    const auto say = [&](const std::string& msg) {
        if (log) *log << msg << std::endl;
    };
    const fs::path root(out_dir);
    const fs::path data = root / "data";
    const fs::path models = root / "models";
    const fs::path metrics = root / "metrics";
    fs::create_directories(data);
    fs::create_directories(metrics);
    save_config((root / "config.json").string(), config);

    const std::string cdigest = config_digest(config);
    const std::string rdigest = robot_digest(config.robot);
    const auto stamp = [&](StageModel& m) {
        m.provenance.config_digest = cdigest;
        m.provenance.robot_digest = rdigest;
    };
    const auto& robot = config.robot;
    const auto& cur = config.curriculum;

    say("gaze: generating data");
    const auto gaze_data = gen_gaze_dataset(robot, config.babble, step_seed(config, "data/gaze"));
    write_dataset((data / "gaze.txt").string(), to_dataset(gaze_data.samples));
    say("gaze: training on " + std::to_string(gaze_data.samples.size()) + " samples");
    StageModel gaze = train_gaze(gaze_data.samples, cur, step_seed(config, "train/gaze"));
    stamp(gaze);
    gaze.save((models / "gaze").string());

    say("arm: generating data");
    const auto arm_data = gen_arm_dataset(robot, config.babble, step_seed(config, "data/arm"));
    write_dataset((data / "arm.txt").string(), to_dataset(arm_data));
    say("arm: training on " + std::to_string(arm_data.size()) + " samples");
    StageModel arm = train_arm(arm_data, cur, step_seed(config, "train/arm"));
    stamp(arm);
    arm.save((models / "arm").string());

    say("eyehand: generating data");
    const LearnedGazeController controller(gaze);
    const auto eh_data = gen_eyehand_dataset(robot, config.babble, controller, step_seed(config, "data/eyehand"));
    write_dataset((data / "eyehand.txt").string(), to_dataset(eh_data.triplets));
    say("eyehand: training on " + std::to_string(eh_data.triplets.size()) + " triplets");
    EyeHandModels eh = train_eyehand(eh_data.triplets, arm, arm_data, cur, step_seed(config, "train/eyehand"));
    stamp(eh.arm);
    stamp(eh.eyehand);
    eh.arm.save((models / "eyehand").string());
    eh.eyehand.save((models / "eyehand").string());

    say("envchange: generating data");
    BabbleConfig env_babble = config.babble;
    env_babble.iterations = kEnvChangeIterations;
    const auto env_data = gen_envchange_dataset(robot, env_babble, controller, step_seed(config, "data/envchange"));
    write_dataset((data / "envchange.txt").string(), to_dataset(env_data.triplets, "envchange"));
    say("envchange: adapting on " + std::to_string(env_data.triplets.size()) + " triplets");
    EyeHandModels adapted = adapt(eh.eyehand, eh.arm, env_data.triplets, arm_data, cur, step_seed(config, "adapt"));
    adapted.arm.save((models / "adapted").string());
    adapted.eyehand.save((models / "adapted").string());

    for (const auto& [name, net] : {std::pair{"gaze_sensory", &gaze.sensory}, {"gaze_motor", &gaze.motor},
                                    {"arm_sensory", &arm.sensory}, {"arm_motor", &arm.motor},
                                    {"head_motor", &eh.eyehand.motor}})
        write_weights_csv((metrics / (std::string("weights_") + name + ".csv")).string(), *net);

    EvalOptions opts{config.eval.trials, config.eval.repeats, 0, config.eval.parallel, cdigest};
    CurriculumRun run;
    for (const char* stage : {"gaze", "arm", "eyehand"}) {
        say(std::string("eval: ") + stage);
        opts.seed = step_seed(config, std::string("eval/") + stage);
        const ModelSet set = std::string(stage) == "arm" ? ModelSet{std::nullopt, arm, std::nullopt}
                                                         : ModelSet{gaze, eh.arm, eh.eyehand};
        auto report = eval_stage(stage, set, robot, cur, opts);
        write_report(metrics.string(), report);
        run.reports.emplace(stage, std::move(report));
    }

    say("eval: envchange");
    opts.trials = config.eval.envchange_trials;
    opts.seed = step_seed(config, "eval/envchange");
    run.adaptation = compare_adaptation(ModelSet{gaze, eh.arm, eh.eyehand}, ModelSet{gaze, adapted.arm, adapted.eyehand},
                                        robot, cur, opts);
    write_report(metrics.string(), run.adaptation.original);
    write_report(metrics.string(), run.adaptation.adapted);
    auto out = open_out(metrics / "adaptation.csv");
    write_comparison_csv(out, run.adaptation);
    return run;
}

} // namespace reach
