// Command-line front end: data generation, training, evaluation, adaptation and plots.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "reach/config.hpp"
#include "reach/curriculum.hpp"
#include "reach/error.hpp"
#include "reach/evaluation.hpp"
#include "reach/plot.hpp"

namespace fs = std::filesystem;
using namespace reach;

namespace {

class MissingModel : public Error {
public:
    using Error::Error;
};

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string models = "models";

    ExperimentConfig config() const {
        ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        if (seed) c.seed = *seed;
        return c;
    }
};

void add_common(CLI::App* cmd, Common& common, bool models = true) {
    cmd->add_option("--config", common.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    cmd->add_option("--seed", common.seed, "base seed, overrides the config");
    if (models) cmd->add_option("--models", common.models, "model directory")->capture_default_str();
}

StageModel load_stage(const std::string& models, const std::string& bundle, Stage stage) {
    const auto dir = (fs::path(models) / bundle).string();
    if (!StageModel::exists(dir, stage))
        throw MissingModel("no " + to_string(stage) + " model in " + dir + "; run train first");
    return StageModel::load(dir, stage);
}

void stamp(StageModel& m, const ExperimentConfig& c) {
    m.provenance.config_digest = config_digest(c);
    m.provenance.robot_digest = robot_digest(c.robot);
}

std::vector<GazeSample> gaze_data(const std::string& path, const ExperimentConfig& c) {
    if (!path.empty()) return gaze_samples(read_dataset(path));
    return gen_gaze_dataset(c.robot, c.babble, step_seed(c, "data/gaze")).samples;
}

std::vector<ArmSample> arm_data(const std::string& path, const ExperimentConfig& c) {
    if (!path.empty()) return arm_samples(read_dataset(path));
    return gen_arm_dataset(c.robot, c.babble, step_seed(c, "data/arm"));
}

std::vector<EyeHandTriplet> triplet_data(const std::string& path, const ExperimentConfig& c, const StageModel& gaze,
                                         bool envchange) {
    if (!path.empty()) return eyehand_triplets(read_dataset(path));
    const LearnedGazeController controller(gaze);
    if (!envchange) return gen_eyehand_dataset(c.robot, c.babble, controller, step_seed(c, "data/eyehand")).triplets;
    BabbleConfig b = c.babble;
    b.iterations = kEnvChangeIterations;
    return gen_envchange_dataset(c.robot, b, controller, step_seed(c, "data/envchange")).triplets;
}

void print_report(const EvalReport& r) {
    std::cout << r.stage << ": median " << format_number(r.median.mean) << " (+-" << format_number(r.median.std)
              << ") " << r.units << ", min " << format_number(r.min.mean) << ", max " << format_number(r.max.mean)
              << ", successes " << format_number(r.successes.mean) << "/" << r.trials << " over " << r.repeats
              << " repeats\n";
}

int fail(const std::string& kind, const std::string& detail) {
    nlohmann::json j{{"error", kind}, {"detail", detail}};
    std::cerr << j.dump() << '\n';
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Developmental reaching: babbling, GWR training, evaluation"};
    app.require_subcommand(1);

    // gen-data
    Common gen;
    std::string gen_stage, gen_out;
    auto* gen_cmd = app.add_subcommand("gen-data", "generate a babbling dataset");
    add_common(gen_cmd, gen);
    gen_cmd->add_option("--stage", gen_stage)->required()->check(CLI::IsMember({"gaze", "arm", "eyehand", "envchange"}));
    gen_cmd->add_option("--out", gen_out, "dataset file")->required();

    // train
    Common train;
    std::string train_stage, train_data_path, train_arm_data;
    auto* train_cmd = app.add_subcommand("train", "train one curriculum stage");
    add_common(train_cmd, train);
    train_cmd->add_option("--stage", train_stage)->required()->check(CLI::IsMember({"gaze", "arm", "eyehand"}));
    train_cmd->add_option("--data", train_data_path, "dataset file; generated from the seed when omitted");
    train_cmd->add_option("--arm-data", train_arm_data, "arm dataset retained for the eyehand stage");

    // adapt
    Common adapt_opts;
    std::string adapt_data, adapt_arm_data;
    auto* adapt_cmd = app.add_subcommand("adapt", "adapt the eyehand models to the locked-joint robot");
    add_common(adapt_cmd, adapt_opts);
    adapt_cmd->add_option("--data", adapt_data, "envchange dataset; generated when omitted");
    adapt_cmd->add_option("--arm-data", adapt_arm_data, "original arm dataset");

    // eval
    Common eval;
    std::string eval_stage_name, eval_out = "metrics", eval_bundle = "eyehand";
    std::optional<int> eval_trials, eval_repeats;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a trained stage");
    add_common(eval_cmd, eval);
    eval_cmd->add_option("--stage", eval_stage_name)
        ->required()
        ->check(CLI::IsMember({"gaze", "arm", "eyehand", "envchange"}));
    eval_cmd->add_option("--out", eval_out, "metrics directory")->capture_default_str();
    eval_cmd->add_option("--bundle", eval_bundle, "eyehand bundle for eyehand/envchange")
        ->check(CLI::IsMember({"eyehand", "adapted"}))
        ->capture_default_str();
    eval_cmd->add_option("--trials", eval_trials)->check(CLI::PositiveNumber);
    eval_cmd->add_option("--repeats", eval_repeats)->check(CLI::PositiveNumber);

    // compare
    Common cmp;
    std::string cmp_out = "metrics";
    std::optional<int> cmp_trials, cmp_repeats;
    auto* cmp_cmd = app.add_subcommand("compare", "paired original vs adapted evaluation on the locked robot");
    add_common(cmp_cmd, cmp);
    cmp_cmd->add_option("--out", cmp_out, "metrics directory")->capture_default_str();
    cmp_cmd->add_option("--trials", cmp_trials)->check(CLI::PositiveNumber);
    cmp_cmd->add_option("--repeats", cmp_repeats)->check(CLI::PositiveNumber);

    // plot
    std::string plot_in, plot_out, plot_kind = "hist", plot_column = "error", plot_x = "w0", plot_y = "w1",
                                   plot_title;
    int plot_bins = 40;
    auto* plot_cmd = app.add_subcommand("plot", "render an SVG from a metrics or weights CSV");
    plot_cmd->add_option("--input", plot_in)->required()->check(CLI::ExistingFile);
    plot_cmd->add_option("--out", plot_out)->required();
    plot_cmd->add_option("--kind", plot_kind)->check(CLI::IsMember({"hist", "scatter"}))->capture_default_str();
    plot_cmd->add_option("--column", plot_column, "histogram column")->capture_default_str();
    plot_cmd->add_option("--x", plot_x, "scatter x column")->capture_default_str();
    plot_cmd->add_option("--y", plot_y, "scatter y column")->capture_default_str();
    plot_cmd->add_option("--bins", plot_bins)->check(CLI::PositiveNumber)->capture_default_str();
    plot_cmd->add_option("--title", plot_title);

    // run-all
    Common run;
    std::string run_out = "run";
    auto* run_cmd = app.add_subcommand("run-all", "full curriculum: data, training, adaptation, evaluation");
    add_common(run_cmd, run, false);
    run_cmd->add_option("--out", run_out, "output directory")->capture_default_str();

    // config
    Common show;
    auto* show_cmd = app.add_subcommand("config", "print the effective config as JSON");
    add_common(show_cmd, show, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*show_cmd) {
            std::cout << dump_config(show.config());
        } else if (*gen_cmd) {
            const auto c = gen.config();
            Dataset d;
            if (gen_stage == "gaze") {
                d = to_dataset(gaze_data("", c));
            } else if (gen_stage == "arm") {
                d = to_dataset(arm_data("", c));
            } else {
                const auto gaze = load_stage(gen.models, "gaze", Stage::Gaze);
                const bool env = gen_stage == "envchange";
                d = to_dataset(triplet_data("", c, gaze, env), gen_stage);
            }
            if (const auto parent = fs::path(gen_out).parent_path(); !parent.empty()) fs::create_directories(parent);
            write_dataset(gen_out, d);
            std::cout << "wrote " << d.rows.size() << " " << gen_stage << " records to " << gen_out << '\n';
        } else if (*train_cmd) {
            const auto c = train.config();
            const Stage stage = parse_stage(train_stage);
            const std::uint64_t seed = step_seed(c, "train/" + train_stage);
            if (stage == Stage::Gaze) {
                auto m = train_gaze(gaze_data(train_data_path, c), c.curriculum, seed);
                stamp(m, c);
                m.save((fs::path(train.models) / "gaze").string());
                std::cout << "gaze: " << m.sensory.size() << " sensory (" << m.connected_sensory() << " connected), "
                          << m.motor.size() << " motor (" << m.connected_motor() << " connected)\n";
            } else if (stage == Stage::Arm) {
                auto m = train_arm(arm_data(train_data_path, c), c.curriculum, seed);
                stamp(m, c);
                m.save((fs::path(train.models) / "arm").string());
                std::cout << "arm: " << m.sensory.size() << " sensory (" << m.connected_sensory() << " connected), "
                          << m.motor.size() << " motor (" << m.connected_motor() << " connected)\n";
            } else {
                const auto gaze = load_stage(train.models, "gaze", Stage::Gaze);
                const auto arm = load_stage(train.models, "arm", Stage::Arm);
                auto models = train_eyehand(triplet_data(train_data_path, c, gaze, false), arm,
                                            arm_data(train_arm_data, c), c.curriculum, seed);
                stamp(models.arm, c);
                stamp(models.eyehand, c);
                const auto dir = (fs::path(train.models) / "eyehand").string();
                models.arm.save(dir);
                models.eyehand.save(dir);
                std::cout << "eyehand: head map " << models.eyehand.motor.size() << " ("
                          << models.eyehand.connected_motor() << " connected), arm maps " << models.arm.sensory.size()
                          << "/" << models.arm.motor.size() << '\n';
            }
        } else if (*adapt_cmd) {
            const auto c = adapt_opts.config();
            const auto gaze = load_stage(adapt_opts.models, "gaze", Stage::Gaze);
            const auto eyehand = load_stage(adapt_opts.models, "eyehand", Stage::EyeHand);
            const auto arm = load_stage(adapt_opts.models, "eyehand", Stage::Arm);
            auto adapted = adapt(eyehand, arm, triplet_data(adapt_data, c, gaze, true), arm_data(adapt_arm_data, c),
                                 c.curriculum, step_seed(c, "adapt"));
            const auto dir = (fs::path(adapt_opts.models) / "adapted").string();
            adapted.arm.save(dir);
            adapted.eyehand.save(dir);
            std::cout << "adapted models written to " << dir << '\n';
        } else if (*eval_cmd) {
            const auto c = eval.config();
            ModelSet set;
            if (eval_stage_name == "arm") {
                set.arm = load_stage(eval.models, "arm", Stage::Arm);
            } else {
                set.gaze = load_stage(eval.models, "gaze", Stage::Gaze);
                if (eval_stage_name != "gaze") {
                    set.eyehand = load_stage(eval.models, eval_bundle, Stage::EyeHand);
                    set.arm = load_stage(eval.models, eval_bundle, Stage::Arm);
                }
            }
            const int default_trials = eval_stage_name == "envchange" ? c.eval.envchange_trials : c.eval.trials;
            const EvalOptions opts{eval_trials.value_or(default_trials), eval_repeats.value_or(c.eval.repeats),
                                   step_seed(c, "eval/" + eval_stage_name), c.eval.parallel, config_digest(c)};
            const auto report = eval_stage(eval_stage_name, set, c.robot, c.curriculum, opts);
            write_report(eval_out, report);
            print_report(report);
        } else if (*cmp_cmd) {
            const auto c = cmp.config();
            const auto gaze = load_stage(cmp.models, "gaze", Stage::Gaze);
            const ModelSet original{gaze, load_stage(cmp.models, "eyehand", Stage::Arm),
                                    load_stage(cmp.models, "eyehand", Stage::EyeHand)};
            const ModelSet adapted{gaze, load_stage(cmp.models, "adapted", Stage::Arm),
                                   load_stage(cmp.models, "adapted", Stage::EyeHand)};
            const EvalOptions opts{cmp_trials.value_or(c.eval.envchange_trials), cmp_repeats.value_or(c.eval.repeats),
                                   step_seed(c, "eval/envchange"), c.eval.parallel, config_digest(c)};
            const auto result = compare_adaptation(original, adapted, c.robot, c.curriculum, opts);
            write_report(cmp_out, result.original);
            write_report(cmp_out, result.adapted);
            std::ofstream out(fs::path(cmp_out) / "adaptation.csv");
            write_comparison_csv(out, result);
            print_report(result.original);
            print_report(result.adapted);
            std::cout << "verdict: " << format_number(result.verdict) << " more successes after adaptation\n";
        } else if (*plot_cmd) {
            const auto table = read_csv(plot_in);
            PlotStyle style;
            style.title = plot_title.empty() ? fs::path(plot_in).stem().string() : plot_title;
            if (plot_kind == "hist") {
                style.x_label = plot_column;
                style.y_label = "count";
                write_text(plot_out, histogram_svg(table.numbers(plot_column), plot_bins, style));
            } else {
                style.x_label = plot_x;
                style.y_label = plot_y;
                write_text(plot_out, scatter_svg(table.numbers(plot_x), table.numbers(plot_y), style));
            }
            std::cout << "wrote " << plot_out << '\n';
        } else if (*run_cmd) {
            const auto c = run.config();
            const auto result = run_curriculum(c, run_out, &std::cerr);
            for (const auto& [_, r] : result.reports) print_report(r);
            print_report(result.adaptation.original);
            print_report(result.adaptation.adapted);
            std::cout << "verdict: " << format_number(result.adaptation.verdict) << '\n';
        }
    } catch (const MissingModel& e) {
        return fail("missing model", e.what());
    } catch (const FormatError& e) {
        return fail("format error", e.what());
    } catch (const InvalidArgument& e) {
        return fail("invalid argument", e.what());
    } catch (const Error& e) {
        return fail("error", e.what());
    } catch (const std::exception& e) {
        return fail("internal error", e.what());
    }
    return 0;
}
