#include "reach/curriculum.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "reach/binary_io.hpp"
#include "reach/error.hpp"

namespace reach {

namespace fs = std::filesystem;

namespace {

VectorSet gather(const std::vector<GazeSample>& data, bool sensory) {
    VectorSet out(2);
    out.reserve(data.size());
    for (const auto& s : data) {
        if (sensory)
            out.push_back(std::vector<double>{s.s_head.x(), s.s_head.y()});
        else
            out.push_back(s.m_delta_head_inv);
    }
    return out;
}

void push_position(VectorSet& out, const Eigen::Vector3d& p) {
    out.push_back(std::span<const double>(p.data(), 3));
}

template <typename Sample>
void push_arm(VectorSet& positions, VectorSet& angles, const std::vector<Sample>& data) {
    for (const auto& s : data) {
        push_position(positions, s.s_arm);
        angles.push_back(s.m_arm);
    }
}

VectorSet head_angles(const std::vector<EyeHandTriplet>& triplets) {
    VectorSet out(kHeadJoints);
    for (const auto& t : triplets) out.push_back(t.m_head);
    return out;
}

void record_trace(Provenance& p, const std::string& name, std::vector<double> trace) {
    auto& dst = p.traces[name];
    dst.insert(dst.end(), trace.begin(), trace.end());
}

std::string file_stem(const std::string& dir, Stage stage) { return (fs::path(dir) / to_string(stage)).string(); }

} // namespace

std::string to_string(Stage stage) {
    switch (stage) {
    case Stage::Gaze: return "gaze";
    case Stage::Arm: return "arm";
    case Stage::EyeHand: return "eyehand";
    }
    return "unknown";
}

Stage parse_stage(const std::string& name) {
    if (name == "gaze") return Stage::Gaze;
    if (name == "arm") return Stage::Arm;
    if (name == "eyehand") return Stage::EyeHand;
    throw InvalidArgument("unknown stage '" + name + "'");
}

std::string to_string(ReachFailure reason) {
    switch (reason) {
    case ReachFailure::None: return "none";
    case ReachFailure::NotFound: return "not-found";
    case ReachFailure::NoAssociation: return "no-association";
    }
    return "unknown";
}

std::uint64_t derive_seed(std::uint64_t base, const std::string& label) {
    return io::fnv1a(label.data(), label.size(), io::fnv1a(&base, sizeof base));
}

GwrNetwork train_network(const VectorSet& data, const GwrParams& params, std::uint64_t seed,
                         std::vector<double>* trace) {
    if (data.empty()) throw InvalidArgument("cannot train a network on an empty dataset");
    std::size_t second = 1;
    while (second < data.size() && std::ranges::equal(data[second], data[0])) ++second;
    if (second == data.size()) throw InvalidArgument("dataset needs two distinct samples");
    GwrNetwork net(data.dim(), params, seed, data[0], data[second]);
    auto t = net.train(data);
    if (trace) *trace = std::move(t.epoch_error);
    return net;
}

StageModel train_gaze(const std::vector<GazeSample>& data, const CurriculumConfig& config, std::uint64_t seed) {
    if (data.empty()) throw InvalidArgument("gaze dataset is empty");
    const VectorSet centroids = gather(data, true);
    const VectorSet commands = gather(data, false);

    Provenance prov;
    prov.datasets["gaze"] = dataset_digest(to_dataset(data));
    prov.seeds["sensory"] = derive_seed(seed, "gaze/sensory");
    prov.seeds["motor"] = derive_seed(seed, "gaze/motor");

    std::vector<double> trace;
    GwrNetwork sensory = train_network(centroids, config.gaze.sensory, prov.seeds["sensory"], &trace);
    record_trace(prov, "sensory", std::move(trace));
    GwrNetwork motor = train_network(commands, config.gaze.motor, prov.seeds["motor"], &trace);
    record_trace(prov, "motor", std::move(trace));

    auto table = build_associations(sensory, motor, centroids, commands, config.alpha, "gaze/centroid",
                                    "gaze/head-delta");
    return {Stage::Gaze, std::move(sensory), std::move(motor), std::move(table), std::move(prov)};
}

LearnedGazeController::LearnedGazeController(const StageModel& model) : model_(&model) {
    if (model.stage != Stage::Gaze) throw InvalidArgument("gaze controller needs a gaze model");
}

HeadAngles LearnedGazeController::correction(const Eigen::Vector2d& centroid) const {
    const auto cmd = recall(model_->table, model_->sensory, model_->motor,
                            std::span<const double>(centroid.data(), 2), Direction::AtoB);
    return {cmd[0], cmd[1]};
}

CenteringResult gaze_control(const StageModel& gaze, const KinematicModel& robot, const RobotState& state,
                             const Target& target, const CurriculumConfig& config) {
    if (!perceive_target(robot, state, target).visible()) throw InvalidArgument("target is not in view");
    return center_gaze(robot, state, target, LearnedGazeController(gaze), config.tolerance_px,
                       config.max_gaze_steps);
}

StageModel train_arm(const std::vector<ArmSample>& data, const CurriculumConfig& config, std::uint64_t seed) {
    if (data.empty()) throw InvalidArgument("arm dataset is empty");
    VectorSet positions(3);
    VectorSet angles(kArmJoints);
    push_arm(positions, angles, data);

    Provenance prov;
    prov.datasets["arm"] = dataset_digest(to_dataset(data));
    prov.seeds["sensory"] = derive_seed(seed, "arm/sensory");
    prov.seeds["motor"] = derive_seed(seed, "arm/motor");

    std::vector<double> trace;
    GwrNetwork sensory = train_network(positions, config.arm.sensory, prov.seeds["sensory"], &trace);
    record_trace(prov, "sensory", std::move(trace));
    GwrNetwork motor = train_network(angles, config.arm.motor, prov.seeds["motor"], &trace);
    record_trace(prov, "motor", std::move(trace));

    auto table = build_associations(sensory, motor, positions, angles, config.alpha, "arm/position", "arm/joints");
    return {Stage::Arm, std::move(sensory), std::move(motor), std::move(table), std::move(prov)};
}

ArmAngles recall_arm(const StageModel& arm, const Eigen::Vector3d& position) {
    const auto q = recall(arm.table, arm.sensory, arm.motor, std::span<const double>(position.data(), 3),
                          Direction::AtoB);
    return {q[0], q[1], q[2], q[3]};
}

namespace {

// Continues training both arm maps, then rebuilds their table from scratch.
// `extra` always feeds the table; it feeds the maps only when train_on_extra is set.
StageModel retrain_arm(const StageModel& arm, const std::vector<EyeHandTriplet>& triplets,
                       const std::vector<ArmSample>& extra, bool train_on_extra, const CurriculumConfig& config) {
    StageModel out = arm;
    VectorSet positions(3);
    VectorSet angles(kArmJoints);
    push_arm(positions, angles, triplets);
    if (train_on_extra) push_arm(positions, angles, extra);

    record_trace(out.provenance, "sensory", out.sensory.train(positions).epoch_error);
    record_trace(out.provenance, "motor", out.motor.train(angles).epoch_error);

    VectorSet assoc_pos(3);
    VectorSet assoc_ang(kArmJoints);
    push_arm(assoc_pos, assoc_ang, triplets);
    push_arm(assoc_pos, assoc_ang, extra);
    out.table = build_associations(out.sensory, out.motor, assoc_pos, assoc_ang, config.alpha, arm.table.id_a(),
                                   arm.table.id_b());
    return out;
}

VectorSet positions_of(const std::vector<EyeHandTriplet>& triplets) {
    VectorSet out(3);
    for (const auto& t : triplets) push_position(out, t.s_arm);
    return out;
}

} // namespace

EyeHandModels train_eyehand(const std::vector<EyeHandTriplet>& triplets, const StageModel& arm,
                            const std::vector<ArmSample>& retained_arm, const CurriculumConfig& config,
                            std::uint64_t seed) {
    if (arm.stage != Stage::Arm) throw InvalidArgument("eye-hand training needs a trained arm model");
    if (triplets.empty()) throw InvalidArgument("eye-hand dataset is empty");

    const std::string triplet_digest = dataset_digest(to_dataset(triplets));
    StageModel new_arm = retrain_arm(arm, triplets, retained_arm, config.transfer_with_arm_data, config);
    new_arm.provenance.datasets["eyehand"] = triplet_digest;

    Provenance prov;
    prov.datasets["eyehand"] = triplet_digest;
    prov.datasets["arm"] = arm.provenance.datasets.count("arm") ? arm.provenance.datasets.at("arm") : "";
    prov.seeds["motor"] = derive_seed(seed, "eyehand/head");

    std::vector<double> trace;
    const VectorSet heads = head_angles(triplets);
    GwrNetwork head = train_network(heads, config.head_motor, prov.seeds["motor"], &trace);
    record_trace(prov, "motor", std::move(trace));

    auto table = build_associations(new_arm.sensory, head, positions_of(triplets), heads, config.alpha,
                                    "eyehand/position", "eyehand/head");
    StageModel eyehand{Stage::EyeHand, new_arm.sensory, std::move(head), std::move(table), std::move(prov)};
    return {std::move(new_arm), std::move(eyehand)};
}

ReachOutcome reach(const StageModel& gaze, const StageModel& eyehand, const StageModel& arm,
                   const KinematicModel& robot, const RobotState& state, const Target& target,
                   const CurriculumConfig& config) {
    ReachOutcome out;
    out.final_state = state;
    const auto fail = [&](ReachFailure reason) {
        out.reason = reason;
        out.grasp = grasp_point(robot, out.final_state.arm);
        out.error_cm = (out.grasp - target.position).norm();
        out.success = false;
        return out;
    };

    RobotState s = state;
    if (!perceive_target(robot, s, target).visible()) {
        const auto found = scan_for_target(robot, s, target);
        if (!found) return fail(ReachFailure::NotFound);
        s = found->state;
    }

    try {
        const CenteringResult centred = gaze_control(gaze, robot, s, target, config);
        s = centred.state;
        out.final_state = s;
        out.gaze_error_px = centred.pixel_error;
        out.gaze_centered = centred.centered;
        if (!centred.centroid) return fail(ReachFailure::NotFound);

        const auto hypothesis = recall(eyehand.table, eyehand.motor, eyehand.sensory, s.head, Direction::BtoA);
        out.hand_hypothesis = Eigen::Vector3d(hypothesis[0], hypothesis[1], hypothesis[2]);
        const ArmAngles q = recall_arm(arm, out.hand_hypothesis);
        s = apply_motor(robot, s, JointGroup::Arm, q, CommandMode::Absolute).state;
    } catch (const NoAssociationError&) {
        return fail(ReachFailure::NoAssociation);
    }

    out.final_state = s;
    out.grasp = grasp_point(robot, s.arm);
    out.error_cm = (out.grasp - target.position).norm();
    out.success = out.error_cm <= config.success_tolerance_cm;
    return out;
}

EyeHandModels adapt(const StageModel& eyehand, const StageModel& arm, const std::vector<EyeHandTriplet>& triplets,
                    const std::vector<ArmSample>& original_arm, const CurriculumConfig& config, std::uint64_t seed) {
    if (triplets.empty()) throw InvalidArgument("adaptation dataset is empty");
    if (eyehand.stage != Stage::EyeHand || arm.stage != Stage::Arm) throw InvalidArgument("wrong model stages");

    const std::string digest = dataset_digest(to_dataset(triplets, "envchange"));
    const std::vector<ArmSample> none;
    StageModel new_arm = retrain_arm(arm, triplets, config.adapt_with_original_data ? original_arm : none,
                                     config.adapt_with_original_data, config);
    new_arm.provenance.datasets["envchange"] = digest;

    StageModel new_eyehand = eyehand;
    const VectorSet heads = head_angles(triplets);
    record_trace(new_eyehand.provenance, "motor", new_eyehand.motor.train(heads).epoch_error);
    new_eyehand.sensory = new_arm.sensory;
    new_eyehand.table = build_associations(new_eyehand.sensory, new_eyehand.motor, positions_of(triplets), heads,
                                           config.alpha, eyehand.table.id_a(), eyehand.table.id_b());
    new_eyehand.provenance.datasets["envchange"] = digest;
    new_eyehand.provenance.seeds["adapt"] = seed;
    return {std::move(new_arm), std::move(new_eyehand)};
}

// --- Bundle I/O ------------------------------------------------------------

void StageModel::save(const std::string& dir) const {
    fs::create_directories(dir);
    const auto stem = file_stem(dir, stage);
    sensory.save(stem + ".sensory.gwr");
    motor.save(stem + ".motor.gwr");
    table.save(stem + ".assoc");

    nlohmann::ordered_json manifest;
    manifest["stage"] = to_string(stage);
    manifest["config_digest"] = provenance.config_digest;
    manifest["robot_digest"] = provenance.robot_digest;
    manifest["datasets"] = provenance.datasets;
    manifest["seeds"] = provenance.seeds;
    manifest["traces"] = provenance.traces;
    manifest["neurons"] = {{"sensory", sensory.size()}, {"motor", motor.size()}};
    manifest["connected"] = {{"sensory", connected_sensory()}, {"motor", connected_motor()}};
    std::ofstream out(stem + ".manifest.json");
    out << manifest.dump(2) << '\n';
    if (!out) throw FormatError("failed to write manifest for " + stem);
}

bool StageModel::exists(const std::string& dir, Stage stage) {
    const auto stem = file_stem(dir, stage);
    for (const char* ext : {".sensory.gwr", ".motor.gwr", ".assoc", ".manifest.json"})
        if (!fs::exists(stem + ext)) return false;
    return true;
}

StageModel StageModel::load(const std::string& dir, Stage stage) {
    if (!exists(dir, stage)) throw FormatError("missing model: no " + to_string(stage) + " bundle in " + dir);
    const auto stem = file_stem(dir, stage);
    std::ifstream in(stem + ".manifest.json");
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("bad manifest " + stem + ": " + e.what());
    }
    if (manifest.value("stage", "") != to_string(stage)) throw FormatError("manifest stage mismatch in " + stem);

    Provenance prov;
    prov.config_digest = manifest.value("config_digest", "");
    prov.robot_digest = manifest.value("robot_digest", "");
    prov.datasets = manifest.value("datasets", std::map<std::string, std::string>{});
    prov.seeds = manifest.value("seeds", std::map<std::string, std::uint64_t>{});
    prov.traces = manifest.value("traces", std::map<std::string, std::vector<double>>{});

    StageModel model{stage, GwrNetwork::load(stem + ".sensory.gwr"), GwrNetwork::load(stem + ".motor.gwr"),
                     AssociationTable::load(stem + ".assoc"), std::move(prov)};
    if (model.table.count_a() != model.sensory.size() || model.table.count_b() != model.motor.size())
        throw FormatError("association table does not match the networks in " + stem);
    return model;
}

} // namespace reach
