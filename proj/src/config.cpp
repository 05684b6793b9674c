#include "reach/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "reach/binary_io.hpp"
#include "reach/error.hpp"

namespace reach {

namespace {

using Json = nlohmann::ordered_json;

Json vec3(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3(const Json& j) {
    if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <std::size_t N>
Json limits(const std::array<JointLimit, N>& lims) {
    Json out = Json::array();
    for (const auto& l : lims) out.push_back({l.min, l.max});
    return out;
}

template <std::size_t N>
std::array<JointLimit, N> limits(const Json& j) {
    if (!j.is_array() || j.size() != N) throw FormatError("expected " + std::to_string(N) + " joint limits");
    std::array<JointLimit, N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        if (!j[i].is_array() || j[i].size() != 2) throw FormatError("joint limit must be [min, max]");
        out[i] = {j[i][0].get<double>(), j[i][1].get<double>()};
    }
    return out;
}

Json robot_json(const KinematicModel& m) {
    return {{"shoulder", vec3(m.shoulder)},
            {"upper_arm", m.upper_arm},
            {"forearm", m.forearm},
            {"grasp_offset", vec3(m.grasp_offset)},
            {"neck", vec3(m.neck)},
            {"neck_pitch_height", m.neck_pitch_height},
            {"camera_offset", vec3(m.camera_offset)},
            {"image_width", m.image_width},
            {"image_height", m.image_height},
            {"focal_px", m.focal_px},
            {"principal_u", m.principal_u},
            {"principal_v", m.principal_v},
            {"head_limits", limits(m.head_limits)},
            {"arm_limits", limits(m.arm_limits)},
            {"ball_radius", m.ball_radius},
            {"angle_noise_deg", m.angle_noise_deg}};
}

KinematicModel robot_from(const Json& j) {
    KinematicModel m;
    m.shoulder = vec3(j.at("shoulder"));
    m.upper_arm = j.at("upper_arm").get<double>();
    m.forearm = j.at("forearm").get<double>();
    m.grasp_offset = vec3(j.at("grasp_offset"));
    m.neck = vec3(j.at("neck"));
    m.neck_pitch_height = j.at("neck_pitch_height").get<double>();
    m.camera_offset = vec3(j.at("camera_offset"));
    m.image_width = j.at("image_width").get<int>();
    m.image_height = j.at("image_height").get<int>();
    m.focal_px = j.at("focal_px").get<double>();
    m.principal_u = j.at("principal_u").get<double>();
    m.principal_v = j.at("principal_v").get<double>();
    m.head_limits = limits<kHeadJoints>(j.at("head_limits"));
    m.arm_limits = limits<kArmJoints>(j.at("arm_limits"));
    m.ball_radius = j.at("ball_radius").get<double>();
    m.angle_noise_deg = j.at("angle_noise_deg").get<double>();
    m.validate();
    return m;
}

Json gwr_json(const GwrParams& p) {
    return {{"epochs", p.epochs},
            {"max_age", p.max_age},
            {"max_neurons", p.max_neurons},
            {"eps_b", p.eps_b},
            {"eps_n", p.eps_n},
            {"tau_b", p.tau_b},
            {"tau_n", p.tau_n},
            {"activity_threshold", p.activity_threshold},
            {"habituation_threshold", p.habituation_threshold}};
}

GwrParams gwr_from(const Json& j) {
    GwrParams p;
    p.epochs = j.at("epochs").get<int>();
    p.max_age = j.at("max_age").get<int>();
    p.max_neurons = j.at("max_neurons").get<int>();
    p.eps_b = j.at("eps_b").get<double>();
    p.eps_n = j.at("eps_n").get<double>();
    p.tau_b = j.at("tau_b").get<double>();
    p.tau_n = j.at("tau_n").get<double>();
    p.activity_threshold = j.at("activity_threshold").get<double>();
    p.habituation_threshold = j.at("habituation_threshold").get<double>();
    p.validate();
    return p;
}

Json to_json(const ExperimentConfig& c) {
    const auto& b = c.babble;
    const auto& k = c.curriculum;
    return {{"seed", c.seed},
            {"robot", robot_json(c.robot)},
            {"babble",
             {{"iterations", b.iterations},
              {"head_amplitude_deg", b.head_amplitude_deg},
              {"gaze_interpolation", b.gaze_interpolation},
              {"arm_interpolation", b.arm_interpolation},
              {"target_min_depth", b.target_min_depth},
              {"target_max_depth", b.target_max_depth},
              {"tolerance_px", b.tolerance_px},
              {"max_gaze_steps", b.max_gaze_steps}}},
            {"curriculum",
             {{"gaze", {{"sensory", gwr_json(k.gaze.sensory)}, {"motor", gwr_json(k.gaze.motor)}}},
              {"arm", {{"sensory", gwr_json(k.arm.sensory)}, {"motor", gwr_json(k.arm.motor)}}},
              {"head_motor", gwr_json(k.head_motor)},
              {"alpha", k.alpha},
              {"transfer_with_arm_data", k.transfer_with_arm_data},
              {"adapt_with_original_data", k.adapt_with_original_data},
              {"tolerance_px", k.tolerance_px},
              {"max_gaze_steps", k.max_gaze_steps},
              {"success_tolerance_cm", k.success_tolerance_cm}}},
            {"eval",
             {{"trials", c.eval.trials},
              {"repeats", c.eval.repeats},
              {"envchange_trials", c.eval.envchange_trials},
              {"parallel", c.eval.parallel}}}};
}

ExperimentConfig from_json(const Json& j) {
    ExperimentConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.robot = robot_from(j.at("robot"));

    const auto& b = j.at("babble");
    c.babble.iterations = b.at("iterations").get<int>();
    c.babble.head_amplitude_deg = b.at("head_amplitude_deg").get<double>();
    c.babble.gaze_interpolation = b.at("gaze_interpolation").get<int>();
    c.babble.arm_interpolation = b.at("arm_interpolation").get<int>();
    c.babble.target_min_depth = b.at("target_min_depth").get<double>();
    c.babble.target_max_depth = b.at("target_max_depth").get<double>();
    c.babble.tolerance_px = b.at("tolerance_px").get<double>();
    c.babble.max_gaze_steps = b.at("max_gaze_steps").get<int>();
    if (c.babble.iterations < 0 || c.babble.gaze_interpolation < 0 || c.babble.arm_interpolation < 0)
        throw InvalidArgument("babble counts must be non-negative");
    if (!(0.0 < c.babble.target_min_depth && c.babble.target_min_depth <= c.babble.target_max_depth))
        throw InvalidArgument("target depth range is empty");

    const auto& k = j.at("curriculum");
    c.curriculum.gaze = {gwr_from(k.at("gaze").at("sensory")), gwr_from(k.at("gaze").at("motor"))};
    c.curriculum.arm = {gwr_from(k.at("arm").at("sensory")), gwr_from(k.at("arm").at("motor"))};
    c.curriculum.head_motor = gwr_from(k.at("head_motor"));
    c.curriculum.alpha = k.at("alpha").get<double>();
    c.curriculum.transfer_with_arm_data = k.at("transfer_with_arm_data").get<bool>();
    c.curriculum.adapt_with_original_data = k.at("adapt_with_original_data").get<bool>();
    c.curriculum.tolerance_px = k.at("tolerance_px").get<double>();
    c.curriculum.max_gaze_steps = k.at("max_gaze_steps").get<int>();
    c.curriculum.success_tolerance_cm = k.at("success_tolerance_cm").get<double>();
    if (!(c.curriculum.alpha > 0.0)) throw InvalidArgument("alpha must be positive");

    const auto& e = j.at("eval");
    c.eval.trials = e.at("trials").get<int>();
    c.eval.repeats = e.at("repeats").get<int>();
    c.eval.envchange_trials = e.at("envchange_trials").get<int>();
    c.eval.parallel = e.at("parallel").get<bool>();
    if (c.eval.trials < 1 || c.eval.repeats < 1 || c.eval.envchange_trials < 1)
        throw InvalidArgument("trials and repeats must be >= 1");
    return c;
}

void reject_unknown(const Json& given, const Json& known, const std::string& path) {
    if (!given.is_object()) return;
    for (const auto& [key, value] : given.items()) {
        const std::string where = path.empty() ? key : path + "." + key;
        if (!known.is_object() || !known.contains(key)) throw FormatError("unknown config key '" + where + "'");
        reject_unknown(value, known.at(key), where);
    }
}

} // namespace

std::string dump_config(const ExperimentConfig& config) { return to_json(config).dump(2) + "\n"; }

ExperimentConfig parse_config(const std::string& text) {
    Json given;
    try {
        given = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!given.is_object()) throw FormatError("config must be a JSON object");
    Json merged = to_json(ExperimentConfig{});
    reject_unknown(given, merged, "");
    merged.merge_patch(given);
    try {
        return from_json(merged);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad config value: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

void save_config(const std::string& path, const ExperimentConfig& config) {
    std::ofstream out(path);
    out << dump_config(config);
    if (!out) throw FormatError("cannot write config " + path);
}

std::string config_digest(const ExperimentConfig& config) {
    return io::hex_digest(io::fnv1a(to_json(config).dump()));
}

std::string robot_digest(const KinematicModel& robot) { return io::hex_digest(io::fnv1a(robot_json(robot).dump())); }

} // namespace reach
