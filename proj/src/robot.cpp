#include "reach/robot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "reach/error.hpp"

namespace reach {

namespace {

using Eigen::AngleAxisd;
using Eigen::Translation3d;
using Eigen::Vector3d;

constexpr double kDegToRad = std::numbers::pi / 180.0;

constexpr std::uint8_t kBallRgb[3] = {220, 40, 30};
constexpr std::uint8_t kRedMin = 150;
constexpr std::uint8_t kOtherMax = 100;

// Scan grid spacing; smaller than both fields of view so neighbouring views overlap.
constexpr double kScanStepDeg = 30.0;

std::vector<double> grid_axis(const JointLimit& lim) {
    const int n = static_cast<int>(std::ceil((lim.max - lim.min) / kScanStepDeg)) + 1;
    std::vector<double> values;
    for (int i = 0; i < n; ++i) values.push_back(lim.min + (lim.max - lim.min) * i / (n - 1));
    return values;
}

} // namespace

void KinematicModel::validate() const {
    if (!(upper_arm > 0.0 && forearm > 0.0 && neck_pitch_height > 0.0))
        throw InvalidArgument("link lengths must be positive");
    if (image_width <= 0 || image_height <= 0) throw InvalidArgument("image size must be positive");
    if (!(focal_px > 0.0)) throw InvalidArgument("focal length must be positive");
    if (!(principal_u > 0.0 && principal_u < image_width && principal_v > 0.0 && principal_v < image_height))
        throw InvalidArgument("principal point must lie inside the image");
    for (const auto& l : head_limits)
        if (!(l.min < l.max)) throw InvalidArgument("empty head joint range");
    for (const auto& l : arm_limits)
        if (!(l.min < l.max)) throw InvalidArgument("empty arm joint range");
    if (!(ball_radius > 0.0)) throw InvalidArgument("ball radius must be positive");
    if (!(angle_noise_deg >= 0.0)) throw InvalidArgument("angle noise must be non-negative");
}

void RobotState::lock_arm_joint(int joint, double value) {
    if (joint < 0 || joint >= kArmJoints) throw InvalidArgument("arm joint index out of range");
    arm_locked[static_cast<std::size_t>(joint)] = true;
    arm_lock_values[static_cast<std::size_t>(joint)] = value;
    arm[static_cast<std::size_t>(joint)] = value;
}

Eigen::Isometry3d hand_frame(const KinematicModel& model, const ArmAngles& arm) {
    for (int j = 0; j < kArmJoints; ++j)
        if (!model.arm_limits[static_cast<std::size_t>(j)].contains(arm[static_cast<std::size_t>(j)]))
            throw InvalidArgument("arm joint " + std::to_string(j) + " outside its limits");

    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t *= Translation3d(model.shoulder);
    t *= AngleAxisd(arm[0] * kDegToRad, Vector3d::UnitZ());
    t *= AngleAxisd(-arm[1] * kDegToRad, Vector3d::UnitY());
    t *= AngleAxisd(arm[2] * kDegToRad, Vector3d::UnitX());
    t *= Translation3d(model.upper_arm, 0.0, 0.0);
    t *= AngleAxisd(arm[3] * kDegToRad, Vector3d::UnitZ());
    t *= Translation3d(model.forearm, 0.0, 0.0);
    return t;
}

Eigen::Vector3d forward_kinematics(const KinematicModel& model, const ArmAngles& arm) {
    return hand_frame(model, arm).translation();
}

Eigen::Vector3d grasp_point(const KinematicModel& model, const ArmAngles& arm) {
    return hand_frame(model, arm) * model.grasp_offset;
}

Eigen::Isometry3d camera_pose(const KinematicModel& model, const HeadAngles& head) {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t *= Translation3d(model.neck);
    t *= AngleAxisd(head[0] * kDegToRad, Vector3d::UnitZ());
    t *= Translation3d(0.0, 0.0, model.neck_pitch_height);
    t *= AngleAxisd(head[1] * kDegToRad, Vector3d::UnitY());
    t *= Translation3d(model.camera_offset);
    return t;
}

std::optional<Eigen::Vector2d> project_point(const KinematicModel& model, const HeadAngles& head,
                                             const Eigen::Vector3d& point) {
    const Vector3d p = camera_pose(model, head).inverse() * point;
    if (p.x() <= 1e-9) return std::nullopt;
    return Eigen::Vector2d(model.principal_u - model.focal_px * p.y() / p.x(),
                           model.principal_v - model.focal_px * p.z() / p.x());
}

Frame render_frame(const KinematicModel& model, const HeadAngles& head, const Target& target) {
    Frame frame{model.image_width, model.image_height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(model.image_width * model.image_height) * 3)};

    const Vector3d c = camera_pose(model, head).inverse() * target.position;
    const double r2 = target.radius * target.radius;
    const double c2 = c.squaredNorm();

    for (int row = 0; row < frame.height; ++row) {
        const double v = row + 0.5;
        for (int col = 0; col < frame.width; ++col) {
            const double u = col + 0.5;
            auto* px = &frame.rgb[static_cast<std::size_t>(row * frame.width + col) * 3];

            const Vector3d d = Vector3d(1.0, (model.principal_u - u) / model.focal_px,
                                        (model.principal_v - v) / model.focal_px).normalized();
            const double along = c.dot(d);
            if (along > 0.0 && c2 - along * along <= r2) {
                std::copy(std::begin(kBallRgb), std::end(kBallRgb), px);
            } else {
                // Slight vertical gradient so the background is not a flat colour.
                const auto grey = static_cast<std::uint8_t>(110 + (row * 40) / frame.height);
                px[0] = px[1] = px[2] = grey;
            }
        }
    }
    return frame;
}

Percept threshold_centroid(const Frame& frame) {
    double su = 0.0;
    double sv = 0.0;
    int count = 0;
    for (int row = 0; row < frame.height; ++row)
        for (int col = 0; col < frame.width; ++col) {
            const auto* px = &frame.rgb[static_cast<std::size_t>(row * frame.width + col) * 3];
            if (px[0] >= kRedMin && px[1] <= kOtherMax && px[2] <= kOtherMax) {
                su += col + 0.5;
                sv += row + 0.5;
                ++count;
            }
        }
    Percept p;
    p.pixel_count = count;
    if (count > 0) p.centroid = Eigen::Vector2d(su / count, sv / count);
    return p;
}

Percept perceive_target(const KinematicModel& model, const RobotState& state, const Target& target) {
    return threshold_centroid(render_frame(model, state.head, target));
}

MotorResult apply_motor(const KinematicModel& model, const RobotState& state, JointGroup group,
                        std::span<const double> command, CommandMode mode, std::mt19937_64* noise) {
    const bool head = group == JointGroup::Head;
    const std::size_t n = head ? kHeadJoints : kArmJoints;
    if (command.size() != n)
        throw DimensionError("expected " + std::to_string(n) + " joint values, got " + std::to_string(command.size()));

    MotorResult result{state, false};
    std::normal_distribution<double> gauss(0.0, model.angle_noise_deg);
    for (std::size_t j = 0; j < n; ++j) {
        double& angle = head ? result.state.head[j] : result.state.arm[j];
        if (!head && state.arm_locked[j]) {
            angle = state.arm_lock_values[j];
            continue;
        }
        double wanted = mode == CommandMode::Relative ? angle + command[j] : command[j];
        if (noise && model.angle_noise_deg > 0.0) wanted += gauss(*noise);
        const auto& lim = head ? model.head_limits[j] : model.arm_limits[j];
        const double clamped = lim.clamp(wanted);
        if (clamped != wanted) result.clamped = true;
        angle = clamped;
    }
    return result;
}

Target place_ball_in_hand(const KinematicModel& model, const RobotState& state) {
    return {grasp_point(model, state.arm), model.ball_radius};
}

std::optional<ScanResult> scan_for_target(const KinematicModel& model, const RobotState& state,
                                          const Target& target) {
    if (const auto p = perceive_target(model, state, target); p.visible()) return ScanResult{state, *p.centroid, 0};

    std::vector<HeadAngles> poses;
    for (double yaw : grid_axis(model.head_limits[0]))
        for (double pitch : grid_axis(model.head_limits[1])) poses.push_back({yaw, pitch});
    const auto dist = [&](const HeadAngles& h) {
        return std::hypot(h[0] - state.head[0], h[1] - state.head[1]);
    };
    std::stable_sort(poses.begin(), poses.end(),
                     [&](const HeadAngles& a, const HeadAngles& b) { return dist(a) < dist(b); });

    RobotState probe = state;
    int moves = 0;
    for (const auto& pose : poses) {
        probe.head = pose;
        ++moves;
        if (const auto p = perceive_target(model, probe, target); p.visible())
            return ScanResult{probe, *p.centroid, moves};
    }
    return std::nullopt;
}

double centering_error(const KinematicModel& model, const Eigen::Vector2d& centroid) {
    return std::hypot(centroid.x() - model.principal_u, centroid.y() - model.principal_v);
}

} // namespace reach
