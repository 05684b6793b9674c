#include "reach/gaze.hpp"

#include <cmath>
#include <numbers>

namespace reach {

namespace {
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
} // namespace

HeadAngles AnalyticGazeController::correction(const Eigen::Vector2d& centroid) const {
    const double y = (model_.principal_u - centroid.x()) / model_.focal_px;
    const double z = (model_.principal_v - centroid.y()) / model_.focal_px;
    return {std::atan2(y, 1.0) * kRadToDeg, std::atan2(-z, std::hypot(1.0, y)) * kRadToDeg};
}

CenteringResult center_gaze(const KinematicModel& model, const RobotState& state, const Target& target,
                            const GazeController& controller, double tolerance_px, int max_steps) {
    CenteringResult result;
    result.state = state;
    for (;;) {
        const Percept p = perceive_target(model, result.state, target);
        result.centroid = p.centroid;
        if (!p.visible()) return result;
        result.pixel_error = centering_error(model, *p.centroid);
        if (result.pixel_error <= tolerance_px) {
            result.centered = true;
            return result;
        }
        if (result.steps >= max_steps) return result;
        const HeadAngles cmd = controller.correction(*p.centroid);
        result.state = apply_motor(model, result.state, JointGroup::Head, cmd, CommandMode::Relative).state;
        ++result.steps;
    }
}

std::optional<HeadAngles> centering_head_angles(const KinematicModel& model, const Eigen::Vector3d& point) {
    // Fixed-point iteration on the unclamped angles; the eye offset is small
    // relative to target distances, so this contracts quickly.
    HeadAngles head{0.0, 0.0};
    for (int it = 0; it < 100; ++it) {
        const Eigen::Vector3d p = camera_pose(model, head).inverse() * point;
        const double dyaw = std::atan2(p.y(), p.x()) * kRadToDeg;
        const double dpitch = std::atan2(-p.z(), std::hypot(p.x(), p.y())) * kRadToDeg;
        head[0] += dyaw;
        head[1] += dpitch;
        if (std::abs(dyaw) < 1e-10 && std::abs(dpitch) < 1e-10) break;
    }
    const Eigen::Vector3d p = camera_pose(model, head).inverse() * point;
    if (!(p.x() > 0.0) || std::hypot(p.y(), p.z()) > 1e-6 * p.x()) return std::nullopt;
    if (!model.head_limits[0].contains(head[0]) || !model.head_limits[1].contains(head[1])) return std::nullopt;
    return head;
}

} // namespace reach
