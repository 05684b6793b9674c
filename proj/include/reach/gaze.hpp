#pragma once

#include <optional>

#include "reach/robot.hpp"

namespace reach {

/// Maps an observed target centroid to a relative head command that should
/// bring the target to the image centre.
class GazeController {
public:
    virtual ~GazeController() = default;
    virtual HeadAngles correction(const Eigen::Vector2d& centroid) const = 0;
};

/// Geometric controller: turns the head by the angles of the back-projected
/// pixel ray. Exact up to the eye's offset from the neck axes.
class AnalyticGazeController final : public GazeController {
public:
    explicit AnalyticGazeController(KinematicModel model) : model_(std::move(model)) {}
    HeadAngles correction(const Eigen::Vector2d& centroid) const override;

private:
    KinematicModel model_;
};

struct CenteringResult {
    RobotState state;
    std::optional<Eigen::Vector2d> centroid;  ///< last percept; empty if the target was lost
    double pixel_error = 0.0;
    int steps = 0;
    bool centered = false;
};

inline constexpr double kCenteringTolerancePx = 3.0;
inline constexpr int kMaxGazeSteps = 10;

/// Closed-loop centering: perceive, stop if within tolerance, otherwise apply
/// the controller's correction. Gives up after max_steps head moves or when
/// the target leaves the view.
CenteringResult center_gaze(const KinematicModel& model, const RobotState& state, const Target& target,
                            const GazeController& controller, double tolerance_px = kCenteringTolerancePx,
                            int max_steps = kMaxGazeSteps);

/// Head angles that put `point` on the optical axis, or nullopt if they fall
/// outside the head's joint limits.
std::optional<HeadAngles> centering_head_angles(const KinematicModel& model, const Eigen::Vector3d& point);

} // namespace reach
