#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Geometry>

namespace reach {

inline constexpr int kHeadJoints = 2;
inline constexpr int kArmJoints = 4;

/// Head joints: yaw (positive turns left), pitch (positive looks down). Degrees.
using HeadAngles = std::array<double, kHeadJoints>;
/// Arm joints: shoulder yaw, shoulder pitch (positive raises), upper-arm
/// rotation, elbow flexion. Degrees.
using ArmAngles = std::array<double, kArmJoints>;

/// Index of the upper-arm inward/outward rotation joint.
inline constexpr int kUpperArmRotation = 2;

struct JointLimit {
    double min;
    double max;
    bool contains(double v) const { return v >= min && v <= max; }
    double clamp(double v) const { return v < min ? min : (v > max ? max : v); }
};

/**
 * Geometry of the simulated robot. Lengths in centimetres, angles in degrees.
 *
 * Torso frame: x forward, y left, z up, origin between the shoulders. The arm
 * points straight forward at zero angles; the elbow flexes towards the body
 * midline when the upper arm is unrotated. The camera sits in the right eye
 * and looks along the head's x axis.
 */
struct KinematicModel {
    Eigen::Vector3d shoulder{0.0, -11.0, 0.0};
    double upper_arm = 15.0;
    double forearm = 15.0;
    Eigen::Vector3d grasp_offset{3.0, 0.0, 0.0};  ///< ball centre in the hand frame

    Eigen::Vector3d neck{0.0, 0.0, 4.0};  ///< origin of the neck yaw axis
    double neck_pitch_height = 8.0;       ///< pitch axis above the yaw origin
    Eigen::Vector3d camera_offset{5.0, -3.0, 0.0};  ///< right eye in the pitched head frame

    int image_width = 80;
    int image_height = 60;
    double focal_px = 70.0;
    double principal_u = 40.0;
    double principal_v = 30.0;

    std::array<JointLimit, kHeadJoints> head_limits{{{-60.0, 60.0}, {-45.0, 45.0}}};
    std::array<JointLimit, kArmJoints> arm_limits{{{-20.0, 60.0}, {-20.0, 40.0}, {-90.0, 90.0}, {0.0, 50.0}}};

    double ball_radius = 2.5;
    double angle_noise_deg = 0.0;  ///< std-dev of actuation noise; 0 disables it

    void validate() const;
    double total_arm_length() const { return upper_arm + forearm; }
};

struct RobotState {
    HeadAngles head{};
    ArmAngles arm{};
    std::array<bool, kArmJoints> arm_locked{};
    ArmAngles arm_lock_values{};

    /// Locks an arm joint at `value` and moves it there.
    void lock_arm_joint(int joint, double value = 0.0);

    bool operator==(const RobotState&) const = default;
};

struct Target {
    Eigen::Vector3d position = Eigen::Vector3d::Zero();
    double radius = 2.5;
};

/// Target centroid in image coordinates (u right, v down), if visible.
struct Percept {
    std::optional<Eigen::Vector2d> centroid;
    int pixel_count = 0;
    bool visible() const { return centroid.has_value(); }
};

/// 8-bit RGB image, row-major.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;
};

enum class JointGroup { Head, Arm };
enum class CommandMode { Relative, Absolute };

struct MotorResult {
    RobotState state;
    bool clamped = false;
};

Eigen::Isometry3d hand_frame(const KinematicModel& model, const ArmAngles& arm);

/// Hand position in the torso frame. Throws InvalidArgument outside joint limits.
Eigen::Vector3d forward_kinematics(const KinematicModel& model, const ArmAngles& arm);

/// Ball centre when held in the open grasp.
Eigen::Vector3d grasp_point(const KinematicModel& model, const ArmAngles& arm);

Eigen::Isometry3d camera_pose(const KinematicModel& model, const HeadAngles& head);

/// Pinhole projection of a point; nullopt if it lies behind the camera.
std::optional<Eigen::Vector2d> project_point(const KinematicModel& model, const HeadAngles& head,
                                             const Eigen::Vector3d& point);

/// Ray-traced binary scene: red ball over a grey background.
Frame render_frame(const KinematicModel& model, const HeadAngles& head, const Target& target);

/// Red-threshold segmentation followed by the pixel-mass centroid.
Percept threshold_centroid(const Frame& frame);

Percept perceive_target(const KinematicModel& model, const RobotState& state, const Target& target);

/// Executes a joint command on one group. Locked joints keep their lock value
/// and results are clamped to the joint limits. When the model has angle
/// noise and `noise` is given, Gaussian noise is added before clamping.
MotorResult apply_motor(const KinematicModel& model, const RobotState& state, JointGroup group,
                        std::span<const double> command, CommandMode mode, std::mt19937_64* noise = nullptr);

Target place_ball_in_hand(const KinematicModel& model, const RobotState& state);

struct ScanResult {
    RobotState state;
    Eigen::Vector2d centroid;
    int moves = 0;
};

/// Fixed sweep over head poses, nearest to the current pose first. Returns
/// as soon as the target becomes visible, nullopt after the full sweep.
std::optional<ScanResult> scan_for_target(const KinematicModel& model, const RobotState& state,
                                          const Target& target);

/// Pixel distance between a centroid and the principal point.
double centering_error(const KinematicModel& model, const Eigen::Vector2d& centroid);

} // namespace reach
