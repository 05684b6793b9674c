#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reach/association.hpp"
#include "reach/dataset.hpp"
#include "reach/gaze.hpp"
#include "reach/gwr.hpp"
#include "reach/robot.hpp"

namespace reach {

enum class Stage { Gaze, Arm, EyeHand };

std::string to_string(Stage stage);
Stage parse_stage(const std::string& name);

struct StageParams {
    GwrParams sensory;
    GwrParams motor;
};

/// Network hyperparameters and protocol switches for the whole curriculum.
struct CurriculumConfig {
    StageParams gaze{GwrParams::with_thresholds(0.5, 0.7), GwrParams::with_thresholds(0.9, 0.3)};
    StageParams arm{GwrParams::with_thresholds(0.5, 0.7), GwrParams::with_thresholds(0.1, 0.5)};
    GwrParams head_motor = GwrParams::with_thresholds(0.5, 0.9, 1000);
    double alpha = kDefaultHebbianRate;

    /// Interleave the original arm samples when transferring the arm maps to the eye-hand stage.
    bool transfer_with_arm_data = false;
    /// Interleave the original arm samples when adapting to changed kinematics.
    bool adapt_with_original_data = false;

    double tolerance_px = kCenteringTolerancePx;
    int max_gaze_steps = kMaxGazeSteps;
    double success_tolerance_cm = 3.0;
};

/// Where a model came from: enough to rebuild it.
struct Provenance {
    std::string config_digest;
    std::string robot_digest;
    std::map<std::string, std::string> datasets;   ///< role -> dataset digest
    std::map<std::string, std::uint64_t> seeds;    ///< network -> seed
    std::map<std::string, std::vector<double>> traces;  ///< network -> per-epoch error

    bool operator==(const Provenance&) const = default;
};

/**
 * Two maps and their Hebbian table.
 *
 * Gaze: sensory = image centroids, motor = inverse head deltas.
 * Arm: sensory = hand positions, motor = arm joint angles.
 * EyeHand: sensory = hand positions (the transferred arm map), motor = absolute head angles.
 * The table's side A is always the sensory map.
 */
struct StageModel {
    Stage stage;
    GwrNetwork sensory;
    GwrNetwork motor;
    AssociationTable table;
    Provenance provenance;

    int connected_sensory() const { return table.connected_a(); }
    int connected_motor() const { return table.connected_b(); }

    void save(const std::string& dir) const;
    static StageModel load(const std::string& dir, Stage stage);
    static bool exists(const std::string& dir, Stage stage);

    bool operator==(const StageModel&) const = default;
};

/// Deterministic per-network seed derived from a base seed and a label.
std::uint64_t derive_seed(std::uint64_t base, const std::string& label);

/// Seeds a network with the first row and the first distinct row after it, then trains it.
GwrNetwork train_network(const VectorSet& data, const GwrParams& params, std::uint64_t seed,
                         std::vector<double>* trace = nullptr);

StageModel train_gaze(const std::vector<GazeSample>& data, const CurriculumConfig& config, std::uint64_t seed);

/// Gaze controller backed by a trained gaze model: recalls the inverse head
/// delta associated with the observed centroid.
class LearnedGazeController final : public GazeController {
public:
    explicit LearnedGazeController(const StageModel& model);
    HeadAngles correction(const Eigen::Vector2d& centroid) const override;

private:
    const StageModel* model_;
};

/// Centres a visible target with the learned gaze model. Throws
/// InvalidArgument if the target is not visible at the start.
CenteringResult gaze_control(const StageModel& gaze, const KinematicModel& robot, const RobotState& state,
                             const Target& target, const CurriculumConfig& config);

StageModel train_arm(const std::vector<ArmSample>& data, const CurriculumConfig& config, std::uint64_t seed);

/// Arm joint angles recalled for a hand position.
ArmAngles recall_arm(const StageModel& arm, const Eigen::Vector3d& position);

struct EyeHandModels {
    StageModel arm;      ///< arm model after transfer, table rebuilt
    StageModel eyehand;
};

/// Continues training the arm maps on the triplets, rebuilds the arm table
/// from the triplets plus `retained_arm`, trains a fresh head-angle map and
/// associates it with the hand-position map.
EyeHandModels train_eyehand(const std::vector<EyeHandTriplet>& triplets, const StageModel& arm,
                            const std::vector<ArmSample>& retained_arm, const CurriculumConfig& config,
                            std::uint64_t seed);

enum class ReachFailure { None, NotFound, NoAssociation };
std::string to_string(ReachFailure reason);

struct ReachOutcome {
    bool success = false;
    ReachFailure reason = ReachFailure::None;
    Eigen::Vector3d grasp = Eigen::Vector3d::Zero();  ///< final grasp point
    Eigen::Vector3d hand_hypothesis = Eigen::Vector3d::Zero();
    double error_cm = 0.0;
    double gaze_error_px = 0.0;
    bool gaze_centered = false;
    RobotState final_state;
};

/// Gaze at the target, recall a hand position from the head angles, recall
/// arm angles for that position and execute them. Never throws for
/// unreachable or unseen targets; those come back as failed outcomes.
ReachOutcome reach(const StageModel& gaze, const StageModel& eyehand, const StageModel& arm,
                   const KinematicModel& robot, const RobotState& state, const Target& target,
                   const CurriculumConfig& config);

/// Continues training on triplets recorded with changed kinematics. The
/// inputs are left untouched; the adapted copies are returned.
EyeHandModels adapt(const StageModel& eyehand, const StageModel& arm, const std::vector<EyeHandTriplet>& triplets,
                    const std::vector<ArmSample>& original_arm, const CurriculumConfig& config, std::uint64_t seed);

} // namespace reach
