#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "reach/gaze.hpp"
#include "reach/robot.hpp"
#include "reach/vector_set.hpp"

namespace reach {

/// Centroid after a random head move, paired with the command that undoes it.
struct GazeSample {
    Eigen::Vector2d s_head;             ///< px
    HeadAngles m_delta_head_inv{};      ///< deg, additive inverse of the executed delta
};

struct ArmSample {
    Eigen::Vector3d s_arm;  ///< hand position, cm, torso frame
    ArmAngles m_arm{};      ///< deg
};

struct EyeHandTriplet {
    Eigen::Vector3d s_arm;
    ArmAngles m_arm{};
    HeadAngles m_head{};          ///< absolute head angles after centering on the hand
    double centroid_error = 0.0;  ///< px, at capture time
};

/// Scene needed to replay a gaze sample: head pose after the babble and the target.
struct GazeReplay {
    HeadAngles head{};
    Eigen::Vector3d target;
};

struct GazeDataset {
    std::vector<GazeSample> samples;
    std::vector<GazeReplay> replay;  ///< parallel to samples
    int discarded = 0;
};

struct EyeHandDataset {
    std::vector<EyeHandTriplet> triplets;
    int cancelled = 0;
};

struct BabbleConfig {
    int iterations = 1000;
    double head_amplitude_deg = 15.0;
    int gaze_interpolation = 5;   ///< intermediate points per gaze babble
    int arm_interpolation = 14;   ///< intermediate points per arm babble
    double target_min_depth = 30.0;
    double target_max_depth = 70.0;
    double tolerance_px = kCenteringTolerancePx;
    int max_gaze_steps = kMaxGazeSteps;
};

inline constexpr int kEnvChangeIterations = 500;

GazeDataset gen_gaze_dataset(const KinematicModel& model, const BabbleConfig& config, std::uint64_t seed);

std::vector<ArmSample> gen_arm_dataset(const KinematicModel& model, const BabbleConfig& config, std::uint64_t seed);

/// Random arm poses with the ball in the hand, centred by `gaze`. Iterations
/// where the hand cannot be found or centred yield no triplet.
EyeHandDataset gen_eyehand_dataset(const KinematicModel& model, const BabbleConfig& config,
                                   const GazeController& gaze, std::uint64_t seed,
                                   const RobotState& initial = RobotState{});

/// Eye-hand protocol with the upper-arm rotation joint locked at zero.
/// config.iterations is used as given; callers pass kEnvChangeIterations.
EyeHandDataset gen_envchange_dataset(const KinematicModel& model, const BabbleConfig& config,
                                     const GazeController& gaze, std::uint64_t seed);

/// Uniform joint configuration inside the limits, honouring locks in `state`.
ArmAngles random_arm_pose(const KinematicModel& model, const RobotState& state, std::mt19937_64& rng);

// --- Persistence -----------------------------------------------------------

struct FieldSpec {
    std::string name;
    std::string units;
    int dim = 0;
    bool operator==(const FieldSpec&) const = default;
};

/**
 * Tagged table of samples. On disk: one JSON header line starting with '#'
 * (format, version, modality, fields) followed by one whitespace-separated
 * record per line, written in shortest round-trip decimal form.
 */
struct Dataset {
    std::string modality;
    std::vector<FieldSpec> fields;
    VectorSet rows;

    VectorSet field(const std::string& name) const;
    bool operator==(const Dataset&) const = default;
};

void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);
void write_dataset(const std::string& path, const Dataset& data);
Dataset read_dataset(const std::string& path);

/// Digest of the serialized dataset.
std::string dataset_digest(const Dataset& data);

Dataset to_dataset(const std::vector<GazeSample>& samples);
Dataset to_dataset(const std::vector<ArmSample>& samples);
Dataset to_dataset(const std::vector<EyeHandTriplet>& triplets, const std::string& modality = "eyehand");

std::vector<GazeSample> gaze_samples(const Dataset& data);
std::vector<ArmSample> arm_samples(const Dataset& data);
std::vector<EyeHandTriplet> eyehand_triplets(const Dataset& data);

} // namespace reach
