#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "reach/curriculum.hpp"
#include "reach/error.hpp"

using namespace reach;
namespace fs = std::filesystem;

namespace {

CurriculumConfig quick_config() {
    CurriculumConfig c;
    for (GwrParams* p : {&c.gaze.sensory, &c.gaze.motor, &c.arm.sensory, &c.arm.motor, &c.head_motor}) p->epochs = 5;
    return c;
}

struct Trained {
    KinematicModel robot;
    CurriculumConfig config = quick_config();
    std::vector<ArmSample> arm_data;
    std::vector<EyeHandTriplet> triplets;
    std::optional<StageModel> gaze;
    std::optional<StageModel> arm;
    std::optional<EyeHandModels> eyehand;
};

const Trained& trained() {
    static const Trained t = [] {
        Trained t;
        BabbleConfig b;
        b.iterations = 200;
        t.gaze = train_gaze(gen_gaze_dataset(t.robot, b, 1).samples, t.config, 2);
        t.arm_data = gen_arm_dataset(t.robot, b, 3);
        t.arm = train_arm(t.arm_data, t.config, 4);
        t.triplets = gen_eyehand_dataset(t.robot, b, LearnedGazeController(*t.gaze), 5).triplets;
        t.eyehand = train_eyehand(t.triplets, *t.arm, t.arm_data, t.config, 6);
        return t;
    }();
    return t;
}

} // namespace

TEST_CASE("a toy gaze dataset is recalled exactly") {
    std::vector<GazeSample> toy{{{10.0, 10.0}, {6.0, 4.0}}, {{40.0, 30.0}, {0.0, 0.0}}, {{70.0, 50.0}, {-6.0, -4.0}}};
    const auto model = train_gaze(toy, CurriculumConfig{}, 1);
    const LearnedGazeController ctl(model);
    for (const auto& s : toy) {
        const auto cmd = ctl.correction(s.s_head);
        // A habituated motor neuron farther than -ln(0.9) from a sample would have triggered growth.
        CHECK(std::hypot(cmd[0] - s.m_delta_head_inv[0], cmd[1] - s.m_delta_head_inv[1]) < -std::log(0.9));
    }
    CHECK_THROWS_AS(train_gaze({}, CurriculumConfig{}, 1), InvalidArgument);
    CHECK_THROWS_AS(train_arm({}, CurriculumConfig{}, 1), InvalidArgument);
    CHECK_THROWS_AS(train_network(VectorSet(2, {{1.0, 1.0}, {1.0, 1.0}}), GwrParams{}, 1), InvalidArgument);
}

TEST_CASE("trained stages respect caps and keep tables consistent") {
    const auto& t = trained();
    for (const StageModel* m : {&*t.gaze, &*t.arm, &t.eyehand->arm, &t.eyehand->eyehand}) {
        CHECK(m->table.count_a() == m->sensory.size());
        CHECK(m->table.count_b() == m->motor.size());
        CHECK(m->sensory.size() <= 6000);
        CHECK(m->motor.size() <= 6000);
        CHECK(m->connected_sensory() > 0);
    }
    CHECK(t.eyehand->eyehand.motor.size() <= 1000);
    CHECK(t.eyehand->eyehand.sensory == t.eyehand->arm.sensory);
    CHECK(static_cast<double>(t.gaze->connected_sensory()) / t.gaze->sensory.size() > 0.8);

    // Recalling a training position lands near it.
    int close = 0;
    for (std::size_t i = 0; i < t.arm_data.size(); i += 50) {
        try {
            const auto q = recall_arm(*t.arm, t.arm_data[i].s_arm);
            close += (forward_kinematics(t.robot, q) - t.arm_data[i].s_arm).norm() < 5.0;
        } catch (const NoAssociationError&) {
        }
    }
    CHECK(close >= static_cast<int>(t.arm_data.size() / 50) * 8 / 10);
}

TEST_CASE("gaze control needs a visible target and stops at once when centred") {
    const auto& t = trained();
    RobotState s;
    const auto cam = camera_pose(t.robot, s.head);
    const Target ahead{cam.translation() + cam.linear().col(0) * 40.0, 2.5};
    const auto res = gaze_control(*t.gaze, t.robot, s, ahead, t.config);
    CHECK(res.centered);
    CHECK(res.steps == 0);
    const Target behind{Eigen::Vector3d(-40, 0, 0), 2.5};
    CHECK_THROWS_AS(gaze_control(*t.gaze, t.robot, s, behind, t.config), InvalidArgument);
}

TEST_CASE("reach never throws and reports consistent outcomes") {
    const auto& t = trained();
    const auto& eh = *t.eyehand;
    const Target far{Eigen::Vector3d(200, 0, 0), 2.5};
    const auto out = reach::reach(*t.gaze, eh.eyehand, eh.arm, t.robot, RobotState{}, far, t.config);
    CHECK_FALSE(out.success);
    CHECK((out.reason == ReachFailure::NotFound || out.error_cm > 3.0));

    std::mt19937_64 rng(8);
    for (int i = 0; i < 40; ++i) {
        const Eigen::Vector3d p = grasp_point(t.robot, random_arm_pose(t.robot, RobotState{}, rng));
        const Target target{p, 2.5};
        const auto a = reach::reach(*t.gaze, eh.eyehand, eh.arm, t.robot, RobotState{}, target, t.config);
        const auto b = reach::reach(*t.gaze, eh.eyehand, eh.arm, t.robot, RobotState{}, target, t.config);
        CHECK(a.error_cm == b.error_cm);
        CHECK(a.final_state == b.final_state);
        CHECK(a.success == (a.reason == ReachFailure::None && a.error_cm <= 3.0));
        if (a.success) CHECK(a.error_cm <= 3.0);
        CHECK(a.error_cm == doctest::Approx((a.grasp - p).norm()));
    }
}

TEST_CASE("transfer and adaptation guard their inputs and leave originals untouched") {
    const auto& t = trained();
    CHECK_THROWS_AS(train_eyehand(t.triplets, *t.gaze, t.arm_data, t.config, 1), InvalidArgument);
    CHECK_THROWS_AS(train_eyehand({}, *t.arm, t.arm_data, t.config, 1), InvalidArgument);

    const auto eyehand_before = t.eyehand->eyehand;
    const auto arm_before = t.eyehand->arm;
    CHECK_THROWS_AS(adapt(t.eyehand->eyehand, t.eyehand->arm, {}, t.arm_data, t.config, 1), InvalidArgument);

    std::vector<EyeHandTriplet> locked(t.triplets.begin(), t.triplets.begin() + std::min<std::size_t>(40, t.triplets.size()));
    const auto adapted = adapt(t.eyehand->eyehand, t.eyehand->arm, locked, t.arm_data, t.config, 2);
    CHECK(t.eyehand->eyehand == eyehand_before);
    CHECK(t.eyehand->arm == arm_before);
    CHECK(adapted.eyehand.table.count_a() == adapted.eyehand.sensory.size());
    CHECK(adapted.eyehand.table.count_b() == adapted.eyehand.motor.size());
    CHECK(adapted.arm.table.count_a() == adapted.arm.sensory.size());
    CHECK(adapted.eyehand.sensory == adapted.arm.sensory);
}

TEST_CASE("stage bundles round-trip through a directory") {
    const auto& t = trained();
    const auto dir = (fs::temp_directory_path() / "reach_bundle_test").string();
    fs::remove_all(dir);
    CHECK_FALSE(StageModel::exists(dir, Stage::Gaze));
    CHECK_THROWS_AS(StageModel::load(dir, Stage::Gaze), FormatError);

    StageModel g = *t.gaze;
    g.provenance.config_digest = "abc";
    g.save(dir);
    CHECK(StageModel::exists(dir, Stage::Gaze));
    CHECK(StageModel::load(dir, Stage::Gaze) == g);

    t.eyehand->eyehand.save(dir);
    CHECK(StageModel::load(dir, Stage::EyeHand) == t.eyehand->eyehand);
    fs::remove_all(dir);

    CHECK(parse_stage("arm") == Stage::Arm);
    CHECK_THROWS_AS(parse_stage("legs"), InvalidArgument);
    CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
    CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
}
