#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "reach/dataset.hpp"
#include "reach/error.hpp"

using namespace reach;

namespace {

BabbleConfig small(int iterations) {
    BabbleConfig b;
    b.iterations = iterations;
    return b;
}

bool within_limits(const KinematicModel& m, const ArmAngles& q) {
    for (int j = 0; j < kArmJoints; ++j)
        if (!m.arm_limits[j].contains(q[j])) return false;
    return true;
}

// Unconstrained head angles that put p on the optical axis.
HeadAngles exact_centring(const KinematicModel& m, const Eigen::Vector3d& p) {
    HeadAngles h{0.0, 0.0};
    for (int it = 0; it < 200; ++it) {
        const Eigen::Vector3d c = camera_pose(m, h).inverse() * p;
        h[0] += std::atan2(c.y(), c.x()) * 180.0 / M_PI;
        h[1] += std::atan2(-c.z(), std::hypot(c.x(), c.y())) * 180.0 / M_PI;
    }
    return h;
}

} // namespace

TEST_CASE("gaze babbling yields six samples per iteration and undoes itself") {
    const KinematicModel m;
    const auto d = gen_gaze_dataset(m, small(200), 3);
    CHECK(static_cast<int>(d.samples.size()) + d.discarded == 200 * 6);
    REQUIRE(d.replay.size() == d.samples.size());

    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        const auto& s = d.samples[i];
        const auto& r = d.replay[i];
        CHECK(s.s_head.x() >= 0.0);
        CHECK(s.s_head.x() <= 80.0);
        CHECK(s.s_head.y() >= 0.0);
        CHECK(s.s_head.y() <= 60.0);
        CHECK(std::abs(s.m_delta_head_inv[0]) <= 15.0);
        CHECK(std::abs(s.m_delta_head_inv[1]) <= 15.0);
        CHECK(m.head_limits[0].contains(r.head[0]));
        CHECK(m.head_limits[1].contains(r.head[1]));

        RobotState st;
        st.head = r.head;
        const Target t{r.target, m.ball_radius};
        CHECK((*perceive_target(m, st, t).centroid - s.s_head).norm() == 0.0);
        const auto back = apply_motor(m, st, JointGroup::Head, s.m_delta_head_inv, CommandMode::Relative).state;
        const auto seen = perceive_target(m, back, t);
        REQUIRE(seen.visible());
        CHECK(centering_error(m, *seen.centroid) <= 2.0);
    }
}

TEST_CASE("arm babbling records exact forward kinematics inside the limits") {
    const KinematicModel m;
    const auto d = gen_arm_dataset(m, small(100), 4);
    CHECK(d.size() == 100u * 15u);
    for (const auto& s : d) {
        CHECK(within_limits(m, s.m_arm));
        CHECK(s.s_arm == forward_kinematics(m, s.m_arm));
    }
    // Every 15th sample is a babbled endpoint; the ones between lie on the joint-space segment.
    for (std::size_t i = 15; i + 15 <= d.size(); i += 15) {
        const auto& from = d[i - 1].m_arm;
        const auto& to = d[i + 14].m_arm;
        for (int k = 0; k < 14; ++k)
            for (int j = 0; j < kArmJoints; ++j) {
                const double t = (k + 1) / 15.0;
                CHECK(d[i + k].m_arm[j] == doctest::Approx(from[j] + t * (to[j] - from[j])));
            }
    }
}

TEST_CASE("datasets are reproducible from the seed") {
    const KinematicModel m;
    CHECK(dataset_digest(to_dataset(gen_gaze_dataset(m, small(50), 9).samples)) ==
          dataset_digest(to_dataset(gen_gaze_dataset(m, small(50), 9).samples)));
    CHECK(dataset_digest(to_dataset(gen_arm_dataset(m, small(50), 9))) ==
          dataset_digest(to_dataset(gen_arm_dataset(m, small(50), 9))));
    CHECK(dataset_digest(to_dataset(gen_arm_dataset(m, small(50), 9))) !=
          dataset_digest(to_dataset(gen_arm_dataset(m, small(50), 10))));
    CHECK_THROWS_AS(gen_gaze_dataset(m, small(-1), 1), InvalidArgument);
}

TEST_CASE("eye-hand capture with an exact controller") {
    const KinematicModel m;
    const AnalyticGazeController oracle(m);
    const int iterations = 300;
    const auto d = gen_eyehand_dataset(m, small(iterations), oracle, 12);
    CHECK(static_cast<int>(d.triplets.size()) + d.cancelled == iterations);

    for (const auto& t : d.triplets) {
        CHECK(t.centroid_error <= kCenteringTolerancePx);
        CHECK(t.s_arm == forward_kinematics(m, t.m_arm));
        RobotState s;
        s.head = t.m_head;
        s.arm = t.m_arm;
        const auto seen = perceive_target(m, s, place_ball_in_hand(m, s));
        REQUIRE(seen.visible());
        CHECK(centering_error(m, *seen.centroid) <= kCenteringTolerancePx);
    }

    // Replay the pose stream. A pose is recoverable when the clamped exact
    // centring pose sees the ball within tolerance.
    std::mt19937_64 rng(12);
    int recoverable = 0;
    for (int i = 0; i < iterations; ++i) {
        RobotState s;
        s.arm = random_arm_pose(m, RobotState{}, rng);
        const Target ball = place_ball_in_hand(m, s);
        s.head = {m.head_limits[0].clamp(exact_centring(m, ball.position)[0]),
                  m.head_limits[1].clamp(exact_centring(m, ball.position)[1])};
        const auto seen = perceive_target(m, s, ball);
        if (seen.visible() && centering_error(m, *seen.centroid) <= kCenteringTolerancePx) ++recoverable;
    }
    CHECK(static_cast<int>(d.triplets.size()) == recoverable);
}

TEST_CASE("environment-change capture keeps the rotation joint at zero") {
    const KinematicModel m;
    const AnalyticGazeController oracle(m);
    const auto d = gen_envchange_dataset(m, small(kEnvChangeIterations), oracle, 13);
    CHECK(d.triplets.size() <= static_cast<std::size_t>(kEnvChangeIterations));
    CHECK(d.triplets.size() > 0u);

    // Locked reachable set: same shoulder yaw/pitch and elbow, zero rotation.
    for (const auto& t : d.triplets) {
        CHECK(t.m_arm[kUpperArmRotation] == 0.0);
        CHECK(within_limits(m, t.m_arm));
        ArmAngles q = t.m_arm;
        q[kUpperArmRotation] = 0.0;
        CHECK(t.s_arm == forward_kinematics(m, q));
    }
}

TEST_CASE("dataset files round-trip and reject malformed input") {
    const KinematicModel m;
    const auto arm = gen_arm_dataset(m, small(5), 1);
    std::stringstream buf;
    write_dataset(buf, to_dataset(arm));
    const auto back = read_dataset(buf);
    CHECK(back == to_dataset(arm));
    const auto samples = arm_samples(back);
    REQUIRE(samples.size() == arm.size());
    for (std::size_t i = 0; i < arm.size(); ++i) {
        CHECK(samples[i].s_arm == arm[i].s_arm);
        CHECK(samples[i].m_arm == arm[i].m_arm);
    }
    CHECK(back.fields[0].units == "cm");
    CHECK_THROWS_AS(back.field("nope"), InvalidArgument);

    std::stringstream no_header("1 2 3\n");
    CHECK_THROWS_AS(read_dataset(no_header), FormatError);
    std::stringstream short_row(
        "#{\"format\":\"reach-dataset\",\"version\":1,\"modality\":\"x\",\"fields\":[{\"name\":\"a\",\"units\":\"cm\","
        "\"dim\":2}]}\n1\n");
    CHECK_THROWS_AS(read_dataset(short_row), FormatError);
    std::stringstream wrong_count(
        "#{\"format\":\"reach-dataset\",\"version\":1,\"modality\":\"x\",\"records\":2,\"fields\":[{\"name\":\"a\","
        "\"units\":\"cm\",\"dim\":1}]}\n1\n");
    CHECK_THROWS_AS(read_dataset(wrong_count), FormatError);

    const auto gaze = gen_gaze_dataset(m, small(5), 2).samples;
    std::stringstream g;
    write_dataset(g, to_dataset(gaze));
    const auto gback = gaze_samples(read_dataset(g));
    REQUIRE(gback.size() == gaze.size());
    CHECK(gback[3].s_head == gaze[3].s_head);
    CHECK(gback[3].m_delta_head_inv == gaze[3].m_delta_head_inv);
}
