#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "reach/error.hpp"
#include "reach/gaze.hpp"
#include "reach/robot.hpp"

using namespace reach;

namespace {

using Mat4 = std::array<std::array<double, 4>, 4>;

Mat4 identity() {
    Mat4 m{};
    for (int i = 0; i < 4; ++i) m[i][i] = 1.0;
    return m;
}

Mat4 mul(const Mat4& a, const Mat4& b) {
    Mat4 c{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) c[i][j] += a[i][k] * b[k][j];
    return c;
}

Mat4 trans(double x, double y, double z) {
    Mat4 m = identity();
    m[0][3] = x;
    m[1][3] = y;
    m[2][3] = z;
    return m;
}

double rad(double deg) { return deg * std::numbers::pi / 180.0; }

Mat4 rot_x(double deg) {
    const double c = std::cos(rad(deg)), s = std::sin(rad(deg));
    Mat4 m = identity();
    m[1][1] = c, m[1][2] = -s, m[2][1] = s, m[2][2] = c;
    return m;
}

Mat4 rot_y(double deg) {
    const double c = std::cos(rad(deg)), s = std::sin(rad(deg));
    Mat4 m = identity();
    m[0][0] = c, m[0][2] = s, m[2][0] = -s, m[2][2] = c;
    return m;
}

Mat4 rot_z(double deg) {
    const double c = std::cos(rad(deg)), s = std::sin(rad(deg));
    Mat4 m = identity();
    m[0][0] = c, m[0][1] = -s, m[1][0] = s, m[1][1] = c;
    return m;
}

// Independent homogeneous-matrix chain for the arm.
std::array<double, 3> oracle_fk(const KinematicModel& m, const ArmAngles& q) {
    Mat4 t = trans(m.shoulder.x(), m.shoulder.y(), m.shoulder.z());
    t = mul(t, rot_z(q[0]));
    t = mul(t, rot_y(-q[1]));
    t = mul(t, rot_x(q[2]));
    t = mul(t, trans(m.upper_arm, 0, 0));
    t = mul(t, rot_z(q[3]));
    t = mul(t, trans(m.forearm, 0, 0));
    return {t[0][3], t[1][3], t[2][3]};
}

ArmAngles random_pose(const KinematicModel& m, std::mt19937_64& rng) {
    ArmAngles q{};
    for (int j = 0; j < kArmJoints; ++j)
        q[j] = std::uniform_real_distribution<double>(m.arm_limits[j].min, m.arm_limits[j].max)(rng);
    return q;
}

} // namespace

TEST_CASE("forward kinematics matches an explicit matrix chain") {
    const KinematicModel m;
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const auto q = random_pose(m, rng);
        const auto p = forward_kinematics(m, q);
        const auto o = oracle_fk(m, q);
        CHECK(std::abs(p.x() - o[0]) < 1e-9);
        CHECK(std::abs(p.y() - o[1]) < 1e-9);
        CHECK(std::abs(p.z() - o[2]) < 1e-9);
    }
    const auto rest = forward_kinematics(m, ArmAngles{});
    CHECK(rest.x() == doctest::Approx(30.0));
    CHECK(rest.y() == doctest::Approx(-11.0));
    CHECK(rest.z() == doctest::Approx(0.0));
}

TEST_CASE("shoulder-to-hand distance depends only on the elbow") {
    const KinematicModel m;
    std::mt19937_64 rng(2);
    for (int i = 0; i < 500; ++i) {
        const auto q = random_pose(m, rng);
        const double expect = std::sqrt(m.upper_arm * m.upper_arm + m.forearm * m.forearm +
                                        2 * m.upper_arm * m.forearm * std::cos(rad(q[3])));
        CHECK((forward_kinematics(m, q) - m.shoulder).norm() == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("hand position is Lipschitz in the joint angles") {
    const KinematicModel m;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> step(-2.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        const auto q = random_pose(m, rng);
        ArmAngles r = q;
        double total = 0.0;
        for (int j = 0; j < kArmJoints; ++j) {
            r[j] = m.arm_limits[j].clamp(q[j] + step(rng));
            total += std::abs(rad(r[j] - q[j]));
        }
        CHECK((forward_kinematics(m, q) - forward_kinematics(m, r)).norm() <= m.total_arm_length() * total + 1e-12);
    }
}

TEST_CASE("joint limits are enforced") {
    const KinematicModel m;
    CHECK_THROWS_AS(forward_kinematics(m, ArmAngles{0, 0, 0, -1}), InvalidArgument);
    CHECK_THROWS_AS(forward_kinematics(m, ArmAngles{m.arm_limits[0].max + 1, 0, 0, 0}), InvalidArgument);

    RobotState s;
    const auto r = apply_motor(m, s, JointGroup::Head, std::vector<double>{100.0, -10.0}, CommandMode::Absolute);
    CHECK(r.clamped);
    CHECK(r.state.head[0] == 60.0);
    CHECK(r.state.head[1] == -10.0);
    const auto rel = apply_motor(m, r.state, JointGroup::Head, std::vector<double>{-5.0, -50.0}, CommandMode::Relative);
    CHECK(rel.state.head[0] == 55.0);
    CHECK(rel.state.head[1] == -45.0);
    CHECK_THROWS_AS(apply_motor(m, s, JointGroup::Arm, std::vector<double>{1.0, 2.0}, CommandMode::Absolute),
                    DimensionError);

    s.lock_arm_joint(kUpperArmRotation, 0.0);
    const auto locked = apply_motor(m, s, JointGroup::Arm, std::vector<double>{10, 10, 45, 20}, CommandMode::Absolute);
    CHECK(locked.state.arm[kUpperArmRotation] == 0.0);
    CHECK(locked.state.arm[0] == 10.0);
    CHECK_FALSE(locked.clamped);
}

TEST_CASE("optical axis hits the principal point") {
    const KinematicModel m;
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        const HeadAngles h{std::uniform_real_distribution<double>(-60, 60)(rng),
                           std::uniform_real_distribution<double>(-45, 45)(rng)};
        const auto cam = camera_pose(m, h);
        const Eigen::Vector3d p = cam.translation() + cam.linear().col(0) * 50.0;
        const auto proj = project_point(m, h, p);
        REQUIRE(proj);
        CHECK(proj->x() == doctest::Approx(40.0));
        CHECK(proj->y() == doctest::Approx(30.0));
        RobotState s;
        s.head = h;
        const auto seen = perceive_target(m, s, Target{p, m.ball_radius});
        REQUIRE(seen.visible());
        CHECK(std::abs(seen.centroid->x() - 40.0) <= 0.5);
        CHECK(std::abs(seen.centroid->y() - 30.0) <= 0.5);
    }
}

TEST_CASE("raster centroid agrees with the projected centre") {
    const KinematicModel m;
    std::mt19937_64 rng(5);
    int checked = 0;
    while (checked < 300) {
        RobotState s;
        s.head = {std::uniform_real_distribution<double>(-60, 60)(rng),
                  std::uniform_real_distribution<double>(-45, 45)(rng)};
        const double u = std::uniform_real_distribution<double>(10, 70)(rng);
        const double v = std::uniform_real_distribution<double>(10, 50)(rng);
        const double depth = std::uniform_real_distribution<double>(30, 70)(rng);
        const Eigen::Vector3d ray(1.0, (40.0 - u) / 70.0, (30.0 - v) / 70.0);
        const Eigen::Vector3d p = camera_pose(m, s.head) * (ray * depth);
        const auto proj = project_point(m, s.head, p);
        REQUIRE(proj);
        CHECK(proj->x() == doctest::Approx(u));
        CHECK(proj->y() == doctest::Approx(v));
        const auto seen = perceive_target(m, s, Target{p, m.ball_radius});
        REQUIRE(seen.visible());
        CHECK((*seen.centroid - *proj).norm() <= 1.0);
        ++checked;
    }
    CHECK_FALSE(project_point(m, HeadAngles{}, Eigen::Vector3d(-10, 0, 0)).has_value());
}

TEST_CASE("rendered frames contain only ball and background colours") {
    const KinematicModel m;
    const Frame f = render_frame(m, HeadAngles{}, Target{Eigen::Vector3d(40, -3, 12), 2.5});
    CHECK(f.width == 80);
    CHECK(f.height == 60);
    CHECK(f.rgb.size() == 80u * 60u * 3u);
    const auto p = threshold_centroid(f);
    CHECK(p.visible());
    CHECK(p.pixel_count > 10);
    const Frame empty = render_frame(m, HeadAngles{}, Target{Eigen::Vector3d(-40, 0, 0), 2.5});
    CHECK_FALSE(threshold_centroid(empty).visible());
}

TEST_CASE("scan finds every hand target the head can centre") {
    const KinematicModel m;
    std::mt19937_64 rng(6);
    int found = 0, tried = 0;
    while (tried < 500) {
        const Eigen::Vector3d p = grasp_point(m, random_pose(m, rng));
        if (!centering_head_angles(m, p)) continue;
        ++tried;
        RobotState s;
        s.head = {std::uniform_real_distribution<double>(-60, 60)(rng),
                  std::uniform_real_distribution<double>(-45, 45)(rng)};
        const auto res = scan_for_target(m, s, Target{p, m.ball_radius});
        if (res) {
            ++found;
            CHECK(perceive_target(m, res->state, Target{p, m.ball_radius}).visible());
        }
    }
    CHECK(found == tried);
    CHECK_FALSE(scan_for_target(m, RobotState{}, Target{Eigen::Vector3d(-50, 0, 0), 2.5}).has_value());
}

TEST_CASE("analytic gaze controller centres visible targets") {
    const KinematicModel m;
    const AnalyticGazeController ctl(m);
    const auto zero = ctl.correction(Eigen::Vector2d(40, 30));
    CHECK(zero[0] == doctest::Approx(0.0));
    CHECK(zero[1] == doctest::Approx(0.0));

    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Vector3d p = grasp_point(m, random_pose(m, rng));
        const auto h = centering_head_angles(m, p);
        if (!h) continue;
        RobotState s;
        s.head = *h;
        const auto seen = perceive_target(m, s, Target{p, m.ball_radius});
        REQUIRE(seen.visible());
        CHECK(centering_error(m, *seen.centroid) <= 1.0);

        RobotState start;
        const auto scan = scan_for_target(m, start, Target{p, m.ball_radius});
        REQUIRE(scan);
        const auto res = center_gaze(m, scan->state, Target{p, m.ball_radius}, ctl);
        CHECK(res.centered);
        CHECK(res.pixel_error <= kCenteringTolerancePx);
    }
}
