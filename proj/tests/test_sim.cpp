#include "doctest.h"

#include "vborder/errors.hpp"
#include "vborder/lab.hpp"
#include "vborder/sim.hpp"

#include <cmath>
#include <memory>

using namespace vborder;

namespace {

std::shared_ptr<const OccupancyGrid> open_room()
{
    return std::make_shared<const OccupancyGrid>(make_walled_room(6.1, 3.5, 0.025, 0.05));
}

/* Closed-form constant-twist arc */
Pose2 arc(Pose2 p, double v, double w, double t)
{
    if (w == 0.0)
        return Pose2(p.x + v * t * std::cos(p.theta), p.y + v * t * std::sin(p.theta), p.theta);
    const double r = v / w;
    return Pose2(p.x + r * (std::sin(p.theta + w * t) - std::sin(p.theta)),
                 p.y - r * (std::cos(p.theta + w * t) - std::cos(p.theta)), p.theta + w * t);
}

} // namespace

TEST_CASE("unicycle integration examples")
{
    const Pose2 a = integrate_unicycle(Pose2(0, 0, 0), 0.1, 0.0, 1.0);
    CHECK(a.x == doctest::Approx(0.1));
    CHECK(a.y == doctest::Approx(0.0));
    const Pose2 b = integrate_unicycle(Pose2(0, 0, 0), 0.0, M_PI / 2, 1.0);
    CHECK(b.theta == doctest::Approx(M_PI / 2));
    CHECK(b.x == 0.0);

    Pose2 p(0, 0, 0);
    for (int k = 0; k < 100; ++k)
        p = integrate_unicycle(p, 0.1, 0.1, 0.1);
    const Pose2 exact = arc(Pose2(0, 0, 0), 0.1, 0.1, 10.0);
    CHECK(std::hypot(p.x - exact.x, p.y - exact.y) < 1e-2);
    CHECK(std::abs(normalize_angle(p.theta - exact.theta)) < 1e-9);
}

TEST_CASE("relative_step and compose are inverse")
{
    const Pose2 a(1.0, -2.0, 0.7), b(1.3, -1.6, 1.1);
    const OdometryStep s = relative_step(a, b, 0.05);
    const Pose2 c = compose(a, s);
    CHECK(c.x == doctest::Approx(b.x));
    CHECK(c.y == doctest::Approx(b.y));
    CHECK(c.theta == doctest::Approx(b.theta));
}

TEST_CASE("observe_marker")
{
    CameraModel cam;
    cam.height = 0.3;
    const auto ahead = observe_marker(Pose2(0, 0, 0), MarkerId::Blue, { 1.0, 0.0 }, cam, 2.0);
    REQUIRE(ahead);
    CHECK(ahead->slant_distance == doctest::Approx(std::sqrt(1.0 + 0.09)).epsilon(1e-12));
    CHECK(ahead->slant_distance == doctest::Approx(1.0440).epsilon(1e-4));
    CHECK(ahead->bearing == doctest::Approx(0.0));
    CHECK(ahead->id == MarkerId::Blue);
    CHECK(ahead->timestamp == 2.0);

    CHECK_FALSE(observe_marker(Pose2(0, 0, 0), MarkerId::Blue, { -1.0, 0.0 }, cam, 0));
    cam.max_range = 3.0;
    CHECK_FALSE(observe_marker(Pose2(0, 0, 0), MarkerId::Blue, { 10.0, 0.0 }, cam, 0));

    const auto left = observe_marker(Pose2(0, 0, M_PI / 2), MarkerId::Red, { -0.5, 1.0 }, cam, 0);
    REQUIRE(left);
    CHECK(left->bearing == doctest::Approx(std::atan2(0.5, 1.0)));
}

TEST_CASE("follow_controller")
{
    CameraModel cam;
    SimConfig cfg;
    auto obs = [&](double ground, double bearing) {
        return MarkerObservation{ MarkerId::Green, std::hypot(ground, cam.height), bearing, 0.0 };
    };
    const MotionCommand stop = follow_controller(obs(cfg.follow_stop_distance, 0.0), cam, cfg);
    CHECK(stop.v == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(stop.omega == 0.0);

    cfg.follow_gain = 0.5;
    const MotionCommand far = follow_controller(obs(2.0, 0.0), cam, cfg);
    CHECK(far.v == doctest::Approx(0.3));

    const MotionCommand turn = follow_controller(obs(2.0, 1.0), cam, cfg);
    CHECK(turn.v == 0.0);
    CHECK(turn.omega > 0.0);
    CHECK(turn.omega <= cfg.omega_max);

    const MotionCommand near = follow_controller(obs(0.2, 0.0), cam, cfg);
    CHECK(near.v == 0.0);
    const MotionCommand mid = follow_controller(obs(0.5, -0.2), cam, cfg);
    CHECK(mid.v == doctest::Approx(0.05));
    CHECK(mid.omega == doctest::Approx(-0.4));
}

TEST_CASE("robot converges on a stationary marker and stops")
{
    World w(open_room(), Pose2(1.0, 1.0, 0.3));
    w.place_marker(MarkerId::Green, { 3.5, 2.0 });
    double max_v = 0.0, max_w = 0.0;
    for (int k = 0; k < 2000; ++k) {
        const StepReport r = w.step();
        max_v = std::max(max_v, std::abs(r.command.v));
        max_w = std::max(max_w, std::abs(r.command.omega));
    }
    const double g = distance(w.robot().pose.position(), { 3.5, 2.0 });
    CHECK(g >= 0.4 - 1e-3);
    CHECK(g <= 0.41);
    CHECK(max_v <= 0.3);
    CHECK(max_w <= 1.0);
    CHECK(w.step().command.v == doctest::Approx(0.0).epsilon(1e-3));
    CHECK(w.session().state() == TeachingState::Start);
    CHECK(w.time() == doctest::Approx(2001 * 0.05));
}

TEST_CASE("noiseless run records ground-truth poses")
{
    World w(open_room(), Pose2(1.0, 1.0, 0.0));
    w.place_marker(MarkerId::Blue, { 2.0, 1.0 });
    std::vector<Pose2> truth;
    for (int k = 0; k < 100; ++k) {
        w.step();
        truth.push_back(w.robot().pose);
    }
    const auto h = w.session().history().entries();
    REQUIRE(h.size() >= 99);
    CHECK(h.front().time == 0.0);
    CHECK(h.front().pose == Pose2(1.0, 1.0, 0.0));
    for (const TimedPose& e : h.subspan(1)) {
        const std::size_t k = static_cast<std::size_t>(std::lround(e.time / 0.05)) - 1;
        REQUIRE(e.pose == truth[k]);
    }
}

TEST_CASE("collision halts the robot without touching the session")
{
    World w(open_room(), Pose2(0.3, 1.75, M_PI));
    w.place_marker(MarkerId::Blue, { -1.0, 1.75 });
    std::size_t hits = 0;
    for (int k = 0; k < 200; ++k)
        hits += w.step().collision;
    CHECK(hits > 0);
    CHECK(w.collisions() == hits);
    CHECK(w.robot().pose.x >= 0.05);
    CHECK(w.session().state() == TeachingState::Record);
}

TEST_CASE("same seed, same noisy trajectory")
{
    SimConfig cfg;
    cfg.odometry_noise_translation = 0.05;
    cfg.odometry_noise_rotation = 0.05;
    cfg.localization_noise_xy = 0.02;
    cfg.localization_noise_theta = 0.02;
    World a(open_room(), Pose2(1, 1, 0), cfg, {}, {}, 42), b(open_room(), Pose2(1, 1, 0), cfg, {}, {}, 42),
        c(open_room(), Pose2(1, 1, 0), cfg, {}, {}, 43);
    for (World* w : { &a, &b, &c })
        w->place_marker(MarkerId::Blue, { 4, 2 });
    for (int k = 0; k < 300; ++k) {
        a.step();
        b.step();
        c.step();
    }
    CHECK(a.robot().estimated_pose == b.robot().estimated_pose);
    CHECK(a.robot().odometry_pose == b.robot().odometry_pose);
    CHECK_FALSE(a.robot().estimated_pose == c.robot().estimated_pose);
    CHECK_FALSE(a.robot().estimated_pose == a.robot().pose);
}

TEST_CASE("a resting robot keeps a constant noisy estimate")
{
    SimConfig cfg;
    cfg.localization_noise_xy = 0.02;
    cfg.localization_noise_theta = 0.02;
    World w(open_room(), Pose2(1, 1, 0), cfg, {}, {}, 9);
    for (int k = 0; k < 10; ++k)
        w.step();
    const Pose2 est = w.robot().estimated_pose;
    for (int k = 0; k < 100; ++k)
        w.step();
    CHECK(w.robot().estimated_pose == est);
}

TEST_CASE("sim config validation")
{
    SimConfig c;
    c.timestep = 0.0;
    CHECK_THROWS_AS(c.validate(), ValueError);
    c = SimConfig{};
    c.follow_stop_distance = -1;
    CHECK_THROWS_AS(c.validate(), ValueError);
}
