#pragma once

#include "vborder/geometry.hpp"
#include "vborder/gridmap.hpp"
#include "vborder/teaching.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace vborder {

struct RobotState
{
    /* ground-truth map-frame pose */
    Pose2 pose;
    /* dead-reckoned pose integrated from noisy odometry steps */
    Pose2 odometry_pose;
    /* map-frame pose reported by localization, the one the session records */
    Pose2 estimated_pose;
    double v = 0.0;
    double omega = 0.0;
};

/// Motion between two consecutive poses, expressed in the earlier robot frame.
struct OdometryStep
{
    double dx = 0.0;
    double dy = 0.0;
    double dtheta = 0.0;
    double duration = 0.0;
};

OdometryStep relative_step(const Pose2& from, const Pose2& to, double duration);
Pose2 compose(const Pose2& pose, const OdometryStep& step);

struct SimConfig
{
    double timestep = 0.05;
    double v_max = 0.3;
    double omega_max = 1.0;
    /* ground-plane distance at which the follower stops */
    double follow_stop_distance = 0.4;
    /* linear speed per metre of distance beyond the stop distance, 1/s */
    double follow_gain = 1.0;
    /* angular speed per radian of bearing, 1/s */
    double turn_gain = 2.0;
    /* above this |bearing| the robot turns in place */
    double rotate_first_bearing = 0.5;

    /* odometry noise std: metres per sqrt(metre), radians per sqrt(radian) */
    double odometry_noise_translation = 0.0;
    double odometry_noise_rotation = 0.0;

    /* true: the session sees the localized map-frame pose, false: raw odometry */
    bool localization_correction = true;
    /* steady-state std of the localization error, updated only while moving */
    double localization_noise_xy = 0.0;
    double localization_noise_theta = 0.0;
    /* motion over which the localization error decorrelates, metres */
    double localization_correlation_length = 0.5;

    void validate() const;
};

struct MotionCommand
{
    double v = 0.0;
    double omega = 0.0;
};

/* Exact constant-twist motion over dt */
Pose2 integrate_unicycle(const Pose2& pose, double v, double omega, double dt);

/* Observation of a marker on the ground, or nullopt when outside the camera's
 * range or field of view */
std::optional<MarkerObservation> observe_marker(const Pose2& robot, MarkerId id, Point2 marker,
                                                const CameraModel& camera, double timestamp);

/* Turn towards the marker and close the distance down to the stop distance */
MotionCommand follow_controller(const MarkerObservation& observation, const CameraModel& camera,
                                const SimConfig& config);

struct PlacedMarker
{
    MarkerId id = MarkerId::Green;
    Point2 position;
};

struct StepReport
{
    std::vector<TeachingEvent> events;
    MotionCommand command;
    bool collision = false;
    /* an event the session refused with InvalidTransition */
    bool rejected = false;
};

/// One robot, one marker and one teaching session advanced in fixed steps.
/// Time is k * timestep after k steps.
class World
{
public:
    World(std::shared_ptr<const OccupancyGrid> prior, const Pose2& initial_pose,
          SimConfig sim = {}, CameraModel camera = {}, TeachingConfig teaching = {},
          std::uint64_t seed = 0);

    void place_marker(MarkerId id, Point2 position);
    void remove_marker();

    /* Observe, control, integrate and emit Tick; a collision halts the robot
     * for this step without touching the session */
    StepReport step();

    double time() const { return static_cast<double>(ticks_) * sim_.timestep; }
    std::uint64_t ticks() const { return ticks_; }

    const RobotState& robot() const { return robot_; }
    const TeachingSession& session() const { return session_; }
    const std::optional<PlacedMarker>& marker() const { return marker_; }
    const OccupancyGrid& prior() const { return *prior_; }
    const SimConfig& sim_config() const { return sim_; }
    const CameraModel& camera() const { return camera_; }

    std::size_t collisions() const { return collisions_; }
    std::size_t rejected_events() const { return rejected_; }

private:
    bool blocked(const Pose2& pose) const;
    void update_estimate(const Pose2& previous);

    std::shared_ptr<const OccupancyGrid> prior_;
    SimConfig sim_;
    CameraModel camera_;
    TeachingSession session_;
    RobotState robot_;
    std::optional<PlacedMarker> marker_;
    std::mt19937_64 rng_;
    Pose2 localization_error_;
    std::uint64_t ticks_ = 0;
    std::size_t collisions_ = 0;
    std::size_t rejected_ = 0;
};

} // namespace vborder
