#include "vborder/sim.hpp"

#include "vborder/errors.hpp"

#include <algorithm>
#include <cmath>

namespace vborder {

void SimConfig::validate() const
{
    if (!(timestep > 0.0))
        throw ValueError("timestep must be positive");
    if (!(follow_stop_distance > 0.0))
        throw ValueError("follow_stop_distance must be positive");
    if (!(v_max > 0.0) || !(omega_max > 0.0))
        throw ValueError("speed limits must be positive");
    if (!(follow_gain > 0.0) || !(turn_gain > 0.0))
        throw ValueError("controller gains must be positive");
    if (odometry_noise_translation < 0.0 || odometry_noise_rotation < 0.0 ||
        localization_noise_xy < 0.0 || localization_noise_theta < 0.0)
        throw ValueError("noise levels must be non-negative");
    if (!(localization_correlation_length > 0.0))
        throw ValueError("localization_correlation_length must be positive");
}

OdometryStep relative_step(const Pose2& from, const Pose2& to, double duration)
{
    const double c = std::cos(from.theta);
    const double s = std::sin(from.theta);
    const double wx = to.x - from.x;
    const double wy = to.y - from.y;
    return { c * wx + s * wy, -s * wx + c * wy, normalize_angle(to.theta - from.theta), duration };
}

Pose2 compose(const Pose2& pose, const OdometryStep& step)
{
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    return { pose.x + c * step.dx - s * step.dy, pose.y + s * step.dx + c * step.dy,
             pose.theta + step.dtheta };
}

Pose2 integrate_unicycle(const Pose2& pose, double v, double omega, double dt)
{
    if (std::abs(omega) < 1e-12)
        return { pose.x + v * std::cos(pose.theta) * dt, pose.y + v * std::sin(pose.theta) * dt,
                 pose.theta };
    const double radius = v / omega;
    const double theta1 = pose.theta + omega * dt;
    return { pose.x + radius * (std::sin(theta1) - std::sin(pose.theta)),
             pose.y - radius * (std::cos(theta1) - std::cos(pose.theta)), theta1 };
}

std::optional<MarkerObservation> observe_marker(const Pose2& robot, MarkerId id, Point2 marker,
                                                const CameraModel& camera, double timestamp)
{
    const double dx = marker.x - robot.x;
    const double dy = marker.y - robot.y;
    const double ground = std::hypot(dx, dy);
    const double slant = std::hypot(ground, camera.height);
    const double bearing = ground > 0.0 ? normalize_angle(std::atan2(dy, dx) - robot.theta) : 0.0;

    if (slant < camera.min_range || slant > camera.max_range)
        return std::nullopt;
    if (std::abs(bearing) > camera.fov_half_angle)
        return std::nullopt;
    return MarkerObservation{ id, slant, bearing, timestamp };
}

MotionCommand follow_controller(const MarkerObservation& observation, const CameraModel& camera,
                                const SimConfig& config)
{
    MotionCommand cmd;
    cmd.omega = std::clamp(config.turn_gain * observation.bearing, -config.omega_max, config.omega_max);
    if (std::abs(observation.bearing) > config.rotate_first_bearing)
        return cmd;

    const double g = ground_distance(observation.slant_distance, camera.height);
    if (g > config.follow_stop_distance)
        cmd.v = std::min(config.follow_gain * (g - config.follow_stop_distance), config.v_max);
    return cmd;
}

World::World(std::shared_ptr<const OccupancyGrid> prior, const Pose2& initial_pose, SimConfig sim,
             CameraModel camera, TeachingConfig teaching, std::uint64_t seed)
    : prior_(std::move(prior)), sim_(sim), camera_(camera),
      session_(std::move(teaching), camera), rng_(seed)
{
    if (!prior_)
        throw ValueError("world requires a prior map");
    sim_.validate();
    robot_.pose = initial_pose;
    robot_.odometry_pose = initial_pose;
    robot_.estimated_pose = initial_pose;
}

void World::place_marker(MarkerId id, Point2 position)
{
    marker_ = PlacedMarker{ id, position };
}

void World::remove_marker()
{
    marker_.reset();
}

bool World::blocked(const Pose2& pose) const
{
    const GridSpec& spec = prior_->spec();
    const double u = std::floor((pose.x - spec.origin_x) / spec.resolution);
    const double v = std::floor((pose.y - spec.origin_y) / spec.resolution);
    if (!(u >= 0.0 && u < spec.width && v >= 0.0 && v < spec.height))
        return true;
    const double value = prior_->at(static_cast<int>(u), static_cast<int>(v));
    return value != kUnknown && value > Thresholds{}.occupied;
}

void World::update_estimate(const Pose2& previous)
{
    const OdometryStep truth = relative_step(previous, robot_.pose, sim_.timestep);
    const double trans = std::hypot(truth.dx, truth.dy);
    const double rot = std::abs(truth.dtheta);

    std::normal_distribution<double> normal(0.0, 1.0);
    OdometryStep measured = truth;
    measured.dx += sim_.odometry_noise_translation * std::sqrt(trans) * normal(rng_);
    measured.dy += sim_.odometry_noise_translation * std::sqrt(trans) * normal(rng_);
    measured.dtheta += sim_.odometry_noise_rotation * std::sqrt(rot) * normal(rng_);
    robot_.odometry_pose = compose(robot_.odometry_pose, measured);

    if (!sim_.localization_correction) {
        robot_.estimated_pose = robot_.odometry_pose;
        return;
    }

    /* First-order Gauss-Markov localization error driven by travelled motion;
     * a robot standing still keeps its estimate. */
    const double motion = trans + 0.2 * rot;
    const double keep = std::exp(-motion / sim_.localization_correlation_length);
    const double fresh = std::sqrt(1.0 - keep * keep);
    localization_error_.x = keep * localization_error_.x + fresh * sim_.localization_noise_xy * normal(rng_);
    localization_error_.y = keep * localization_error_.y + fresh * sim_.localization_noise_xy * normal(rng_);
    localization_error_.theta = keep * localization_error_.theta +
                                fresh * sim_.localization_noise_theta * normal(rng_);
    robot_.estimated_pose = Pose2(robot_.pose.x + localization_error_.x,
                                  robot_.pose.y + localization_error_.y,
                                  robot_.pose.theta + localization_error_.theta);
}

StepReport World::step()
{
    StepReport report;
    const double now = time();
    const bool active = !is_terminal(session_.state());

    if (active) {
        std::optional<MarkerObservation> obs;
        if (marker_)
            obs = observe_marker(robot_.pose, marker_->id, marker_->position, camera_, now);

        TeachingEvent event = obs ? TeachingEvent{ MarkerSeen{ *obs, robot_.estimated_pose } }
                                  : TeachingEvent{ MarkerLost{} };
        try {
            const EventOutcome outcome = session_.handle_event(event);
            if (obs && outcome.follow_target)
                report.command = follow_controller(*obs, camera_, sim_);
            report.events.push_back(std::move(event));
        } catch (const InvalidTransition&) {
            report.rejected = true;
            ++rejected_;
        }
    }

    const Pose2 previous = robot_.pose;
    const Pose2 next = integrate_unicycle(previous, report.command.v, report.command.omega, sim_.timestep);
    if (blocked(next)) {
        report.collision = true;
        ++collisions_;
        report.command = {};
    } else {
        robot_.pose = next;
    }
    robot_.v = report.command.v;
    robot_.omega = report.command.omega;
    update_estimate(previous);

    ++ticks_;
    if (active && !is_terminal(session_.state())) {
        Tick tick{ time(), robot_.estimated_pose };
        session_.handle_event(tick);
        report.events.emplace_back(tick);
    }
    return report;
}

} // namespace vborder
