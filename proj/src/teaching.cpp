#include "vborder/teaching.hpp"

#include "vborder/errors.hpp"

#include <cmath>

namespace vborder {

const char* to_string(TeachingState state)
{
    switch (state) {
    case TeachingState::Start: return "Start";
    case TeachingState::Record: return "Record";
    case TeachingState::KeepOff: return "KeepOff";
    case TeachingState::Finished: return "Finished";
    case TeachingState::Cancelled: return "Cancelled";
    }
    return "?";
}

const char* to_string(MarkerId id)
{
    switch (id) {
    case MarkerId::Green: return "green";
    case MarkerId::Blue: return "blue";
    case MarkerId::Red: return "red";
    }
    return "?";
}

std::optional<MarkerId> parse_marker_id(const std::string& text)
{
    if (text == "green") return MarkerId::Green;
    if (text == "blue") return MarkerId::Blue;
    if (text == "red") return MarkerId::Red;
    return std::nullopt;
}

std::optional<TeachingState> parse_teaching_state(const std::string& text)
{
    for (auto s : { TeachingState::Start, TeachingState::Record, TeachingState::KeepOff,
                    TeachingState::Finished, TeachingState::Cancelled })
        if (text == to_string(s))
            return s;
    return std::nullopt;
}

void TeachingConfig::validate() const
{
    if (!(finish_timeout > 0.0))
        throw ValueError("finish_timeout must be positive");
    if (!(idle_translation > 0.0) || !(idle_rotation > 0.0))
        throw ValueError("idle motion thresholds must be positive");
    if (!(extraction.min_spacing >= 0.0) || !(extraction.min_area >= 0.0))
        throw ValueError("polygon extraction parameters must be non-negative");
}

VirtualBorder make_virtual_border(BorderPolygon polygon, Point2 marker_position)
{
    const bool inside = point_in_polygon(marker_position.x, marker_position.y, polygon);
    return { std::move(polygon), marker_position, inside };
}

TeachingSession::TeachingSession(TeachingConfig config, CameraModel camera)
    : config_(std::move(config)), camera_(camera)
{
    config_.validate();
    camera_.validate();
}

EventOutcome TeachingSession::handle_event(const TeachingEvent& event)
{
    if (is_terminal(state_))
        throw InvalidTransition(std::string("session is ") + to_string(state_) +
                                "; no further events are accepted");

    if (const auto* seen = std::get_if<MarkerSeen>(&event))
        return on_marker(*seen);
    if (const auto* tick = std::get_if<Tick>(&event))
        return on_tick(*tick);
    return {};
}

EventOutcome TeachingSession::on_marker(const MarkerSeen& seen)
{
    const MarkerObservation& obs = seen.observation;
    const double now = obs.timestamp;

    switch (state_) {
    case TeachingState::Start:
        if (obs.id == MarkerId::Green)
            return { follow_point(seen), false };
        if (obs.id == MarkerId::Blue) {
            state_ = TeachingState::Record;
            record_start_ = now;
            record(now, seen.robot);
            return { follow_point(seen), true };
        }
        /* Red before recording has no edge: the robot just waits */
        return {};

    case TeachingState::Record:
        if (obs.id == MarkerId::Green) {
            cancel();
            return { std::nullopt, true };
        }
        record(now, seen.robot);
        if (obs.id == MarkerId::Red) {
            state_ = TeachingState::KeepOff;
            record_end_ = now;
            idle_since_ = now;
            idle_anchor_ = seen.robot;
            store_marker(seen);
            return { follow_point(seen), true };
        }
        return { follow_point(seen), false };

    case TeachingState::KeepOff:
        if (obs.id == MarkerId::Green) {
            cancel();
            return { std::nullopt, true };
        }
        if (obs.id == MarkerId::Blue)
            throw InvalidTransition("recording cannot resume once the keep-off phase started");
        store_marker(seen);
        return { follow_point(seen), false };

    default:
        break;
    }
    return {};
}

EventOutcome TeachingSession::on_tick(const Tick& tick)
{
    if (state_ == TeachingState::Record) {
        record(tick.now, tick.robot);
        return {};
    }
    if (state_ != TeachingState::KeepOff)
        return {};

    const double moved = distance(tick.robot.position(), idle_anchor_.position());
    const double turned = std::abs(normalize_angle(tick.robot.theta - idle_anchor_.theta));
    if (moved >= config_.idle_translation || turned >= config_.idle_rotation) {
        idle_anchor_ = tick.robot;
        idle_since_ = tick.now;
        return {};
    }
    /* absorbs rounding in accumulated simulated time */
    constexpr double kTimeTol = 1e-9;
    if (tick.now - *idle_since_ >= config_.finish_timeout - kTimeTol) {
        state_ = TeachingState::Finished;
        finished_at_ = tick.now;
        return { std::nullopt, true };
    }
    return {};
}

void TeachingSession::record(double time, const Pose2& pose)
{
    if (history_.empty() || time > history_.back().time)
        history_.append(time, pose);
}

std::optional<Point2> TeachingSession::follow_point(const MarkerSeen& seen) const
{
    const MarkerObservation& obs = seen.observation;
    if (obs.slant_distance < camera_.height)
        return std::nullopt;
    const double g = ground_distance(obs.slant_distance, camera_.height);
    const double heading = seen.robot.theta + obs.bearing;
    return Point2{ seen.robot.x + g * std::cos(heading), seen.robot.y + g * std::sin(heading) };
}

void TeachingSession::store_marker(const MarkerSeen& seen)
{
    if (seen.observation.slant_distance < camera_.height)
        return;
    marker_position_ = marker_ground_position(seen.robot, camera_, seen.observation.slant_distance);
}

void TeachingSession::cancel()
{
    state_ = TeachingState::Cancelled;
    history_.clear();
    marker_position_.reset();
}

double TeachingSession::closure_gap() const
{
    if (history_.empty())
        return 0.0;
    return distance(history_.back().pose.position(), history_.front().pose.position());
}

VirtualBorder TeachingSession::finalize() const
{
    if (state_ != TeachingState::Finished)
        throw InvalidTransition(std::string("cannot finalize a session in state ") + to_string(state_));
    BorderPolygon polygon = polygon_from_history(history_, config_.extraction);
    if (!marker_position_)
        throw MissingMarker("no red marker observation yielded a ground position");
    return make_virtual_border(std::move(polygon), *marker_position_);
}

OccupancyGrid build_posterior(const OccupancyGrid& prior, const OccupancyGrid& virtual_map,
                              MergeMode mode)
{
    return merge(prior, virtual_map, mode);
}

} // namespace vborder
