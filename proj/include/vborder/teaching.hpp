#pragma once

#include "vborder/geometry.hpp"
#include "vborder/gridmap.hpp"

#include <optional>
#include <string>
#include <variant>

namespace vborder {

enum class TeachingState
{
    Start,
    Record,
    KeepOff,
    Finished,
    Cancelled,
};

enum class MarkerId
{
    Green,
    Blue,
    Red,
};

const char* to_string(TeachingState state);
const char* to_string(MarkerId id);
std::optional<MarkerId> parse_marker_id(const std::string& text);
std::optional<TeachingState> parse_teaching_state(const std::string& text);

inline bool is_terminal(TeachingState s)
{ return s == TeachingState::Finished || s == TeachingState::Cancelled; }

struct MarkerObservation
{
    MarkerId id = MarkerId::Green;
    /* camera-to-marker distance, metres */
    double slant_distance = 0.0;
    /* angle of the marker in the camera frame, left positive */
    double bearing = 0.0;
    double timestamp = 0.0;
};

struct MarkerSeen
{
    MarkerObservation observation;
    Pose2 robot;
};

struct Tick
{
    double now = 0.0;
    Pose2 robot;
};

struct MarkerLost { };

using TeachingEvent = std::variant<MarkerSeen, Tick, MarkerLost>;

struct TeachingConfig
{
    /* seconds without motion in KeepOff before the session finishes */
    double finish_timeout = 10.0;
    double idle_translation = 0.01;
    double idle_rotation = 0.01;
    PolygonExtraction extraction;

    void validate() const;
};

struct EventOutcome
{
    /* ground-plane point the robot should follow, if any */
    std::optional<Point2> follow_target;
    bool state_changed = false;
};

/// Border polygon plus the side that becomes occupied.
struct VirtualBorder
{
    BorderPolygon polygon;
    Point2 marker_position;
    /* true when the marker lies inside (or on) the polygon */
    bool keep_off_inside = true;
};

VirtualBorder make_virtual_border(BorderPolygon polygon, Point2 marker_position);

/// Event-driven Start / Record / KeepOff teaching session.
///
/// Green guides the robot while in Start and cancels from Record or KeepOff.
/// Blue starts recording; Red ends recording and selects the keep-off side,
/// the last Red observation winning. The session finishes once the robot has
/// been still for `finish_timeout` seconds of simulated time in KeepOff.
/// Events are expected in timestamp order.
class TeachingSession
{
public:
    explicit TeachingSession(TeachingConfig config = {}, CameraModel camera = {});

    /* Throws InvalidTransition in terminal states and for Blue in KeepOff */
    EventOutcome handle_event(const TeachingEvent& event);

    TeachingState state() const { return state_; }
    const PoseHistory& history() const { return history_; }
    const TeachingConfig& config() const { return config_; }
    const CameraModel& camera() const { return camera_; }

    std::optional<Point2> last_marker_position() const { return marker_position_; }
    std::optional<double> idle_since() const { return idle_since_; }
    std::optional<double> record_start() const { return record_start_; }
    std::optional<double> record_end() const { return record_end_; }
    std::optional<double> finished_at() const { return finished_at_; }

    /* Distance between the last and first recorded positions */
    double closure_gap() const;

    /* Throws InvalidTransition unless Finished, DegenerateBorder, MissingMarker */
    VirtualBorder finalize() const;

private:
    EventOutcome on_marker(const MarkerSeen& seen);
    EventOutcome on_tick(const Tick& tick);
    void record(double time, const Pose2& pose);
    std::optional<Point2> follow_point(const MarkerSeen& seen) const;
    void store_marker(const MarkerSeen& seen);
    void cancel();

    TeachingConfig config_;
    CameraModel camera_;
    TeachingState state_ = TeachingState::Start;
    PoseHistory history_;
    std::optional<Point2> marker_position_;
    std::optional<double> idle_since_;
    Pose2 idle_anchor_;
    std::optional<double> record_start_;
    std::optional<double> record_end_;
    std::optional<double> finished_at_;
};

/* Cells whose center lies on the marker's side of the polygon become 1, the
 * rest 0, and the rasterized outline is forced to 1. Throws OutOfBounds. */
OccupancyGrid build_virtual_map(const VirtualBorder& border, const GridSpec& spec);

OccupancyGrid build_posterior(const OccupancyGrid& prior, const OccupancyGrid& virtual_map,
                              MergeMode mode = MergeMode::PreserveUnknown);

} // namespace vborder
