#pragma once

#include "vborder/geometry.hpp"
#include "vborder/gridmap.hpp"
#include "vborder/sim.hpp"
#include "vborder/teaching.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vborder {

struct MarkerCommand
{
    enum class Action { Place, Remove };

    double time = 0.0;
    Action action = Action::Place;
    MarkerId id = MarkerId::Green;
    Point2 position;
};

/// Border given analytically: the intended polygon and the final marker spot.
struct AnalyticBorder
{
    std::vector<Point2> polygon;
    Point2 marker;
};

struct GroundTruthRef
{
    /* metadata path of a stored ground-truth map */
    std::string map_path;
    std::optional<AnalyticBorder> analytic;
};

/// Timed marker commands that drive one reproducible teaching run.
struct ScenarioScript
{
    /* metadata path of the prior map, relative to the script file */
    std::string prior_map;
    Pose2 initial_pose;
    std::vector<MarkerCommand> commands;
    std::optional<GroundTruthRef> ground_truth;
    std::uint64_t seed = 0;

    /* Throws ValueError if command times decrease */
    void validate() const;
};

struct RunConfig
{
    TeachingConfig teaching;
    SimConfig sim;
    CameraModel camera;
    MergeMode merge_mode = MergeMode::PreserveUnknown;
    /* simulated-time budget; 0 picks last command + finish timeout + 120 s */
    double max_sim_time = 0.0;
    bool record_trace = false;
};

struct TraceEntry
{
    double time = 0.0;
    Pose2 truth;
    TeachingState state = TeachingState::Start;
    std::optional<PlacedMarker> marker;
};

struct TeachingTimes
{
    double record_start = 0.0;
    double record_end = 0.0;
    double finished = 0.0;
    /* start of the idle window that finished the session */
    double last_motion = 0.0;

    double including_idle() const { return finished - record_start; }
    double excluding_idle() const { return last_motion - record_start; }
};

struct SessionResult
{
    TeachingState state = TeachingState::Finished;
    VirtualBorder border;
    OccupancyGrid virtual_map;
    OccupancyGrid posterior;
    double closure_gap = 0.0;
    TeachingTimes times;
    std::vector<TimedPose> history;
    std::size_t collisions = 0;
    std::size_t rejected_events = 0;
    std::uint64_t steps = 0;
    std::vector<TraceEntry> trace;
};

/* Runs the script to completion with a fixed timestep. Throws ScenarioTimeout,
 * SessionCancelled, DegenerateBorder, MissingMarker, OutOfBounds. */
SessionResult run_scenario(const OccupancyGrid& prior, const ScenarioScript& script,
                           const RunConfig& config = {});

/* Prior map referenced by the script, resolved against base_dir */
OccupancyGrid load_script_prior(const ScenarioScript& script, const std::filesystem::path& base_dir);

ScenarioScript script_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioScript& script);
ScenarioScript load_script(const std::filesystem::path& path);
void save_script(const ScenarioScript& script, const std::filesystem::path& path);

nlohmann::json to_json(const SessionResult& result);

/* Partial overrides: only keys present in the object are applied */
void apply_json(const nlohmann::json& j, SimConfig& config);
void apply_json(const nlohmann::json& j, CameraModel& camera);
void apply_json(const nlohmann::json& j, TeachingConfig& config);
void apply_json(const nlohmann::json& j, RunConfig& config);

nlohmann::json point_json(Point2 p);
Point2 point_from_json(const nlohmann::json& j);

} // namespace vborder
