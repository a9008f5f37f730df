#pragma once

#include "vborder/geometry.hpp"
#include "vborder/gridmap.hpp"
#include "vborder/scenario.hpp"

#include <cstdint>
#include <vector>

namespace vborder {

/// How the simulated teacher handles the marker cube.
struct GeneratorConfig
{
    /* marker speed along straight stretches, m/s */
    double marker_speed = 0.15;
    /* angular speed of the marker when swinging it around a corner, rad/s */
    double turn_rate = 0.5;
    /* hold after each straight stretch so the robot closes its lag, s */
    double settle_time = 3.0;
    /* hold after each swing so the robot finishes turning, s */
    double turn_settle_time = 1.5;
    /* interval between successive marker placements while moving, s */
    double command_interval = 0.1;
    /* std of the placement error added to every moving waypoint, m */
    double marker_jitter = 0.0;
    /* distance the marker is held ahead of the robot; match follow_stop_distance */
    double lead = 0.4;
    /* shortest approach leg from the start pose during guidance, m */
    double approach_min = 1.0;
};

struct BorderTask
{
    std::vector<Point2> polygon;
    /* true: the polygon interior is kept off, false: it is the working area */
    bool keep_off = true;
};

struct GeneratedScript
{
    ScenarioScript script;
    /* where the red marker finally rests */
    Point2 final_marker;
};

/* Point where the red marker is left: `lead` metres from the first vertex,
 * inside the polygon for keep-off tasks and outside otherwise */
Point2 final_marker_position(const BorderTask& task, double lead);

/* Marker playback that guides the robot from `start` to the first vertex with
 * green, traces the polygon with blue and settles the keep-off side with red.
 * The robot moves along straight legs and turns in place at every vertex. */
GeneratedScript generate_script(const BorderTask& task, const Pose2& start,
                                const GeneratorConfig& config, std::uint64_t seed);

/* Random free start pose at least approach_min from the guidance point and
 * roughly facing it; deterministic in seed */
Pose2 sample_start_pose(const BorderTask& task, const OccupancyGrid& prior,
                        const GeneratorConfig& config, std::uint64_t seed, double wall_margin = 0.4);

/* Midpoint of the closing edge, where guidance joins the polygon */
Point2 guidance_point(const BorderTask& task);

} // namespace vborder
