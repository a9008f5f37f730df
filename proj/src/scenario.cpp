#include "vborder/scenario.hpp"

#include "vborder/errors.hpp"
#include "vborder/map_io.hpp"

#include <fstream>
#include <memory>

namespace vborder {

using nlohmann::json;

void ScenarioScript::validate() const
{
    for (std::size_t i = 1; i < commands.size(); ++i)
        if (commands[i].time < commands[i - 1].time)
            throw ValueError("marker command " + std::to_string(i) + " is earlier than its predecessor");
    for (const auto& cmd : commands)
        if (!(cmd.time >= 0.0))
            throw ValueError("marker command times must be non-negative");
}

SessionResult run_scenario(const OccupancyGrid& prior, const ScenarioScript& script,
                           const RunConfig& config)
{
    script.validate();
    config.camera.validate();

    auto prior_ptr = std::make_shared<const OccupancyGrid>(prior);
    World world(prior_ptr, script.initial_pose, config.sim, config.camera, config.teaching, script.seed);

    double budget = config.max_sim_time;
    if (budget <= 0.0) {
        const double last = script.commands.empty() ? 0.0 : script.commands.back().time;
        budget = last + config.teaching.finish_timeout + 120.0;
    }

    std::vector<TraceEntry> trace;
    std::size_t next = 0;
    constexpr double kTimeTol = 1e-9;
    while (true) {
        const double now = world.time();
        while (next < script.commands.size() && script.commands[next].time <= now + kTimeTol) {
            const MarkerCommand& cmd = script.commands[next++];
            if (cmd.action == MarkerCommand::Action::Place)
                world.place_marker(cmd.id, cmd.position);
            else
                world.remove_marker();
        }
        if (now > budget)
            throw ScenarioTimeout("session still " + std::string(to_string(world.session().state())) +
                                  " after " + std::to_string(budget) + " s of simulated time");

        world.step();
        if (config.record_trace)
            trace.push_back({ world.time(), world.robot().pose, world.session().state(), world.marker() });

        const TeachingState state = world.session().state();
        if (state == TeachingState::Cancelled)
            throw SessionCancelled("teaching cancelled by a green marker at t=" + std::to_string(world.time()));
        if (state == TeachingState::Finished)
            break;
    }

    const TeachingSession& session = world.session();
    VirtualBorder border = session.finalize();
    OccupancyGrid virtual_map = build_virtual_map(border, prior.spec());
    OccupancyGrid posterior = build_posterior(prior, virtual_map, config.merge_mode);

    TeachingTimes times{ *session.record_start(), *session.record_end(), *session.finished_at(),
                         *session.idle_since() };
    const auto entries = session.history().entries();

    return SessionResult{ session.state(),
                          std::move(border),
                          std::move(virtual_map),
                          std::move(posterior),
                          session.closure_gap(),
                          times,
                          std::vector<TimedPose>(entries.begin(), entries.end()),
                          world.collisions(),
                          world.rejected_events(),
                          world.ticks(),
                          std::move(trace) };
}

OccupancyGrid load_script_prior(const ScenarioScript& script, const std::filesystem::path& base_dir)
{
    if (script.prior_map.empty())
        throw ParseError("scenario script names no prior_map");
    std::filesystem::path meta(script.prior_map);
    if (meta.is_relative())
        meta = base_dir / meta;
    return load_map(meta);
}

json point_json(Point2 p)
{
    return json::array({ p.x, p.y });
}

Point2 point_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError("expected a point [x, y], got " + j.dump());
    return { j[0].get<double>(), j[1].get<double>() };
}

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out)
{
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(std::string("bad value for '") + key + "': " + j.at(key).dump());
    }
}

std::vector<Point2> polygon_from_json(const json& j)
{
    if (!j.is_array())
        throw ParseError("polygon must be an array of [x, y] points");
    std::vector<Point2> out;
    for (const auto& p : j)
        out.push_back(point_from_json(p));
    return out;
}

json polygon_json(const std::vector<Point2>& pts)
{
    json arr = json::array();
    for (const auto& p : pts)
        arr.push_back(point_json(p));
    return arr;
}

} // namespace

ScenarioScript script_from_json(const json& j)
{
    if (!j.is_object())
        throw ParseError("scenario script must be a JSON object");
    try {
        ScenarioScript script;
        read_opt(j, "prior_map", script.prior_map);
        read_opt(j, "seed", script.seed);

        const json& pose = j.at("initial_pose");
        if (!pose.is_array() || pose.size() != 3)
            throw ParseError("initial_pose must be [x, y, theta]");
        script.initial_pose = Pose2(pose[0].get<double>(), pose[1].get<double>(), pose[2].get<double>());

        for (const json& c : j.at("commands")) {
            MarkerCommand cmd;
            cmd.time = c.at("t").get<double>();
            const std::string action = c.at("action").get<std::string>();
            if (action == "place") {
                cmd.action = MarkerCommand::Action::Place;
                const auto id = parse_marker_id(c.at("id").get<std::string>());
                if (!id)
                    throw ParseError("unknown marker id " + c.at("id").dump());
                cmd.id = *id;
                cmd.position = { c.at("x").get<double>(), c.at("y").get<double>() };
            } else if (action == "remove") {
                cmd.action = MarkerCommand::Action::Remove;
            } else {
                throw ParseError("unknown marker action '" + action + "'");
            }
            script.commands.push_back(cmd);
        }

        if (j.contains("ground_truth_map") && !j.at("ground_truth_map").is_null()) {
            const json& gt = j.at("ground_truth_map");
            GroundTruthRef ref;
            if (gt.is_string()) {
                ref.map_path = gt.get<std::string>();
            } else {
                ref.analytic = AnalyticBorder{ polygon_from_json(gt.at("polygon")),
                                               point_from_json(gt.at("marker")) };
            }
            script.ground_truth = ref;
        }
        script.validate();
        return script;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed scenario script: ") + e.what());
    }
}

json to_json(const ScenarioScript& script)
{
    json j;
    j["prior_map"] = script.prior_map;
    j["initial_pose"] = { script.initial_pose.x, script.initial_pose.y, script.initial_pose.theta };
    j["seed"] = script.seed;
    json cmds = json::array();
    for (const auto& c : script.commands) {
        json e;
        e["t"] = c.time;
        if (c.action == MarkerCommand::Action::Place) {
            e["action"] = "place";
            e["id"] = to_string(c.id);
            e["x"] = c.position.x;
            e["y"] = c.position.y;
        } else {
            e["action"] = "remove";
        }
        cmds.push_back(std::move(e));
    }
    j["commands"] = std::move(cmds);
    if (script.ground_truth) {
        if (script.ground_truth->analytic)
            j["ground_truth_map"] = { { "polygon", polygon_json(script.ground_truth->analytic->polygon) },
                                      { "marker", point_json(script.ground_truth->analytic->marker) } };
        else
            j["ground_truth_map"] = script.ground_truth->map_path;
    }
    return j;
}

ScenarioScript load_script(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError(path.string() + ": cannot open file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": offset " + std::to_string(e.byte) + ": " + e.what());
    }
    return script_from_json(j);
}

void save_script(const ScenarioScript& script, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw ValueError(path.string() + ": cannot write file");
    out << to_json(script).dump(1) << "\n";
}

json to_json(const SessionResult& result)
{
    json j;
    j["state"] = to_string(result.state);
    std::vector<Point2> verts(result.border.polygon.vertices().begin(), result.border.polygon.vertices().end());
    j["polygon"] = polygon_json(verts);
    j["marker_position"] = point_json(result.border.marker_position);
    j["keep_off_inside"] = result.border.keep_off_inside;
    j["closure_gap_m"] = result.closure_gap;
    j["border_length_m"] = result.border.polygon.perimeter();
    j["border_area_m2"] = result.border.polygon.area();
    j["teaching_time"] = {
        { "record_start_s", result.times.record_start },
        { "record_end_s", result.times.record_end },
        { "finished_s", result.times.finished },
        { "last_motion_s", result.times.last_motion },
        { "excluding_idle_s", result.times.excluding_idle() },
        { "including_idle_s", result.times.including_idle() },
    };
    j["history_size"] = result.history.size();
    j["collisions"] = result.collisions;
    j["rejected_events"] = result.rejected_events;
    j["steps"] = result.steps;
    return j;
}

void apply_json(const json& j, SimConfig& c)
{
    read_opt(j, "timestep", c.timestep);
    read_opt(j, "v_max", c.v_max);
    read_opt(j, "omega_max", c.omega_max);
    read_opt(j, "follow_stop_distance", c.follow_stop_distance);
    read_opt(j, "follow_gain", c.follow_gain);
    read_opt(j, "turn_gain", c.turn_gain);
    read_opt(j, "rotate_first_bearing", c.rotate_first_bearing);
    read_opt(j, "odometry_noise_translation", c.odometry_noise_translation);
    read_opt(j, "odometry_noise_rotation", c.odometry_noise_rotation);
    read_opt(j, "localization_correction", c.localization_correction);
    read_opt(j, "localization_noise_xy", c.localization_noise_xy);
    read_opt(j, "localization_noise_theta", c.localization_noise_theta);
    read_opt(j, "localization_correlation_length", c.localization_correlation_length);
    c.validate();
}

void apply_json(const json& j, CameraModel& c)
{
    read_opt(j, "height", c.height);
    read_opt(j, "fov_half_angle", c.fov_half_angle);
    read_opt(j, "min_range", c.min_range);
    read_opt(j, "max_range", c.max_range);
    c.validate();
}

void apply_json(const json& j, TeachingConfig& c)
{
    read_opt(j, "finish_timeout", c.finish_timeout);
    read_opt(j, "idle_translation", c.idle_translation);
    read_opt(j, "idle_rotation", c.idle_rotation);
    read_opt(j, "min_spacing", c.extraction.min_spacing);
    read_opt(j, "min_area", c.extraction.min_area);
    c.validate();
}

void apply_json(const json& j, RunConfig& c)
{
    if (j.contains("sim"))
        apply_json(j.at("sim"), c.sim);
    if (j.contains("camera"))
        apply_json(j.at("camera"), c.camera);
    if (j.contains("teaching"))
        apply_json(j.at("teaching"), c.teaching);
    if (j.contains("merge_mode")) {
        const std::string mode = j.at("merge_mode").get<std::string>();
        if (mode == "preserve_unknown")
            c.merge_mode = MergeMode::PreserveUnknown;
        else if (mode == "literal_max")
            c.merge_mode = MergeMode::LiteralMax;
        else
            throw ParseError("unknown merge_mode '" + mode + "'");
    }
    read_opt(j, "max_sim_time", c.max_sim_time);
}

} // namespace vborder
