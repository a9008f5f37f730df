#include "vborder/live.hpp"

#include "vborder/errors.hpp"

#include <cmath>

namespace vborder {

using nlohmann::json;

ClientCommand parse_client_message(const std::string& line)
{
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("offset ") + std::to_string(e.byte) + ": invalid JSON");
    }
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw ValueError("message must be an object with a string 'type'");

    const std::string type = j.at("type").get<std::string>();
    if (type == "place_marker") {
        if (!j.contains("id") || !j.at("id").is_string())
            throw ValueError("place_marker needs a string 'id'");
        const auto id = parse_marker_id(j.at("id").get<std::string>());
        if (!id)
            throw ValueError("unknown marker id " + j.at("id").dump() + "; expected green, blue or red");
        if (!j.contains("x") || !j.contains("y") || !j.at("x").is_number() || !j.at("y").is_number())
            throw ValueError("place_marker needs numeric 'x' and 'y'");
        const Point2 p{ j.at("x").get<double>(), j.at("y").get<double>() };
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw ValueError("marker coordinates must be finite");
        return PlaceMarkerRequest{ *id, p };
    }
    if (type == "remove_marker")
        return RemoveMarkerRequest{};
    if (type == "reset")
        return ResetRequest{};
    if (type == "get_map") {
        const std::string which = j.value("which", std::string("prior"));
        if (which == "prior")
            return GetMapRequest{ MapLayer::Prior };
        if (which == "posterior")
            return GetMapRequest{ MapLayer::Posterior };
        throw ValueError("get_map 'which' must be prior or posterior");
    }
    throw ValueError("unknown message type '" + type + "'");
}

json error_message(const std::string& name, const std::string& detail)
{
    return { { "type", "error" }, { "name", name }, { "detail", detail } };
}

json map_message(const OccupancyGrid& grid, MapLayer which, std::uint64_t version)
{
    const GridSpec& spec = grid.spec();
    json runs = json::array();
    int current = 2;
    std::uint64_t count = 0;
    for (double v : grid.cells()) {
        const int t = static_cast<int>(trinarize_value(v, Thresholds{}));
        if (t == current) {
            ++count;
            continue;
        }
        if (count > 0)
            runs.push_back({ current, count });
        current = t;
        count = 1;
    }
    if (count > 0)
        runs.push_back({ current, count });

    return { { "type", "map" },
             { "which", which == MapLayer::Prior ? "prior" : "posterior" },
             { "version", version },
             { "width", spec.width },
             { "height", spec.height },
             { "resolution", spec.resolution },
             { "origin", { spec.origin_x, spec.origin_y, 0.0 } },
             { "encoding", "rle" },
             { "runs", std::move(runs) } };
}

OccupancyGrid decode_map_message(const json& message)
{
    try {
        GridSpec spec;
        spec.width = message.at("width").get<int>();
        spec.height = message.at("height").get<int>();
        spec.resolution = message.at("resolution").get<double>();
        spec.origin_x = message.at("origin").at(0).get<double>();
        spec.origin_y = message.at("origin").at(1).get<double>();
        std::vector<double> cells;
        cells.reserve(spec.cell_count());
        for (const json& run : message.at("runs"))
            cells.insert(cells.end(), run.at(1).get<std::size_t>(), run.at(0).get<double>());
        return OccupancyGrid(spec, std::move(cells));
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed map message: ") + e.what());
    }
}

LiveSession::LiveSession(std::shared_ptr<const OccupancyGrid> prior, const Pose2& initial_pose,
                         RunConfig config, std::uint64_t seed, std::string session_id)
    : prior_(std::move(prior)), initial_pose_(initial_pose), config_(std::move(config)), seed_(seed),
      session_id_(std::move(session_id))
{
    restart();
}

void LiveSession::restart()
{
    world_ = std::make_unique<World>(prior_, initial_pose_, config_.sim, config_.camera, config_.teaching, seed_);
    posterior_.reset();
    finalized_ = false;
    log_.clear();
}

std::vector<json> LiveSession::apply(const ClientCommand& command)
{
    std::vector<json> replies;
    const TeachingState s = state();

    if (const auto* place = std::get_if<PlaceMarkerRequest>(&command)) {
        if (is_terminal(s)) {
            replies.push_back(error_message("InvalidTransition",
                                            std::string("session is ") + to_string(s) + "; send reset"));
        } else if (s == TeachingState::KeepOff && place->id == MarkerId::Blue) {
            replies.push_back(error_message("InvalidTransition", "recording cannot resume in KeepOff"));
        } else {
            world_->place_marker(place->id, place->position);
            log_.push_back({ time(), MarkerCommand::Action::Place, place->id, place->position });
        }
    } else if (std::holds_alternative<RemoveMarkerRequest>(command)) {
        world_->remove_marker();
        log_.push_back({ time(), MarkerCommand::Action::Remove, MarkerId::Green, {} });
    } else if (std::holds_alternative<ResetRequest>(command)) {
        const bool had_posterior = posterior_.has_value();
        restart();
        if (had_posterior) {
            ++map_version_;
            replies.push_back(map_message(*prior_, MapLayer::Prior, map_version_));
        }
    } else if (const auto* get = std::get_if<GetMapRequest>(&command)) {
        if (get->which == MapLayer::Prior)
            replies.push_back(map_message(*prior_, MapLayer::Prior, map_version_));
        else if (posterior_)
            replies.push_back(map_message(*posterior_, MapLayer::Posterior, map_version_));
        else
            replies.push_back(error_message("ValueError", "no posterior map yet"));
    }
    return replies;
}

std::vector<json> LiveSession::step()
{
    std::vector<json> pushes;
    if (is_terminal(state()))
        return pushes;

    world_->step();
    if (state() == TeachingState::Finished && !finalized_) {
        finalized_ = true;
        try {
            const VirtualBorder border = world_->session().finalize();
            posterior_ = build_posterior(*prior_, build_virtual_map(border, prior_->spec()), config_.merge_mode);
            ++map_version_;
            pushes.push_back(map_message(*posterior_, MapLayer::Posterior, map_version_));
        } catch (const Error& e) {
            pushes.push_back(error_message(e.name(), e.what()));
        }
    }
    return pushes;
}

json LiveSession::snapshot() const
{
    const Pose2& pose = world_->robot().pose;
    json path = json::array();
    const double spacing = config_.teaching.extraction.min_spacing;
    std::optional<Point2> last;
    for (const TimedPose& e : world_->session().history().entries()) {
        const Point2 p = e.pose.position();
        if (!last || distance(p, *last) >= spacing) {
            path.push_back({ p.x, p.y });
            last = p;
        }
    }

    json marker = nullptr;
    if (world_->marker())
        marker = { { "id", to_string(world_->marker()->id) },
                   { "x", world_->marker()->position.x },
                   { "y", world_->marker()->position.y } };

    return { { "type", "snapshot" },
             { "session_id", session_id_ },
             { "time", time() },
             { "robot", { { "x", pose.x }, { "y", pose.y }, { "theta", pose.theta } } },
             { "state", to_string(state()) },
             { "marker", std::move(marker) },
             { "path", std::move(path) },
             { "map_version", map_version_ } };
}

ScenarioScript LiveSession::replay_script() const
{
    ScenarioScript script;
    script.initial_pose = initial_pose_;
    script.commands = log_;
    script.seed = seed_;
    return script;
}

} // namespace vborder
