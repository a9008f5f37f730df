#pragma once

#include "vborder/scenario.hpp"
#include "vborder/sim.hpp"

#include "json.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace vborder {

enum class MapLayer { Prior, Posterior };

struct PlaceMarkerRequest
{
    MarkerId id = MarkerId::Green;
    Point2 position;
};
struct RemoveMarkerRequest { };
struct ResetRequest { };
struct GetMapRequest
{
    MapLayer which = MapLayer::Prior;
};

using ClientCommand = std::variant<PlaceMarkerRequest, RemoveMarkerRequest, ResetRequest, GetMapRequest>;

/* One newline-delimited JSON message from a client. Throws ParseError for
 * malformed JSON and ValueError for well-formed but invalid commands. */
ClientCommand parse_client_message(const std::string& line);

nlohmann::json error_message(const std::string& name, const std::string& detail);

/* Map payload with trinarized cells run-length encoded row-major from row 0
 * (minimum y): "runs": [[value, count], ...] */
nlohmann::json map_message(const OccupancyGrid& grid, MapLayer which, std::uint64_t version);
OccupancyGrid decode_map_message(const nlohmann::json& message);

/// Live teaching session behind one client connection. Commands are applied
/// between ticks; the caller decides the pacing.
class LiveSession
{
public:
    LiveSession(std::shared_ptr<const OccupancyGrid> prior, const Pose2& initial_pose, RunConfig config,
                std::uint64_t seed, std::string session_id);

    /* Replies to send back (errors, map payloads) */
    std::vector<nlohmann::json> apply(const ClientCommand& command);

    /* Advances one tick; returns pushes caused by it (posterior map, errors) */
    std::vector<nlohmann::json> step();

    nlohmann::json snapshot() const;

    double time() const { return world_->time(); }
    TeachingState state() const { return world_->session().state(); }
    std::uint64_t map_version() const { return map_version_; }
    const std::optional<OccupancyGrid>& posterior() const { return posterior_; }
    const OccupancyGrid& prior() const { return *prior_; }
    const World& world() const { return *world_; }

    /* Marker commands applied since the last reset, as an equivalent script */
    ScenarioScript replay_script() const;

private:
    void restart();

    std::shared_ptr<const OccupancyGrid> prior_;
    Pose2 initial_pose_;
    RunConfig config_;
    std::uint64_t seed_;
    std::string session_id_;
    std::unique_ptr<World> world_;
    std::optional<OccupancyGrid> posterior_;
    bool finalized_ = false;
    std::uint64_t map_version_ = 0;
    std::vector<MarkerCommand> log_;
};

} // namespace vborder
