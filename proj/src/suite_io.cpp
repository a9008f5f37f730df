#include "vborder/suite.hpp"

#include "vborder/errors.hpp"
#include "vborder/map_io.hpp"

#include <fstream>
#include <map>

namespace vborder {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    std::filesystem::path path(p);
    return path.is_relative() ? base / path : path;
}

/* Maps shared by several scenarios are loaded once */
class MapCache
{
public:
    std::shared_ptr<const OccupancyGrid> get(const std::filesystem::path& meta)
    {
        const std::string key = std::filesystem::absolute(meta).lexically_normal().string();
        auto it = maps_.find(key);
        if (it == maps_.end())
            it = maps_.emplace(key, std::make_shared<const OccupancyGrid>(load_map(meta))).first;
        return it->second;
    }

private:
    std::map<std::string, std::shared_ptr<const OccupancyGrid>> maps_;
};

} // namespace

void apply_json(const json& j, GeneratorConfig& c)
{
    const auto read = [&](const char* key, double& out) {
        if (j.contains(key))
            out = j.at(key).get<double>();
    };
    read("marker_speed", c.marker_speed);
    read("turn_rate", c.turn_rate);
    read("settle_time", c.settle_time);
    read("turn_settle_time", c.turn_settle_time);
    read("command_interval", c.command_interval);
    read("marker_jitter", c.marker_jitter);
    read("approach_min", c.approach_min);
}

Suite suite_from_json(const json& j, const std::filesystem::path& base_dir)
{
    if (!j.is_object())
        throw ParseError("suite must be a JSON object");
    try {
        Suite suite;
        if (j.contains("trials"))
            suite.config.trials = j.at("trials").get<int>();
        if (j.contains("seed"))
            suite.config.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("run"))
            apply_json(j.at("run"), suite.config.run);
        if (j.contains("generator"))
            apply_json(j.at("generator"), suite.config.generator);

        MapCache maps;
        for (const json& s : j.at("scenarios")) {
            ExperimentScenario scenario;
            scenario.name = s.at("name").get<std::string>();
            if (s.contains("prior_map"))
                scenario.prior = maps.get(resolve(base_dir, s.at("prior_map").get<std::string>()));

            if (s.contains("polygon")) {
                BorderTask task;
                for (const json& p : s.at("polygon"))
                    task.polygon.push_back(point_from_json(p));
                task.keep_off = s.value("keep_off", true);
                scenario.length_m = s.contains("length_m") ? s.at("length_m").get<double>()
                                                           : BorderPolygon(task.polygon).perimeter();
                scenario.task = std::move(task);
            } else if (s.contains("scripts")) {
                scenario.length_m = s.value("length_m", 0.0);
                for (const json& p : s.at("scripts")) {
                    const auto script_path = resolve(base_dir, p.get<std::string>());
                    ScenarioScript script = load_script(script_path);
                    const auto script_dir = script_path.parent_path();
                    if (!scenario.prior)
                        scenario.prior = maps.get(resolve(script_dir, script.prior_map));
                    if (!script.ground_truth)
                        throw ParseError(script_path.string() + ": script carries no ground_truth_map");
                    std::shared_ptr<const OccupancyGrid> truth;
                    if (script.ground_truth->analytic) {
                        const auto& gt = *script.ground_truth->analytic;
                        truth = std::make_shared<const OccupancyGrid>(ground_truth_map(
                            *scenario.prior, BorderPolygon(gt.polygon), gt.marker, suite.config.run.merge_mode));
                    } else {
                        truth = maps.get(resolve(script_dir, script.ground_truth->map_path));
                    }
                    scenario.scripts.push_back(std::move(script));
                    scenario.script_truths.push_back(std::move(truth));
                }
            } else {
                throw ParseError("scenario '" + scenario.name + "' needs either 'polygon' or 'scripts'");
            }
            if (!scenario.prior)
                throw ParseError("scenario '" + scenario.name + "' names no prior_map");
            suite.scenarios.push_back(std::move(scenario));
        }
        return suite;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed suite: ") + e.what());
    }
}

Suite load_suite(const std::filesystem::path& path)
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
    return suite_from_json(j, path.parent_path());
}

} // namespace vborder
