#include "vborder/errors.hpp"
#include "vborder/eval.hpp"
#include "vborder/lab.hpp"
#include "vborder/live.hpp"
#include "vborder/map_io.hpp"
#include "vborder/scenario.hpp"
#include "vborder/script_gen.hpp"
#include "vborder/server.hpp"
#include "vborder/suite.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vborder;

namespace {

constexpr int kExitTeaching = 1;
constexpr int kExitUsage = 2;

/* bad input: exit 2; anything raised while teaching: exit 1 */
struct InputError
{
    std::string name;
    std::string detail;
};

int report(const std::string& name, const std::string& detail, int code)
{
    std::cerr << json{ { "error", name }, { "detail", detail } }.dump() << "\n";
    return code;
}

template <typename F>
auto input(F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const Error& e) {
        throw InputError{ e.name(), e.what() };
    } catch (const json::exception& e) {
        throw InputError{ "ParseError", e.what() };
    }
}

json read_json_file(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError(path.string() + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": offset " + std::to_string(e.byte) + ": invalid JSON");
    }
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw ValueError(path.string() + ": cannot write file");
}

OccupancyGrid load_prior(const std::string& map, const std::string& meta)
{
    if (map.empty())
        return load_map(meta);
    return load_map(map, meta);
}

/* --- teach --- */

struct TeachArgs
{
    std::string map, meta, script, out_map, out_meta, out_result, config;
    std::optional<std::uint64_t> seed;
};

int teach(const TeachArgs& a)
{
    const ScenarioScript script = input([&] {
        ScenarioScript s = load_script(a.script);
        if (a.seed)
            s.seed = *a.seed;
        return s;
    });
    const OccupancyGrid prior = input([&] {
        if (!a.meta.empty())
            return load_prior(a.map, a.meta);
        if (script.prior_map.empty())
            throw ValueError("no prior map: pass --meta or set prior_map in the script");
        return load_script_prior(script, fs::path(a.script).parent_path());
    });
    RunConfig run;
    if (!a.config.empty())
        input([&] { apply_json(read_json_file(a.config), run); });

    const SessionResult result = run_scenario(prior, script, run);

    fs::path out_meta = a.out_meta;
    fs::path out_map = a.out_map;
    if (out_meta.empty())
        out_meta = fs::path(out_map).replace_extension(".yaml");
    if (out_meta.has_parent_path())
        fs::create_directories(out_meta.parent_path());
    if (out_map.has_parent_path())
        fs::create_directories(out_map.parent_path());
    save_map(result.posterior, out_map, out_meta);
    if (!a.out_result.empty())
        write_text(a.out_result, to_json(result).dump(2) + "\n");

    std::cout << "state " << to_string(result.state) << ", teaching time " << result.times.excluding_idle()
              << " s (" << result.times.including_idle() << " s with idle), closure gap " << result.closure_gap
              << " m\n";
    return 0;
}

/* --- eval --- */

int eval(const std::string& suite_path, const std::string& out_dir)
{
    const Suite suite = input([&] { return load_suite(suite_path); });
    if (suite.scenarios.empty())
        throw InputError{ "ValueError", "suite has no scenarios" };

    const ExperimentResult result = run_experiment(suite.scenarios, suite.config);
    const fs::path out(out_dir);
    fs::create_directories(out);
    write_text(out / "trials.csv", render_trials_csv(result.accuracy));
    const std::string table = render_accuracy_table(result.accuracy);
    write_text(out / "accuracy.txt", table);
    write_text(out / "effort.csv", render_effort_csv(result.effort));

    std::cout << table;
    std::cout << "time excl. idle = " << result.effort.fit_excl_idle.slope << " * length + "
              << result.effort.fit_excl_idle.intercept << " (R^2 " << result.effort.fit_excl_idle.r_squared
              << ")\n";
    int failed = 0;
    for (const auto& s : result.accuracy.scenarios)
        failed += s.failed;
    if (failed > 0)
        std::cerr << failed << " trial(s) failed; see trials.csv\n";
    return 0;
}

/* --- mapgen --- */

int mapgen(double width, double height, double res, double wall, const std::string& out)
{
    const OccupancyGrid grid = input([&] { return make_walled_room(width, height, res, wall); });
    const fs::path prefix(out);
    if (prefix.has_parent_path())
        fs::create_directories(prefix.parent_path());
    fs::path image = prefix, meta = prefix;
    image += ".pgm";
    meta += ".yaml";
    save_map(grid, image, meta);
    std::cout << grid.spec().width << "x" << grid.spec().height << " -> " << image.string() << ", "
              << meta.string() << "\n";
    return 0;
}

/* --- serve --- */

struct ServeArgs
{
    int port = 8765;
    std::string map, meta, config, bind = "127.0.0.1";
    double time_scale = 1.0;
    std::uint64_t seed = 0;
    std::vector<double> start;
};

int serve(const ServeArgs& a)
{
    ServerConfig cfg;
    cfg.port = a.port;
    cfg.bind_address = a.bind;
    cfg.time_scale = a.time_scale;
    cfg.seed = a.seed;
    cfg.prior = input([&] { return std::make_shared<const OccupancyGrid>(load_prior(a.map, a.meta)); });
    if (!a.config.empty())
        input([&] { apply_json(read_json_file(a.config), cfg.run); });
    if (a.start.size() == 3) {
        cfg.initial_pose = Pose2(a.start[0], a.start[1], a.start[2]);
    } else {
        const GridSpec& s = cfg.prior->spec();
        cfg.initial_pose = Pose2(s.origin_x + s.extent_x() / 2, s.origin_y + s.extent_y() / 2, 0.0);
    }

    Server server(cfg);
    const int port = input([&] { return server.start(); });
    std::cout << "listening on " << a.bind << ":" << port << "\n" << std::flush;
    server.wait();
    return 0;
}

/* --- script --- */

int script(const std::string& border_name, const std::string& prior_map, const std::string& out,
           std::uint64_t seed, const std::string& generator_config)
{
    std::optional<LabBorder> border;
    if (border_name == "carpet")
        border = carpet_border();
    for (const LabBorder& b : lab_borders())
        if (b.name == border_name)
            border = b;
    if (!border)
        throw InputError{ "ValueError", "unknown border '" + border_name + "'" };

    GeneratorConfig gen;
    if (!generator_config.empty())
        input([&] { apply_json(read_json_file(generator_config), gen); });
    const OccupancyGrid room = make_walled_room(kLabWidth, kLabHeight, kLabResolution, kLabWall);
    const Pose2 start = sample_start_pose(border->task, room, gen, seed);
    GeneratedScript g = generate_script(border->task, start, gen, seed);
    g.script.prior_map = prior_map;
    save_script(g.script, out);
    std::cout << g.script.commands.size() << " commands, last at " << g.script.commands.back().time << " s\n";
    return 0;
}

/* --- lab --- */

json default_experiment_json()
{
    return { { "trials", 5 },
             { "seed", 1 },
             { "run",
               { { "sim",
                   { { "odometry_noise_translation", 0.02 },
                     { "odometry_noise_rotation", 0.02 },
                     { "localization_noise_xy", 0.01 },
                     { "localization_noise_theta", 0.01 } } } } },
             { "generator", { { "marker_jitter", 0.02 } } } };
}

int lab(const std::string& out_dir)
{
    const fs::path out(out_dir);
    fs::create_directories(out);
    save_map(make_walled_room(kLabWidth, kLabHeight, kLabResolution, kLabWall), out / "lab.pgm", out / "lab.yaml");

    json suite = default_experiment_json();
    json scenarios = json::array();
    for (const LabBorder& b : lab_borders()) {
        json poly = json::array();
        for (const Point2& p : b.task.polygon)
            poly.push_back(point_json(p));
        scenarios.push_back({ { "name", b.name },
                              { "prior_map", "lab.yaml" },
                              { "polygon", poly },
                              { "keep_off", b.task.keep_off },
                              { "length_m", b.length_m } });
    }
    suite["scenarios"] = scenarios;
    write_text(out / "suite.json", suite.dump(2) + "\n");

    const LabBorder carpet = carpet_border();
    GeneratorConfig gen;
    const OccupancyGrid room = make_walled_room(kLabWidth, kLabHeight, kLabResolution, kLabWall);
    GeneratedScript g = generate_script(carpet.task, sample_start_pose(carpet.task, room, gen, 5), gen, 5);
    g.script.prior_map = "lab.yaml";
    save_script(g.script, out / "carpet.json");
    std::cout << "wrote lab.pgm, lab.yaml, suite.json, carpet.json to " << out.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{ "Virtual border teaching on occupancy grid maps" };
    app.require_subcommand(1);

    TeachArgs ta;
    std::uint64_t teach_seed = 0;
    auto* teach_cmd = app.add_subcommand("teach", "Run a scripted teaching session and write the posterior map");
    teach_cmd->add_option("--map", ta.map, "Prior map image (PGM); default: image named in --meta");
    teach_cmd->add_option("--meta", ta.meta, "Prior map metadata (YAML); default: prior_map of the script");
    teach_cmd->add_option("--script", ta.script, "Scenario script (JSON)")->required();
    teach_cmd->add_option("--out-map", ta.out_map, "Posterior map image")->required();
    teach_cmd->add_option("--out-meta", ta.out_meta, "Posterior map metadata");
    teach_cmd->add_option("--out-result", ta.out_result, "Session result (JSON)");
    auto* seed_opt = teach_cmd->add_option("--seed", teach_seed, "Overrides the script seed");
    teach_cmd->add_option("--config", ta.config, "Run configuration overrides (JSON)");

    std::string suite_path, eval_out;
    auto* eval_cmd = app.add_subcommand("eval", "Run an experiment suite and write the reports");
    eval_cmd->add_option("--suite", suite_path, "Suite description (JSON)")->required();
    eval_cmd->add_option("--out", eval_out, "Output directory")->required();

    double width = 0, height = 0, res = kLabResolution, wall = kLabWall;
    std::string mapgen_out;
    auto* mapgen_cmd = app.add_subcommand("mapgen", "Write an empty walled room map");
    mapgen_cmd->add_option("--width", width, "Width in meters")->required();
    mapgen_cmd->add_option("--height", height, "Height in meters")->required();
    mapgen_cmd->add_option("--res", res, "Resolution in meters per cell");
    mapgen_cmd->add_option("--wall", wall, "Wall thickness in meters");
    mapgen_cmd->add_option("--out", mapgen_out, "Output prefix; writes PREFIX.pgm and PREFIX.yaml")->required();

    ServeArgs sa;
    auto* serve_cmd = app.add_subcommand("serve", "Serve live teaching sessions over TCP");
    serve_cmd->add_option("--port", sa.port, "TCP port (0 picks a free one)");
    serve_cmd->add_option("--bind", sa.bind, "Bind address");
    serve_cmd->add_option("--map", sa.map, "Prior map image (PGM)");
    serve_cmd->add_option("--meta", sa.meta, "Prior map metadata (YAML)")->required();
    serve_cmd->add_option("--time-scale", sa.time_scale, "Simulated seconds per wall second");
    serve_cmd->add_option("--seed", sa.seed, "Noise seed");
    serve_cmd->add_option("--config", sa.config, "Run configuration overrides (JSON)");
    serve_cmd->add_option("--start", sa.start, "Initial robot pose x y theta")->expected(3);

    std::string border_name, script_prior = "lab.yaml", script_out, gen_config;
    std::uint64_t script_seed = 1;
    auto* script_cmd = app.add_subcommand("script", "Generate a scenario script for a built-in lab border");
    script_cmd->add_option("--border", border_name, "map1 .. map10 or carpet")->required();
    script_cmd->add_option("--prior-map", script_prior, "prior_map entry written into the script");
    script_cmd->add_option("--out", script_out, "Output script (JSON)")->required();
    script_cmd->add_option("--seed", script_seed, "Seed for start pose and marker jitter");
    script_cmd->add_option("--generator", gen_config, "Generator settings (JSON)");

    std::string lab_out;
    auto* lab_cmd = app.add_subcommand("lab", "Write the lab room map, the ten-border suite and the carpet script");
    lab_cmd->add_option("--out", lab_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*teach_cmd) {
            if (*seed_opt)
                ta.seed = teach_seed;
            return teach(ta);
        }
        if (*eval_cmd)
            return eval(suite_path, eval_out);
        if (*mapgen_cmd)
            return mapgen(width, height, res, wall, mapgen_out);
        if (*serve_cmd)
            return serve(sa);
        if (*script_cmd)
            return script(border_name, script_prior, script_out, script_seed, gen_config);
        if (*lab_cmd)
            return lab(lab_out);
    } catch (const InputError& e) {
        return report(e.name, e.detail, kExitUsage);
    } catch (const Error& e) {
        return report(e.name(), e.what(), kExitTeaching);
    } catch (const std::exception& e) {
        return report("Error", e.what(), kExitTeaching);
    }
    return kExitUsage;
}
