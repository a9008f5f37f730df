#include "vborder/script_gen.hpp"

#include "vborder/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace vborder {

namespace {

Point2 unit(Point2 v)
{
    const double len = std::hypot(v.x, v.y);
    return { v.x / len, v.y / len };
}

Point2 heading_vector(double angle)
{
    return { std::cos(angle), std::sin(angle) };
}

double angle_of(Point2 v)
{
    return std::atan2(v.y, v.x);
}

/* Accumulates timed marker placements while tracking the intended (nominal)
 * marker position separately from the jittered one actually commanded. */
class MarkerTimeline
{
public:
    MarkerTimeline(const GeneratorConfig& config, std::uint64_t seed)
        : config_(config), rng_(seed) { }

    void place(MarkerId id, Point2 nominal)
    {
        id_ = id;
        nominal_ = nominal;
        emit(nominal);
    }

    /* The teacher turns the cube to another face without moving it */
    void switch_id(MarkerId id)
    {
        id_ = id;
        commands_.push_back({ time_, MarkerCommand::Action::Place, id_, actual_ });
    }

    void wait(double seconds) { time_ += seconds; }

    void move_to(Point2 target)
    {
        const Point2 from = nominal_;
        const double len = distance(from, target);
        if (len <= 0.0)
            return;
        const double duration = len / config_.marker_speed;
        const int steps = std::max(1, static_cast<int>(std::ceil(duration / config_.command_interval)));
        for (int k = 1; k <= steps; ++k) {
            time_ += duration / steps;
            const double s = static_cast<double>(k) / steps;
            nominal_ = from + s * (target - from);
            emit(nominal_);
        }
        nominal_ = target;
    }

    /* Swing the marker on a circle around the robot so it turns in place */
    void swing(Point2 pivot, double from_angle, double to_angle, double radius)
    {
        const double delta = normalize_angle(to_angle - from_angle);
        if (std::abs(delta) < 1e-9)
            return;
        const double duration = std::abs(delta) / config_.turn_rate;
        const int steps = std::max(1, static_cast<int>(std::ceil(duration / config_.command_interval)));
        for (int k = 1; k <= steps; ++k) {
            time_ += duration / steps;
            const double a = from_angle + delta * k / steps;
            nominal_ = pivot + radius * heading_vector(a);
            emit(nominal_);
        }
    }

    std::vector<MarkerCommand> take() { return std::move(commands_); }
    Point2 actual() const { return actual_; }

private:
    void emit(Point2 nominal)
    {
        actual_ = nominal;
        if (config_.marker_jitter > 0.0) {
            std::normal_distribution<double> noise(0.0, config_.marker_jitter);
            actual_.x += noise(rng_);
            actual_.y += noise(rng_);
        }
        commands_.push_back({ time_, MarkerCommand::Action::Place, id_, actual_ });
    }

    const GeneratorConfig& config_;
    std::mt19937_64 rng_;
    std::vector<MarkerCommand> commands_;
    double time_ = 0.0;
    MarkerId id_ = MarkerId::Green;
    Point2 nominal_;
    Point2 actual_;
};

void check_config(const GeneratorConfig& c)
{
    if (!(c.marker_speed > 0.0) || !(c.turn_rate > 0.0) || !(c.command_interval > 0.0))
        throw ValueError("marker speed, turn rate and command interval must be positive");
    if (c.settle_time < 0.0 || c.turn_settle_time < 0.0 || c.marker_jitter < 0.0)
        throw ValueError("settle times and jitter must be non-negative");
    if (!(c.lead > 0.0))
        throw ValueError("marker lead must be positive");
}

} // namespace

Point2 guidance_point(const BorderTask& task)
{
    const auto& v = task.polygon;
    return 0.5 * (v.back() + v.front());
}

Point2 final_marker_position(const BorderTask& task, double lead)
{
    const BorderPolygon polygon(task.polygon);
    const auto& v = task.polygon;
    const Point2 corner = v.front();
    const Point2 e_in = unit(v.front() - v.back());
    const Point2 e_out = unit(v[1] - v.front());

    std::vector<Point2> candidates;
    const Point2 split = e_out - e_in;
    if (std::hypot(split.x, split.y) > 1e-9) {
        candidates.push_back(unit(split));
        candidates.push_back(-1.0 * unit(split));
    }
    candidates.push_back({ -e_out.y, e_out.x });
    candidates.push_back({ e_out.y, -e_out.x });

    for (const Point2& dir : candidates) {
        const Point2 p = corner + lead * dir;
        if (point_on_boundary(p.x, p.y, polygon, 1e-6))
            continue;
        if (point_in_polygon(p.x, p.y, polygon) == task.keep_off)
            return p;
    }
    throw ValueError("no marker spot at the first vertex selects the requested keep-off side");
}

GeneratedScript generate_script(const BorderTask& task, const Pose2& start,
                                const GeneratorConfig& config, std::uint64_t seed)
{
    check_config(config);
    const BorderPolygon polygon(task.polygon);
    const auto& v = task.polygon;
    const std::size_t n = v.size();
    const double lead = config.lead;

    std::vector<Point2> dirs(n);
    for (std::size_t i = 0; i < n; ++i)
        dirs[i] = unit(v[(i + 1) % n] - v[i]);

    const Point2 meet = guidance_point(task);
    const Point2 closing = dirs[n - 1];
    MarkerTimeline line(config, seed);

    /* Start: green guidance to the first vertex along the closing edge */
    line.place(MarkerId::Green, start.position() + lead * heading_vector(start.theta));
    line.wait(0.5);
    const double approach = angle_of(meet - start.position());
    line.swing(start.position(), start.theta, approach, lead);
    line.wait(config.turn_settle_time);
    line.move_to(meet + lead * heading_vector(approach));
    line.wait(config.settle_time);
    line.swing(meet, approach, angle_of(closing), lead);
    line.wait(config.turn_settle_time);
    line.move_to(v[0] + lead * closing);
    line.wait(config.settle_time);
    line.swing(v[0], angle_of(closing), angle_of(dirs[0]), lead);
    line.wait(config.turn_settle_time);

    /* Record: blue around the polygon back to the first vertex */
    line.switch_id(MarkerId::Blue);
    for (std::size_t i = 0; i < n; ++i) {
        line.move_to(v[(i + 1) % n] + lead * dirs[i]);
        line.wait(config.settle_time);
        if (i + 1 < n) {
            line.swing(v[i + 1], angle_of(dirs[i]), angle_of(dirs[i + 1]), lead);
            line.wait(config.turn_settle_time);
        }
    }

    /* Keep off: red, swung towards the side to be blocked */
    line.switch_id(MarkerId::Red);
    const Point2 rest = final_marker_position(task, lead);
    line.swing(v[0], angle_of(closing), angle_of(rest - v[0]), lead);

    GeneratedScript out{ ScenarioScript{}, line.actual() };
    out.script.initial_pose = start;
    out.script.commands = line.take();
    out.script.seed = seed;
    out.script.ground_truth = GroundTruthRef{ "", AnalyticBorder{ task.polygon, rest } };
    return out;
}

Pose2 sample_start_pose(const BorderTask& task, const OccupancyGrid& prior,
                        const GeneratorConfig& config, std::uint64_t seed, double wall_margin)
{
    const GridSpec& spec = prior.spec();
    const Point2 meet = guidance_point(task);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(spec.origin_x, spec.origin_x + spec.extent_x());
    std::uniform_real_distribution<double> uy(spec.origin_y, spec.origin_y + spec.extent_y());
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);

    const auto free_at = [&](Point2 p) {
        const double u = std::floor((p.x - spec.origin_x) / spec.resolution);
        const double w = std::floor((p.y - spec.origin_y) / spec.resolution);
        if (!(u >= 0.0 && u < spec.width && w >= 0.0 && w < spec.height))
            return false;
        return trinarize_value(prior.at(static_cast<int>(u), static_cast<int>(w)), Thresholds{}) == kFree;
    };
    const auto clear_around = [&](Point2 p) {
        if (!free_at(p))
            return false;
        for (int k = 0; k < 16; ++k) {
            const double a = k * 2.0 * 3.141592653589793 / 16;
            if (!free_at(p + wall_margin * heading_vector(a)))
                return false;
        }
        return true;
    };

    for (int attempt = 0; attempt < 100000; ++attempt) {
        const Point2 p{ ux(rng), uy(rng) };
        if (distance(p, meet) < config.approach_min || !clear_around(p))
            continue;
        bool path_clear = true;
        const double len = distance(p, meet);
        for (double s = 0.0; s <= len && path_clear; s += spec.resolution)
            path_clear = free_at(p + (s / len) * (meet - p));
        if (!path_clear)
            continue;
        return Pose2(p.x, p.y, angle_of(meet - p) + jitter(rng));
    }
    throw ValueError("no free start pose found for the guidance point");
}

} // namespace vborder
