#include "vborder/eval.hpp"

#include "vborder/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

namespace vborder {

double agreement_index(const OccupancyGrid& a, const OccupancyGrid& b, const Thresholds& thresholds)
{
    if (!(a.spec() == b.spec()))
        throw SpecMismatch("maps differ in size, resolution or origin");
    const auto ca = a.cells();
    const auto cb = b.cells();
    std::size_t equal = 0;
    for (std::size_t i = 0; i < ca.size(); ++i)
        if (trinarize_value(ca[i], thresholds) == trinarize_value(cb[i], thresholds))
            ++equal;
    return static_cast<double>(equal) / static_cast<double>(ca.size());
}

double occupied_iou(const OccupancyGrid& a, const OccupancyGrid& b, const Thresholds& thresholds)
{
    if (!(a.spec() == b.spec()))
        throw SpecMismatch("maps differ in size, resolution or origin");
    const auto ca = a.cells();
    const auto cb = b.cells();
    std::size_t both = 0;
    std::size_t either = 0;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        const bool oa = trinarize_value(ca[i], thresholds) == kOccupied;
        const bool ob = trinarize_value(cb[i], thresholds) == kOccupied;
        both += oa && ob;
        either += oa || ob;
    }
    return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

OccupancyGrid ground_truth_map(const OccupancyGrid& prior, const BorderPolygon& polygon, Point2 marker,
                               MergeMode mode)
{
    const VirtualBorder border = make_virtual_border(polygon, marker);
    return merge(prior, build_virtual_map(border, prior.spec()), mode);
}

LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys)
{
    if (xs.size() != ys.size() || xs.size() < 2)
        throw ValueError("a line fit needs at least two (x, y) pairs");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0)
        throw ValueError("a line fit needs at least two distinct x values");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

namespace {

std::uint64_t mix_seed(std::uint64_t base, const std::string& name, int trial)
{
    /* FNV-1a over the name, then splitmix64 */
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::uint64_t z = base ^ h ^ (static_cast<std::uint64_t>(trial) * 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

int trial_count(const ExperimentScenario& s, const ExperimentConfig& config)
{
    return s.task ? config.trials : static_cast<int>(s.scripts.size());
}

} // namespace

TrialRecord run_trial(const ExperimentScenario& scenario, int trial, const ExperimentConfig& config)
{
    TrialRecord rec;
    rec.scenario = scenario.name;
    rec.length_m = scenario.length_m;
    rec.trial = trial;
    try {
        if (!scenario.prior)
            throw ValueError("scenario '" + scenario.name + "' has no prior map");

        ScenarioScript script;
        std::shared_ptr<const OccupancyGrid> truth;
        if (scenario.task) {
            rec.seed = mix_seed(config.seed, scenario.name, trial);
            GeneratorConfig gen = config.generator;
            gen.lead = config.run.sim.follow_stop_distance;
            const Pose2 start = sample_start_pose(*scenario.task, *scenario.prior, gen, rec.seed);
            GeneratedScript generated = generate_script(*scenario.task, start, gen, rec.seed);
            script = std::move(generated.script);
            const auto& gt = *script.ground_truth->analytic;
            truth = std::make_shared<const OccupancyGrid>(ground_truth_map(
                *scenario.prior, BorderPolygon(gt.polygon), gt.marker, config.run.merge_mode));
        } else {
            script = scenario.scripts.at(static_cast<std::size_t>(trial));
            rec.seed = script.seed;
            truth = scenario.script_truths.at(static_cast<std::size_t>(trial));
        }

        const SessionResult result = run_scenario(*scenario.prior, script, config.run);
        rec.agreement = agreement_index(result.posterior, *truth);
        rec.iou = occupied_iou(result.posterior, *truth);
        rec.time_excl_idle = result.times.excluding_idle();
        rec.time_incl_idle = result.times.including_idle();
        rec.closure_gap = result.closure_gap;
        rec.ok = true;
    } catch (const Error& e) {
        rec.ok = false;
        rec.error = e.name();
        rec.detail = e.what();
    }
    return rec;
}

AccuracyReport summarize_accuracy(std::vector<TrialRecord> trials)
{
    AccuracyReport report;
    std::vector<std::string> order;
    std::map<std::string, ScenarioAccuracy> by_name;
    std::map<std::string, std::vector<double>> values;

    for (const TrialRecord& t : trials) {
        if (!by_name.count(t.scenario)) {
            order.push_back(t.scenario);
            by_name[t.scenario] = ScenarioAccuracy{ t.scenario, t.length_m, 0, 0, 0.0, 0.0, 0.0 };
        }
        auto& s = by_name[t.scenario];
        if (t.ok) {
            ++s.succeeded;
            values[t.scenario].push_back(t.agreement);
        } else {
            ++s.failed;
        }
    }

    int counted = 0;
    for (const std::string& name : order) {
        ScenarioAccuracy s = by_name[name];
        const auto& v = values[name];
        if (!v.empty()) {
            s.minimum = *std::min_element(v.begin(), v.end());
            s.maximum = *std::max_element(v.begin(), v.end());
            s.average = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
            report.average_length += s.length_m;
            report.average_minimum += s.minimum;
            report.average_maximum += s.maximum;
            report.average_average += s.average;
            ++counted;
        }
        report.scenarios.push_back(s);
    }
    if (counted > 0) {
        report.average_length /= counted;
        report.average_minimum /= counted;
        report.average_maximum /= counted;
        report.average_average /= counted;
    }
    report.trials = std::move(trials);
    return report;
}

EffortReport summarize_effort(const std::vector<TrialRecord>& trials)
{
    EffortReport report;
    std::map<double, std::vector<const TrialRecord*>> by_length;
    std::vector<double> xs, excl, incl;
    for (const TrialRecord& t : trials) {
        if (!t.ok)
            continue;
        by_length[t.length_m].push_back(&t);
        xs.push_back(t.length_m);
        excl.push_back(t.time_excl_idle);
        incl.push_back(t.time_incl_idle);
    }
    for (const auto& [length, recs] : by_length) {
        LengthEffort e;
        e.length_m = length;
        e.samples = static_cast<int>(recs.size());
        e.min_excl_idle = recs.front()->time_excl_idle;
        e.max_excl_idle = recs.front()->time_excl_idle;
        for (const TrialRecord* r : recs) {
            e.mean_excl_idle += r->time_excl_idle;
            e.mean_incl_idle += r->time_incl_idle;
            e.min_excl_idle = std::min(e.min_excl_idle, r->time_excl_idle);
            e.max_excl_idle = std::max(e.max_excl_idle, r->time_excl_idle);
        }
        e.mean_excl_idle /= e.samples;
        e.mean_incl_idle /= e.samples;
        report.lengths.push_back(e);
    }
    if (by_length.size() >= 2) {
        report.fit_excl_idle = fit_line(xs, excl);
        report.fit_incl_idle = fit_line(xs, incl);
    }
    return report;
}

ExperimentResult run_experiment(const std::vector<ExperimentScenario>& suite, const ExperimentConfig& config)
{
    if (suite.empty())
        throw ValueError("experiment suite is empty");
    if (config.trials < 1)
        throw ValueError("trials per scenario must be at least 1");

    std::vector<TrialRecord> trials;
    for (const ExperimentScenario& scenario : suite) {
        const int n = trial_count(scenario, config);
        for (int t = 0; t < n; ++t)
            trials.push_back(run_trial(scenario, t, config));
    }
    EffortReport effort = summarize_effort(trials);
    return { summarize_accuracy(std::move(trials)), std::move(effort) };
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string fmt(const char* format, double value)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, value);
    return buf;
}

} // namespace

std::string render_trials_csv(const AccuracyReport& report)
{
    std::ostringstream os;
    os << "scenario,length_m,trial,agreement,time_s_excl_idle,time_s_incl_idle,status\n";
    for (const TrialRecord& t : report.trials) {
        os << csv_field(t.scenario) << "," << fmt("%.3f", t.length_m) << "," << t.trial << ",";
        if (t.ok)
            os << fmt("%.6f", t.agreement) << "," << fmt("%.2f", t.time_excl_idle) << ","
               << fmt("%.2f", t.time_incl_idle) << ",ok\n";
        else
            os << ",,," << csv_field(t.error) << "\n";
    }
    return os.str();
}

std::string render_accuracy_table(const AccuracyReport& report)
{
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof(line), "%-14s %12s %9s %9s %9s\n", "Map", "Length [m]", "Minimum", "Maximum",
                  "Average");
    os << line;
    const auto pct = [](double v) { return fmt("%.1f%%", 100.0 * v); };
    for (const ScenarioAccuracy& s : report.scenarios) {
        if (s.succeeded == 0) {
            std::snprintf(line, sizeof(line), "%-14s %12s %9s %9s %9s\n", s.scenario.c_str(),
                          fmt("%.1f", s.length_m).c_str(), "failed", "failed", "failed");
        } else {
            std::snprintf(line, sizeof(line), "%-14s %12s %9s %9s %9s\n", s.scenario.c_str(),
                          fmt("%.1f", s.length_m).c_str(), pct(s.minimum).c_str(), pct(s.maximum).c_str(),
                          pct(s.average).c_str());
        }
        os << line;
        if (s.failed > 0)
            os << "  (" << s.failed << " failed trial" << (s.failed > 1 ? "s" : "") << ")\n";
    }
    std::snprintf(line, sizeof(line), "%-14s %12s %9s %9s %9s\n", "Average",
                  fmt("%.1f", report.average_length).c_str(), pct(report.average_minimum).c_str(),
                  pct(report.average_maximum).c_str(), pct(report.average_average).c_str());
    os << line;
    return os.str();
}

std::string render_effort_csv(const EffortReport& report)
{
    std::ostringstream os;
    os << "length_m,samples,mean_time_s_excl_idle,mean_time_s_incl_idle,min_time_s_excl_idle,"
          "max_time_s_excl_idle\n";
    for (const LengthEffort& e : report.lengths)
        os << fmt("%.3f", e.length_m) << "," << e.samples << "," << fmt("%.2f", e.mean_excl_idle) << ","
           << fmt("%.2f", e.mean_incl_idle) << "," << fmt("%.2f", e.min_excl_idle) << ","
           << fmt("%.2f", e.max_excl_idle) << "\n";
    os << "# fit_excl_idle slope=" << fmt("%.4f", report.fit_excl_idle.slope)
       << " intercept=" << fmt("%.4f", report.fit_excl_idle.intercept)
       << " r2=" << fmt("%.5f", report.fit_excl_idle.r_squared) << "\n";
    os << "# fit_incl_idle slope=" << fmt("%.4f", report.fit_incl_idle.slope)
       << " intercept=" << fmt("%.4f", report.fit_incl_idle.intercept)
       << " r2=" << fmt("%.5f", report.fit_incl_idle.r_squared) << "\n";
    return os.str();
}

double calibrate_marker_speed(const ExperimentScenario& scenario, const ExperimentConfig& config,
                              double target_seconds, int trials)
{
    if (!scenario.task)
        throw ValueError("calibration needs a generated scenario");

    const auto mean_time = [&](double speed) {
        ExperimentConfig c = config;
        c.generator.marker_speed = speed;
        double sum = 0.0;
        for (int t = 0; t < trials; ++t) {
            const TrialRecord rec = run_trial(scenario, t, c);
            if (!rec.ok)
                throw Error(rec.error, "calibration trial failed: " + rec.detail);
            sum += rec.time_excl_idle;
        }
        return sum / trials;
    };

    /* teaching time falls as the marker speeds up */
    double lo = 0.02;
    double hi = std::max(0.05, config.run.sim.v_max * 0.9);
    if (mean_time(hi) > target_seconds)
        return hi;
    if (mean_time(lo) < target_seconds)
        return lo;
    for (int i = 0; i < 30 && hi - lo > 1e-4; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mean_time(mid) > target_seconds)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace vborder
