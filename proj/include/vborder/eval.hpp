#pragma once

#include "vborder/gridmap.hpp"
#include "vborder/scenario.hpp"
#include "vborder/script_gen.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vborder {

/* Fraction of cells holding the same trinarized value in both maps.
 * Throws SpecMismatch. */
double agreement_index(const OccupancyGrid& a, const OccupancyGrid& b,
                       const Thresholds& thresholds = {});

/* Intersection over union of the occupied cells; 1 when neither map has any */
double occupied_iou(const OccupancyGrid& a, const OccupancyGrid& b,
                    const Thresholds& thresholds = {});

/* Ideal posterior for an analytic border, no simulation involved */
OccupancyGrid ground_truth_map(const OccupancyGrid& prior, const BorderPolygon& polygon,
                               Point2 marker, MergeMode mode = MergeMode::PreserveUnknown);

struct LinearFit
{
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/* Ordinary least squares; throws ValueError for fewer than 2 points or
 * constant x */
LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

/// One map of the experiment. Either `task` is set and per-trial scripts are
/// generated from it, or `scripts` holds one ready-made script per trial.
struct ExperimentScenario
{
    std::string name;
    double length_m = 0.0;
    std::shared_ptr<const OccupancyGrid> prior;
    std::optional<BorderTask> task;
    std::vector<ScenarioScript> scripts;
    /* ground-truth maps for `scripts`, parallel to it */
    std::vector<std::shared_ptr<const OccupancyGrid>> script_truths;
};

struct ExperimentConfig
{
    int trials = 5;
    std::uint64_t seed = 1;
    RunConfig run;
    GeneratorConfig generator;
};

struct TrialRecord
{
    std::string scenario;
    double length_m = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    /* error name of a failed trial */
    std::string error;
    std::string detail;
    double agreement = 0.0;
    double iou = 0.0;
    double time_excl_idle = 0.0;
    double time_incl_idle = 0.0;
    double closure_gap = 0.0;
};

struct ScenarioAccuracy
{
    std::string scenario;
    double length_m = 0.0;
    int succeeded = 0;
    int failed = 0;
    double minimum = 0.0;
    double maximum = 0.0;
    double average = 0.0;
};

struct AccuracyReport
{
    std::vector<TrialRecord> trials;
    std::vector<ScenarioAccuracy> scenarios;
    /* column averages over scenarios, as in the summary row of the table */
    double average_length = 0.0;
    double average_minimum = 0.0;
    double average_maximum = 0.0;
    double average_average = 0.0;
};

struct LengthEffort
{
    double length_m = 0.0;
    int samples = 0;
    double mean_excl_idle = 0.0;
    double mean_incl_idle = 0.0;
    double min_excl_idle = 0.0;
    double max_excl_idle = 0.0;
};

struct EffortReport
{
    std::vector<LengthEffort> lengths;
    /* fits over every successful trial */
    LinearFit fit_excl_idle;
    LinearFit fit_incl_idle;
};

struct ExperimentResult
{
    AccuracyReport accuracy;
    EffortReport effort;
};

/* Runs every trial; failures are recorded, not dropped. Trials are reduced in
 * (scenario, trial) order. */
ExperimentResult run_experiment(const std::vector<ExperimentScenario>& suite,
                                const ExperimentConfig& config);

/* Single trial of a generated scenario */
TrialRecord run_trial(const ExperimentScenario& scenario, int trial, const ExperimentConfig& config);

AccuracyReport summarize_accuracy(std::vector<TrialRecord> trials);
EffortReport summarize_effort(const std::vector<TrialRecord>& trials);

std::string render_trials_csv(const AccuracyReport& report);
std::string render_accuracy_table(const AccuracyReport& report);
std::string render_effort_csv(const EffortReport& report);

/* Bisection on the marker speed so the mean teaching time (excluding idle)
 * of `scenario` over `trials` trials hits target_seconds */
double calibrate_marker_speed(const ExperimentScenario& scenario, const ExperimentConfig& config,
                              double target_seconds, int trials = 2);

} // namespace vborder
