#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "saddleflow/analysis.hpp"
#include "saddleflow/dynamics.hpp"
#include "saddleflow/integrator.hpp"
#include "saddleflow/problems.hpp"
#include "saddleflow/rng.hpp"
#include "saddleflow/schedules.hpp"

namespace saddleflow {

struct ToyParams {
    double mc = 1.0;
    double nc = 6.0;
    double jc = 4.0;
    double kc = 10.0;
};

struct RegressionParams {
    std::size_t rows = 100;  // m
    std::size_t cols = 200;  // n
    double kappa = 35.0;
    double sigma_max = 1.0;
    double omega = 0.1;
    double a = 100.0;
};

/// Full description of one experiment run. The time span is
/// [schedules.t0, t_end]; samples are log-spaced over it. Empty initial
/// vectors mean the zero start ("zeros" rule).
struct ExperimentConfig {
    enum class ProblemTag { Toy, Regression };

    ProblemTag problem_tag = ProblemTag::Toy;
    ToyParams toy;
    RegressionParams regression;

    SystemVariant variant;
    ScheduleSet schedules;
    double t_end = 20.0;
    std::size_t sample_count = 400;
    RngSeed seed{42};
    IntegratorConfig integrator;

    std::vector<double> x0, y0, xdot0, ydot0;  // all empty => zeros

    std::string label;

    /// For problems without a stored saddle: derive a gap reference from a
    /// long-horizon run (reported as a numeric reference, not ground truth).
    bool use_numeric_reference = false;

    void validate() const;
};

struct RunResult {
    ExperimentConfig config;
    std::vector<TrajectorySample> samples;
    ConditionReport condition_report;  // over the variant's effective schedules
    RegimeClass regime;
    double wall_time_s = 0.0;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
    bool failed = false;
    double failure_time = 0.0;
    std::string failure_reason;
};

/// Integration aborted; carries the annotated partial trajectory.
class ExperimentFailure : public std::runtime_error {
public:
    ExperimentFailure(const std::string& what, RunResult partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}

    const RunResult& partial() const { return partial_; }

private:
    RunResult partial_;
};

/// Problem instance described by the config; regression K and b are derived
/// deterministically from the seed.
SaddleProblem build_problem(const ExperimentConfig& config);

/// Schedule set actually driving the variant: the config's own for the
/// regularized flow, the config's with the Tikhonov term zeroed for the
/// eps == 0 variants, and the fixed internal choice for the baseline.
ScheduleSet effective_schedules(const ExperimentConfig& config);

/// Log-spaced sample grid over [t0, t_end], endpoints exact.
std::vector<double> sample_grid(double t0, double t_end, std::size_t count);

/// Long-horizon surrogate for an unknown saddle point: integrates the
/// regularized flow to horizon_multiplier * t_end and returns the sampled
/// point with the smallest optimality residual.
PrimalDualPoint numeric_reference(const ExperimentConfig& config, const SaddleProblem& problem,
                                  double horizon_multiplier = 2.5);

RunResult run(const ExperimentConfig& config);

/// run() restricted to regression configs.
RunResult run_regression(const ExperimentConfig& config);

/// Runs a batch of configs, possibly concurrently. The SADDLEFLOW_THREADS
/// environment variable caps the worker count.
std::vector<RunResult> run_batch(std::span<const ExperimentConfig> configs);

struct ComparisonRow {
    std::string label;
    double final_value = 0.0;
    double slope = 0.0;
};

/// Time series of one named metric (gap, beta_gap, norm_xy, dist_minnorm,
/// speed_x, speed_y, speed_sum, grad_res_f, grad_res_g, e_fast, e_slow, phi).
/// beta_gap = beta(t) * gap(t): a decreasing tail is the finite-horizon
/// surrogate for the slow-regime rate statement.
std::vector<std::pair<double, double>> metric_series(const RunResult& result,
                                                     const std::string& metric);

/// Runs every config (they must share problem and span) and tabulates the
/// final value plus the log-log slope of the chosen metric over the window.
/// Rows come back sorted by final value, best first.
std::vector<ComparisonRow> compare(std::span<const ExperimentConfig> configs,
                                   const std::string& metric,
                                   std::pair<double, double> window,
                                   std::vector<RunResult>* runs_out = nullptr);

/// Named configurations of the two study problems.
ExperimentConfig preset_example1_tikhonov();
ExperimentConfig preset_example1_notikhonov();
std::vector<ExperimentConfig> preset_example1_sweep();
std::vector<ExperimentConfig> preset_example1_vs_apdd();
ExperimentConfig preset_example2();

std::optional<std::vector<ExperimentConfig>> preset_by_name(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace saddleflow
