#include "saddleflow/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "saddleflow/errors.hpp"
#include "saddleflow/numerics.hpp"

namespace saddleflow {

void ExperimentConfig::validate() const {
    if (sample_count < 2)
        throw std::invalid_argument("ExperimentConfig: sample_count must be >= 2");
    if (!(t_end > schedules.t0))
        throw std::invalid_argument("ExperimentConfig: t_end must exceed t0");
    integrator.validate();
    const bool any_init = !x0.empty() || !y0.empty() || !xdot0.empty() || !ydot0.empty();
    const bool all_init = !x0.empty() && !y0.empty() && !xdot0.empty() && !ydot0.empty();
    if (any_init && !all_init)
        throw std::invalid_argument(
            "ExperimentConfig: either give all four initial vectors or none");
    if (problem_tag == ProblemTag::Regression) {
        if (regression.rows == 0 || regression.cols == 0)
            throw std::invalid_argument("ExperimentConfig: regression dimensions must be positive");
        if (!(regression.kappa >= 1.0))
            throw std::invalid_argument("ExperimentConfig: kappa must be >= 1");
    }
}

SaddleProblem build_problem(const ExperimentConfig& config) {
    if (config.problem_tag == ExperimentConfig::ProblemTag::Toy) {
        return quadratic_minmax_problem(config.toy.mc, config.toy.nc, config.toy.jc,
                                        config.toy.kc);
    }
    // K and b come from independent substreams of the config seed, so every
    // variant sharing the seed sees bit-identical data.
    SplitMix64 splitter(config.seed);
    const RngSeed seed_k = splitter.fork();
    const RngSeed seed_b = splitter.fork();
    Matrix k = conditioned_matrix(config.regression.rows, config.regression.cols,
                                  config.regression.kappa, config.regression.sigma_max, seed_k);
    GaussianSampler sampler(seed_b);
    std::vector<double> b(config.regression.rows);
    for (double& v : b) v = sampler.next();
    return regression_saddle_problem(std::move(k), std::move(b), config.regression.omega,
                                     config.regression.a);
}

ScheduleSet effective_schedules(const ExperimentConfig& config) {
    const ScheduleSet& s = config.schedules;
    switch (config.variant.tag) {
        case SystemVariant::Tag::Han:
            return s;
        case SystemVariant::Tag::HanNoTikhonov:
        case SystemVariant::Tag::Mpdd:
            return ScheduleSet::make(s.damping, s.scaling, ScheduleFamily::zero_tikhonov(),
                                     s.theta, s.t0);
        case SystemVariant::Tag::Apdd:
            return ScheduleSet::make(ScheduleFamily::power_damping(config.variant.apdd_alpha),
                                     ScheduleFamily::constant_scaling(1.0),
                                     ScheduleFamily::zero_tikhonov(),
                                     config.variant.apdd_theta(), s.t0);
    }
    throw std::logic_error("effective_schedules: unknown variant");
}

std::vector<double> sample_grid(double t0, double t_end, std::size_t count) {
    if (count < 2) throw std::invalid_argument("sample_grid: need at least 2 samples");
    std::vector<double> grid(count);
    const double ratio = t_end / t0;
    for (std::size_t i = 0; i < count; ++i)
        grid[i] = t0 * std::pow(ratio, static_cast<double>(i) / (count - 1));
    grid.front() = t0;
    grid.back() = t_end;
    return grid;
}

namespace {

FlatState initial_state(const ExperimentConfig& config, const SaddleProblem& problem) {
    const double t0 = config.schedules.t0;
    if (config.x0.empty()) {
        std::vector<double> zeros_n(problem.n, 0.0), zeros_m(problem.m, 0.0);
        return pack_state(t0, zeros_n, zeros_m, zeros_n, zeros_m);
    }
    if (config.x0.size() != problem.n || config.xdot0.size() != problem.n ||
        config.y0.size() != problem.m || config.ydot0.size() != problem.m)
        throw std::invalid_argument("initial state dimensions do not match the problem");
    return pack_state(t0, config.x0, config.y0, config.xdot0, config.ydot0);
}

RunResult annotate_into_result(const ExperimentConfig& config, const SaddleProblem& problem,
                               const ScheduleSet& effective,
                               std::span<const FlatState> states, std::size_t accepted,
                               std::size_t rejected,
                               const PrimalDualPoint* extra_ref) {
    const PrimalDualPoint* ref =
        problem.known_saddle ? &*problem.known_saddle : extra_ref;
    AnnotateOptions options;
    // Energy certificates are defined against an exact saddle; a numeric
    // reference still yields gap and residual columns but no energies.
    options.energies = problem.known_saddle.has_value();
    RunResult result{
        .config = config,
        .samples = annotate(states, problem, effective, ref, options),
        .condition_report = validate_conditions(effective),
        .regime = classify_regime(effective),
        .wall_time_s = 0.0,
        .steps_accepted = accepted,
        .steps_rejected = rejected,
        .failed = false,
        .failure_time = 0.0,
        .failure_reason = {},
    };
    return result;
}

}  // namespace

PrimalDualPoint numeric_reference(const ExperimentConfig& config, const SaddleProblem& problem,
                                  double horizon_multiplier) {
    if (!(horizon_multiplier >= 1.0))
        throw std::invalid_argument("numeric_reference: horizon_multiplier must be >= 1");
    ExperimentConfig probe = config;
    probe.variant = SystemVariant::han();
    probe.use_numeric_reference = false;
    if (probe.schedules.tikhonov.kind() == ScheduleFamily::Kind::ZeroTikhonov)
        probe.schedules = ScheduleSet::make(probe.schedules.damping, probe.schedules.scaling,
                                            ScheduleFamily::power_tikhonov(10.0, 2.0),
                                            probe.schedules.theta, probe.schedules.t0);
    probe.t_end = config.t_end * horizon_multiplier;

    const FlatState start = initial_state(probe, problem);
    const auto grid = sample_grid(probe.schedules.t0, probe.t_end, 64);
    RhsEvaluator evaluator(probe.variant, problem, probe.schedules);
    RhsFunction f = [&evaluator](double t, std::span<const double> y, std::span<double> dy) {
        evaluator(t, y, dy);
    };
    IntegrationResult integ = integrate(f, start, probe.t_end, grid, probe.integrator);

    double best = std::numeric_limits<double>::infinity();
    PrimalDualPoint best_point;
    for (const FlatState& state : integ.states) {
        const auto blocks = split_state(state.lambda, problem.n, problem.m);
        PrimalDualPoint pt{{blocks.x.begin(), blocks.x.end()},
                           {blocks.y.begin(), blocks.y.end()}};
        const double res = saddle_residual(problem, pt);
        if (res < best) {
            best = res;
            best_point = std::move(pt);
        }
    }
    return best_point;
}

RunResult run(const ExperimentConfig& config) {
    config.validate();
    const auto t_begin = std::chrono::steady_clock::now();

    const SaddleProblem problem = build_problem(config);
    const ScheduleSet effective = effective_schedules(config);
    const FlatState start = initial_state(config, problem);
    const auto grid = sample_grid(config.schedules.t0, config.t_end, config.sample_count);

    std::optional<PrimalDualPoint> extra_ref;
    if (config.use_numeric_reference && !problem.known_saddle)
        extra_ref = numeric_reference(config, problem);
    const PrimalDualPoint* extra = extra_ref ? &*extra_ref : nullptr;

    RhsEvaluator evaluator(config.variant, problem, config.schedules);
    RhsFunction f = [&evaluator](double t, std::span<const double> y, std::span<double> dy) {
        evaluator(t, y, dy);
    };

    auto finish = [&](RunResult result) {
        const auto t_done = std::chrono::steady_clock::now();
        result.wall_time_s = std::chrono::duration<double>(t_done - t_begin).count();
        return result;
    };

    try {
        IntegrationResult integ = integrate(f, start, config.t_end, grid, config.integrator);
        return finish(annotate_into_result(config, problem, effective, integ.states,
                                           integ.steps_accepted, integ.steps_rejected, extra));
    } catch (const NumericalBlowupError& e) {
        RunResult partial =
            finish(annotate_into_result(config, problem, effective, {}, 0, 0, extra));
        partial.failed = true;
        partial.failure_time = e.at_time();
        partial.failure_reason = e.what();
        throw ExperimentFailure(e.what(), std::move(partial));
    } catch (const BudgetExceededError& e) {
        RunResult partial = finish(
            annotate_into_result(config, problem, effective, e.partial(), 0, 0, extra));
        partial.failed = true;
        partial.failure_time = e.partial().empty() ? config.schedules.t0 : e.partial().back().t;
        partial.failure_reason = e.what();
        throw ExperimentFailure(e.what(), std::move(partial));
    }
}

RunResult run_regression(const ExperimentConfig& config) {
    if (config.problem_tag != ExperimentConfig::ProblemTag::Regression)
        throw std::invalid_argument("run_regression: config does not describe a regression run");
    return run(config);
}

std::vector<RunResult> run_batch(std::span<const ExperimentConfig> configs) {
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SADDLEFLOW_THREADS")) {
        const long parsed = std::strtol(env, nullptr, 10);
        if (parsed >= 1) workers = static_cast<std::size_t>(parsed);
    }
    workers = std::min(workers, configs.size());

    std::vector<std::optional<RunResult>> slots(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());

    if (workers <= 1) {
        for (std::size_t i = 0; i < configs.size(); ++i) {
            try {
                slots[i] = run(configs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> cursor{0};
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = cursor.fetch_add(1);
                    if (i >= configs.size()) return;
                    try {
                        slots[i] = run(configs[i]);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
    }

    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);

    std::vector<RunResult> results;
    results.reserve(configs.size());
    for (auto& slot : slots) results.push_back(std::move(*slot));
    return results;
}

std::vector<std::pair<double, double>> metric_series(const RunResult& result,
                                                     const std::string& metric) {
    // beta_gap is the scale-weighted gap beta(t) * gap(t); its decrease over
    // the tail is the finite-horizon surrogate for the slow-regime rate.
    const ScheduleSet effective = effective_schedules(result.config);
    std::vector<std::pair<double, double>> series;
    series.reserve(result.samples.size());
    for (const auto& ts : result.samples) {
        double v;
        if (metric == "gap") {
            if (!ts.gap) throw std::invalid_argument("metric_series: gap needs a reference saddle");
            v = *ts.gap;
        } else if (metric == "beta_gap") {
            if (!ts.gap) throw std::invalid_argument("metric_series: gap needs a reference saddle");
            v = effective.scaling.value(ts.t) * *ts.gap;
        } else if (metric == "norm_xy") {
            v = ts.norm_xy;
        } else if (metric == "dist_minnorm") {
            if (!ts.dist_minnorm)
                throw std::invalid_argument("metric_series: dist_minnorm unavailable");
            v = *ts.dist_minnorm;
        } else if (metric == "speed_x") {
            v = ts.speed_x;
        } else if (metric == "speed_y") {
            v = ts.speed_y;
        } else if (metric == "speed_sum") {
            v = ts.speed_x + ts.speed_y;
        } else if (metric == "grad_res_f") {
            if (!ts.grad_res_f) throw std::invalid_argument("metric_series: grad_res_f unavailable");
            v = *ts.grad_res_f;
        } else if (metric == "grad_res_g") {
            if (!ts.grad_res_g) throw std::invalid_argument("metric_series: grad_res_g unavailable");
            v = *ts.grad_res_g;
        } else if (metric == "e_fast") {
            if (!ts.e_fast) throw std::invalid_argument("metric_series: e_fast unavailable");
            v = *ts.e_fast;
        } else if (metric == "e_slow") {
            if (!ts.e_slow) throw std::invalid_argument("metric_series: e_slow unavailable");
            v = *ts.e_slow;
        } else if (metric == "phi") {
            if (!ts.phi) throw std::invalid_argument("metric_series: phi unavailable");
            v = *ts.phi;
        } else {
            throw std::invalid_argument("metric_series: unknown metric '" + metric + "'");
        }
        series.emplace_back(ts.t, v);
    }
    return series;
}

namespace {

bool same_problem(const ExperimentConfig& a, const ExperimentConfig& b) {
    if (a.problem_tag != b.problem_tag) return false;
    if (a.schedules.t0 != b.schedules.t0 || a.t_end != b.t_end) return false;
    if (a.problem_tag == ExperimentConfig::ProblemTag::Toy)
        return a.toy.mc == b.toy.mc && a.toy.nc == b.toy.nc && a.toy.jc == b.toy.jc &&
               a.toy.kc == b.toy.kc;
    return a.regression.rows == b.regression.rows && a.regression.cols == b.regression.cols &&
           a.regression.kappa == b.regression.kappa &&
           a.regression.sigma_max == b.regression.sigma_max &&
           a.regression.omega == b.regression.omega && a.regression.a == b.regression.a &&
           a.seed.value == b.seed.value;
}

}  // namespace

std::vector<ComparisonRow> compare(std::span<const ExperimentConfig> configs,
                                   const std::string& metric,
                                   std::pair<double, double> window,
                                   std::vector<RunResult>* runs_out) {
    if (configs.empty()) throw std::invalid_argument("compare: need at least one config");
    for (const auto& c : configs)
        if (!same_problem(configs.front(), c))
            throw std::invalid_argument("compare: configs must share the problem and span");

    std::vector<RunResult> runs = run_batch(configs);

    std::vector<ComparisonRow> rows;
    rows.reserve(runs.size());
    for (const auto& r : runs) {
        const auto series = metric_series(r, metric);
        ComparisonRow row;
        row.label = r.config.label.empty() ? r.config.variant.describe() : r.config.label;
        row.final_value = series.back().second;
        row.slope = rate_slope(series, window);
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
        return a.final_value < b.final_value;
    });
    if (runs_out) *runs_out = std::move(runs);
    return rows;
}

namespace {

ExperimentConfig example1_base() {
    return ExperimentConfig{
        .problem_tag = ExperimentConfig::ProblemTag::Toy,
        .toy = ToyParams{1.0, 6.0, 4.0, 10.0},
        .regression = RegressionParams{},
        .variant = SystemVariant::han(),
        .schedules = ScheduleSet::make(ScheduleFamily::power_damping(17.0),
                                       ScheduleFamily::power_scaling(1.0),
                                       ScheduleFamily::power_tikhonov(7.0, 2.0),
                                       1.0 / 16.0, 1.0),
        .t_end = 20.0,
        .sample_count = 400,
        .seed = RngSeed{42},
        .integrator = IntegratorConfig{},
        .x0 = {1.0, 1.5},
        .y0 = {1.0, 1.5},
        .xdot0 = {1.0, 1.0},
        .ydot0 = {1.0, 1.0},
        .label = "",
    };
}

}  // namespace

ExperimentConfig preset_example1_tikhonov() {
    ExperimentConfig c = example1_base();
    c.label = "han eps=7/t^2";
    return c;
}

ExperimentConfig preset_example1_notikhonov() {
    ExperimentConfig c = example1_base();
    c.variant = SystemVariant::han_no_tikhonov();
    c.schedules = ScheduleSet::make(c.schedules.damping, c.schedules.scaling,
                                    ScheduleFamily::zero_tikhonov(), c.schedules.theta,
                                    c.schedules.t0);
    c.label = "han eps=0";
    return c;
}

std::vector<ExperimentConfig> preset_example1_sweep() {
    std::vector<ExperimentConfig> configs;
    for (double r : {1.2, 1.6, 2.0, 2.4, 2.8}) {
        ExperimentConfig c = example1_base();
        c.schedules = ScheduleSet::make(c.schedules.damping, c.schedules.scaling,
                                        ScheduleFamily::power_tikhonov(7.0, r),
                                        c.schedules.theta, c.schedules.t0);
        c.label = "han eps=7/t^" + std::to_string(r);
        configs.push_back(std::move(c));
    }
    return configs;
}

std::vector<ExperimentConfig> preset_example1_vs_apdd() {
    std::vector<ExperimentConfig> configs;
    configs.push_back(preset_example1_tikhonov());
    for (double alpha : {2.0, 5.0}) {
        ExperimentConfig c = example1_base();
        c.variant = SystemVariant::apdd(alpha);
        c.label = "apdd alpha=" + std::to_string(alpha);
        configs.push_back(std::move(c));
    }
    return configs;
}

ExperimentConfig preset_example2() {
    return ExperimentConfig{
        .problem_tag = ExperimentConfig::ProblemTag::Regression,
        .toy = ToyParams{},
        .regression = RegressionParams{100, 200, 35.0, 1.0, 0.1, 100.0},
        .variant = SystemVariant::han(),
        .schedules = ScheduleSet::make(ScheduleFamily::power_damping(7.0),
                                       ScheduleFamily::power_scaling(1.0),
                                       ScheduleFamily::power_tikhonov(1.0, 2.0),
                                       1.0 / 6.0, 1.0),
        .t_end = 20.0,
        .sample_count = 400,
        .seed = RngSeed{7},
        .integrator = IntegratorConfig{},
        .x0 = {},
        .y0 = {},
        .xdot0 = {},
        .ydot0 = {},
        .label = "regression han eps=1/t^2",
    };
}

std::optional<std::vector<ExperimentConfig>> preset_by_name(const std::string& name) {
    if (name == "example1-tikhonov") return std::vector<ExperimentConfig>{preset_example1_tikhonov()};
    if (name == "example1-notikhonov")
        return std::vector<ExperimentConfig>{preset_example1_notikhonov()};
    if (name == "example1-sweep") return preset_example1_sweep();
    if (name == "example1-vs-apdd") return preset_example1_vs_apdd();
    if (name == "example2") return std::vector<ExperimentConfig>{preset_example2()};
    return std::nullopt;
}

std::vector<std::string> preset_names() {
    return {"example1-tikhonov", "example1-notikhonov", "example1-sweep", "example1-vs-apdd",
            "example2"};
}

}  // namespace saddleflow
