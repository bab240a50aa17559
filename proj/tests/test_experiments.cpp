#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstring>

#include "saddleflow/experiments.hpp"

using namespace saddleflow;

namespace {

ExperimentConfig small_regression_config() {
    ExperimentConfig c = preset_example2();
    c.regression.rows = 20;
    c.regression.cols = 30;
    c.regression.kappa = 5.0;
    c.sample_count = 32;
    c.integrator.rtol = 1e-7;
    c.integrator.atol = 1e-9;
    return c;
}

}  // namespace

TEST_CASE("sample grid is log-spaced with exact endpoints") {
    const auto grid = sample_grid(1.0, 20.0, 10);
    CHECK(grid.size() == 10);
    CHECK(grid.front() == 1.0);
    CHECK(grid.back() == 20.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(grid[i] > grid[i - 1]);
        // log spacing: constant ratio
        CHECK(grid[i] / grid[i - 1] ==
              doctest::Approx(std::pow(20.0, 1.0 / 9.0)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(sample_grid(1.0, 20.0, 1), std::invalid_argument);
}

TEST_CASE("effective schedules per variant") {
    ExperimentConfig c = preset_example1_tikhonov();

    c.variant = SystemVariant::han();
    CHECK(effective_schedules(c).tikhonov.kind() == ScheduleFamily::Kind::PowerTikhonov);

    c.variant = SystemVariant::han_no_tikhonov();
    CHECK(effective_schedules(c).tikhonov.kind() == ScheduleFamily::Kind::ZeroTikhonov);

    c.variant = SystemVariant::mpdd();
    CHECK(effective_schedules(c).tikhonov.kind() == ScheduleFamily::Kind::ZeroTikhonov);

    c.variant = SystemVariant::apdd(2.0);
    const ScheduleSet apdd = effective_schedules(c);
    CHECK(apdd.damping.kind() == ScheduleFamily::Kind::PowerDamping);
    CHECK(apdd.damping.param1() == 2.0);
    CHECK(apdd.scaling.kind() == ScheduleFamily::Kind::ConstantScaling);
    CHECK(apdd.theta == 0.75);
}

TEST_CASE("regularized run steers to the minimal-norm saddle while the plain run does not") {
    const RunResult with = run(preset_example1_tikhonov());
    const RunResult without = run(preset_example1_notikhonov());

    REQUIRE_FALSE(with.samples.empty());
    REQUIRE_FALSE(without.samples.empty());
    CHECK(with.samples.back().t == 20.0);
    CHECK(with.samples.back().norm_xy < without.samples.back().norm_xy);

    // Both trajectories still approach the saddle set itself.
    CHECK(*with.samples.back().gap <= 1e-6);
    CHECK(*without.samples.back().gap <= 1e-6);

    // Energies are reported and nonnegative on the regularized run.
    for (const auto& ts : with.samples) {
        REQUIRE(ts.e_fast.has_value());
        CHECK(*ts.e_fast >= -1e-10);
        CHECK(*ts.e_slow >= -1e-10);
    }

    // The stored condition report matches an offline validation call.
    const auto offline = validate_conditions(effective_schedules(with.config));
    CHECK(with.condition_report.damping.ok == offline.damping.ok);
    CHECK(with.condition_report.damping.worst_margin == offline.damping.worst_margin);
    CHECK(with.condition_report.scaling.worst_margin == offline.scaling.worst_margin);
    CHECK(with.regime.kind == Regime::SlowOnly);
}

TEST_CASE("slower Tikhonov decay lands closer to the minimal-norm point") {
    const auto configs = preset_example1_sweep();
    REQUIRE(configs.size() == 5);
    const auto results = run_batch(configs);
    double previous = -1.0;
    for (const auto& r : results) {
        const double final_dist = *r.samples.back().dist_minnorm;
        CHECK(final_dist > previous);  // r values increase across the sweep
        previous = final_dist;
    }
}

TEST_CASE("scale-weighted gap decreases over the tail") {
    const RunResult r = run(preset_example1_tikhonov());
    const auto series = metric_series(r, "beta_gap");
    CHECK(rate_slope(series, {10.0, 20.0}) < 0.0);
    CHECK(series.back().second < series.front().second);
}

TEST_CASE("gap dominates the squared gradient residuals along the flow") {
    const RunResult r = run(preset_example1_tikhonov());
    // Both objectives are quadratics; 2 max(|K_f|, |K_g|) with the larger
    // curvature 2 (jc^2 + kc^2) = 232 bounds their gradients' Lipschitz
    // constants.
    const double lipschitz = 232.0;
    for (const auto& ts : r.samples) {
        const double rhs = (std::pow(*ts.grad_res_f, 2) + std::pow(*ts.grad_res_g, 2)) /
                           (2.0 * lipschitz);
        CHECK(*ts.gap >= rhs - 1e-9);
    }
}

TEST_CASE("regression runs are deterministic and share data across variants") {
    ExperimentConfig c = small_regression_config();
    const RunResult a = run(c);
    const RunResult b = run(c);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        REQUIRE(a.samples[i].phi.has_value());
        CHECK(*a.samples[i].phi == *b.samples[i].phi);  // bitwise
    }

    ExperimentConfig other = c;
    other.variant = SystemVariant::mpdd();
    const SaddleProblem pa = build_problem(c);
    const SaddleProblem pb = build_problem(other);
    CHECK(std::memcmp(pa.coupling.data(), pb.coupling.data(),
                      pa.coupling.rows() * pa.coupling.cols() * sizeof(double)) == 0);
    const std::vector<double> zeros(pa.m, 0.0);
    CHECK(pa.g_grad_at(zeros) == pb.g_grad_at(zeros));  // b vector
}

TEST_CASE("comparison table") {
    SUBCASE("self-comparison gives identical rows") {
        ExperimentConfig c = preset_example1_tikhonov();
        c.sample_count = 64;
        const std::vector<ExperimentConfig> configs{c, c};
        const auto rows = compare(configs, "gap", {2.0, 20.0});
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].final_value == rows[1].final_value);
        CHECK(rows[0].slope == rows[1].slope);
    }
    SUBCASE("single-config table") {
        ExperimentConfig c = preset_example1_tikhonov();
        c.sample_count = 64;
        const std::vector<ExperimentConfig> configs{c};
        const auto rows = compare(configs, "gap", {2.0, 20.0});
        CHECK(rows.size() == 1);
    }
    SUBCASE("mismatched problems are rejected") {
        std::vector<ExperimentConfig> configs{preset_example1_tikhonov(), preset_example2()};
        CHECK_THROWS_AS(compare(configs, "gap", {2.0, 20.0}), std::invalid_argument);
    }
}

TEST_CASE("final state is stable under sample-grid refinement") {
    ExperimentConfig coarse = preset_example1_notikhonov();
    coarse.sample_count = 200;
    coarse.integrator.rtol = 1e-10;
    coarse.integrator.atol = 1e-12;
    ExperimentConfig fine = coarse;
    fine.sample_count = 400;

    const RunResult a = run(coarse);
    const RunResult b = run(fine);
    const auto& ya = a.samples.back().state.lambda;
    const auto& yb = b.samples.back().state.lambda;
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < ya.size(); ++i) {
        diff += (ya[i] - yb[i]) * (ya[i] - yb[i]);
        ref += yb[i] * yb[i];
    }
    CHECK(std::sqrt(diff) <= 1e-9 * std::max(1.0, std::sqrt(ref)));
}

TEST_CASE("numeric reference approximates a saddle for the regression problem") {
    ExperimentConfig c = small_regression_config();
    const SaddleProblem p = build_problem(c);
    const PrimalDualPoint ref = numeric_reference(c, p);
    const PrimalDualPoint origin{std::vector<double>(p.n, 0.0), std::vector<double>(p.m, 0.0)};
    CHECK(saddle_residual(p, ref) < 1e-2 * saddle_residual(p, origin));

    c.use_numeric_reference = true;
    const RunResult r = run(c);
    REQUIRE(r.samples.back().gap.has_value());
}

TEST_CASE("decay certificates hold along integrated trajectories") {
    ExperimentConfig fast = preset_example1_tikhonov();
    fast.schedules = ScheduleSet::make(fast.schedules.damping, fast.schedules.scaling,
                                       ScheduleFamily::power_tikhonov(7.0, 4.0),
                                       fast.schedules.theta, fast.schedules.t0);
    const RunResult r = run(fast);
    const SaddleProblem p = build_problem(fast);
    const PrimalDualPoint ref{{0.0, 0.0}, {0.0, 0.0}};

    const auto margins = lyapunov_bound_margin(r.samples, p, fast.schedules, ref);
    const auto slow_margins = lyapunov_slow_bound_margin(r.samples, p, fast.schedules, ref);
    const double budget = 1e-6 * *r.samples.front().e_fast;
    for (double m : margins) CHECK(m >= -budget);
    for (double m : slow_margins) CHECK(m >= -budget);
}

TEST_CASE("batch results do not depend on the worker count") {
    ExperimentConfig c = preset_example1_tikhonov();
    c.sample_count = 48;
    c.integrator.rtol = 1e-6;
    c.integrator.atol = 1e-8;
    const std::vector<ExperimentConfig> configs{c, c, c};

    setenv("SADDLEFLOW_THREADS", "1", 1);
    const auto serial = run_batch(configs);
    setenv("SADDLEFLOW_THREADS", "3", 1);
    const auto parallel = run_batch(configs);
    unsetenv("SADDLEFLOW_THREADS");

    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        const auto& a = serial[i].samples.back().state.lambda;
        const auto& b = parallel[i].samples.back().state.lambda;
        CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("regularization trades objective speed for trajectory selection") {
    // On the regression problem the saddle point is unique, so the Tikhonov
    // term cannot choose among minimizers; it only biases the objective.
    // The final objective therefore sits slightly above the eps = 0 run and
    // approaches it as the decay exponent grows.
    ExperimentConfig base = small_regression_config();
    auto with_eps = [&base](ScheduleFamily eps, SystemVariant var) {
        ExperimentConfig c = base;
        c.variant = var;
        c.schedules = ScheduleSet::make(c.schedules.damping, c.schedules.scaling,
                                        std::move(eps), c.schedules.theta, c.schedules.t0);
        return c;
    };
    const double zero = *run(with_eps(ScheduleFamily::zero_tikhonov(),
                                      SystemVariant::han_no_tikhonov()))
                             .samples.back()
                             .phi;
    const double r15 = *run(with_eps(ScheduleFamily::power_tikhonov(1.0, 1.5),
                                     SystemVariant::han()))
                            .samples.back()
                            .phi;
    const double r25 = *run(with_eps(ScheduleFamily::power_tikhonov(1.0, 2.5),
                                     SystemVariant::han()))
                            .samples.back()
                            .phi;
    CHECK(r15 >= zero);
    CHECK(r25 >= zero);
    CHECK(r25 <= r15);                // faster decay means less bias
    CHECK(r15 <= 1.05 * zero);        // and the bias itself stays small
}

TEST_CASE("run_regression accepts only regression configs") {
    CHECK_THROWS_AS(run_regression(preset_example1_tikhonov()), std::invalid_argument);
    ExperimentConfig c = small_regression_config();
    c.sample_count = 8;
    const RunResult r = run_regression(c);
    CHECK(r.samples.back().phi.has_value());
}

TEST_CASE("step budget exhaustion surfaces as an experiment failure") {
    ExperimentConfig c = preset_example1_tikhonov();
    c.integrator.max_steps = 10;
    try {
        run(c);
        FAIL("expected ExperimentFailure");
    } catch (const ExperimentFailure& e) {
        CHECK(e.partial().failed);
        CHECK_FALSE(e.partial().failure_reason.empty());
    }
}
