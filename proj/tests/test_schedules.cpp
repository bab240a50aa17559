#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "saddleflow/schedules.hpp"

using namespace saddleflow;

namespace {

ScheduleSet reference_power_set(double theta = 1.0 / 16.0, double r = 2.0) {
    return ScheduleSet::make(ScheduleFamily::power_damping(17.0),
                             ScheduleFamily::power_scaling(1.0),
                             ScheduleFamily::power_tikhonov(7.0, r), theta, 1.0);
}

}  // namespace

TEST_CASE("family evaluation closed forms") {
    const auto pd = ScheduleFamily::power_damping(17.0).eval(2.0);
    CHECK(pd.value == 8.5);
    CHECK(pd.derivative == -4.25);

    const auto ps = ScheduleFamily::power_scaling(0.0).eval(3.7);
    CHECK(ps.value == 1.0);
    CHECK(ps.derivative == 0.0);

    // alpha + t alpha' collapses to 2/t^2 for the case2 damping family.
    const auto c2 = ScheduleFamily::case2_damping(7.0);
    for (double t : {1.0, 2.0, 5.0}) {
        const auto e = c2.eval(t);
        CHECK(e.value + t * e.derivative ==
              doctest::Approx(2.0 / (t * t)).epsilon(1e-13));
    }

    CHECK_THROWS_AS(ScheduleFamily::power_damping(17.0).eval(0.0), std::domain_error);
    CHECK_THROWS_AS(ScheduleFamily::power_damping(17.0).eval(-1.0), std::domain_error);
}

TEST_CASE("schedule set domain checks") {
    const ScheduleSet s = reference_power_set();
    CHECK_THROWS_AS(s.damping_at(0.5), std::domain_error);
    CHECK(s.damping_at(1.0).value == 17.0);
    CHECK_THROWS_AS(
        ScheduleSet::make(ScheduleFamily::power_damping(1.0), ScheduleFamily::power_scaling(1.0),
                          ScheduleFamily::power_tikhonov(1.0, 1.0), 0.0, 1.0),
        std::invalid_argument);
    // An increasing family cannot be used as the Tikhonov coefficient.
    CHECK_THROWS_AS(
        ScheduleSet::make(ScheduleFamily::power_damping(1.0), ScheduleFamily::power_scaling(1.0),
                          ScheduleFamily::power_scaling(2.0), 0.1, 1.0),
        std::invalid_argument);
}

TEST_CASE("derivatives match central finite differences") {
    const std::vector<ScheduleFamily> families = {
        ScheduleFamily::power_damping(17.0),   ScheduleFamily::case2_damping(3.0),
        ScheduleFamily::power_scaling(1.0),    ScheduleFamily::power_scaling(0.0),
        ScheduleFamily::constant_scaling(2.5), ScheduleFamily::power_tikhonov(7.0, 2.0),
        ScheduleFamily::case2_tikhonov(1.0),   ScheduleFamily::zero_tikhonov()};
    for (const auto& fam : families) {
        for (double t : {1.0, 2.0, 7.3, 55.0}) {
            const double h = 1e-6 * t;
            const double fd = (fam.value(t + h) - fam.value(t - h)) / (2.0 * h);
            const double an = fam.derivative(t);
            CHECK(std::abs(fd - an) <= 1e-8 * std::max(1.0, std::abs(an)));
        }
    }
}

TEST_CASE("tabulated family interpolates") {
    const auto fam = ScheduleFamily::tabulated(
        {{1.0, 10.0, -1.0}, {2.0, 8.0, -1.0}, {4.0, 4.0, -1.0}});
    CHECK(fam.value(1.0) == 10.0);
    CHECK(fam.value(3.0) == doctest::Approx(6.0));
    CHECK(fam.derivative(2.5) == -1.0);
    CHECK_THROWS_AS(ScheduleFamily::tabulated({{1.0, 1.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("condition validation on the reference parameter sets") {
    SUBCASE("alpha=17, beta=1, theta=1/16, eps=7/t^2 passes everything") {
        const auto report = validate_conditions(reference_power_set());
        CHECK(report.damping.ok);
        CHECK(report.scaling.ok);
        CHECK(report.tikhonov_growth.ok);
        CHECK(report.eps_monotone.ok);
        // t alpha(t) equals 1 + 1/theta exactly, so the slack is exactly zero.
        CHECK(report.damping.worst_margin == 0.0);
        for (double m : report.damping.margins) CHECK(m == 0.0);
    }

    SUBCASE("theta = 1 breaks the scaling condition") {
        const auto report = validate_conditions(reference_power_set(1.0));
        CHECK_FALSE(report.scaling.ok);
        CHECK(report.damping.ok);  // 17/t >= 2/t still holds
    }

    SUBCASE("case2 family at the upper extrapolation endpoint passes") {
        const ScheduleSet s = ScheduleSet::make(
            ScheduleFamily::case2_damping(3.0), ScheduleFamily::power_scaling(1.0),
            ScheduleFamily::case2_tikhonov(1.0), 1.0 / 3.0, 1.0);
        const auto report = validate_conditions(s);
        CHECK(report.damping.ok);
        CHECK(report.scaling.ok);
        CHECK(report.tikhonov_growth.ok);
        CHECK(report.eps_monotone.ok);
        // growth slack is t beta eps - (alpha + t alpha') = 3/t^2 - 2/t^2.
        for (std::size_t i = 0; i < report.grid.size(); ++i) {
            const double t = report.grid[i];
            CHECK(report.tikhonov_growth.margins[i] ==
                  doctest::Approx(1.0 / (t * t)).epsilon(1e-12));
        }
    }

    SUBCASE("case2 with small theta violates the damping lower bound") {
        // alpha(t) = (6t-2)/t^2 stays strictly below 6/t = (1+theta)/(theta t)
        // for theta = 1/5: the deficit is 2/t^2 at every t.
        const ScheduleSet s = ScheduleSet::make(
            ScheduleFamily::case2_damping(3.0), ScheduleFamily::power_scaling(1.0),
            ScheduleFamily::case2_tikhonov(1.0), 0.2, 1.0);
        const auto report = validate_conditions(s);
        CHECK_FALSE(report.damping.ok);
        CHECK(report.damping.worst_margin == doctest::Approx(-2.0).epsilon(1e-12));
        CHECK(report.scaling.ok);
        CHECK(report.tikhonov_growth.ok);
    }

    SUBCASE("wider case2 damping admits the interior theta range") {
        const ScheduleSet s = ScheduleSet::make(
            ScheduleFamily::case2_damping(5.0), ScheduleFamily::power_scaling(1.0),
            ScheduleFamily::case2_tikhonov(1.0), 0.2, 1.0);
        CHECK(validate_conditions(s).all_ok());
    }

    SUBCASE("empty grid rejected") {
        CHECK_THROWS_AS(validate_conditions(reference_power_set(), std::span<const double>{}),
                        std::invalid_argument);
    }
}

TEST_CASE("scaling condition is monotone in theta") {
    const std::vector<double> thetas = {0.05, 0.1, 0.2, 1.0 / 3.0, 0.45};
    for (double beta : {0.0, 0.5, 1.0, 2.0}) {
        for (std::size_t i = 0; i + 1 < thetas.size(); ++i) {
            const auto lo = validate_conditions(
                ScheduleSet::make(ScheduleFamily::power_damping(40.0),
                                  ScheduleFamily::power_scaling(beta),
                                  ScheduleFamily::power_tikhonov(1.0, 2.0), thetas[i], 1.0));
            const auto hi = validate_conditions(
                ScheduleSet::make(ScheduleFamily::power_damping(40.0),
                                  ScheduleFamily::power_scaling(beta),
                                  ScheduleFamily::power_tikhonov(1.0, 2.0), thetas[i + 1], 1.0));
            if (hi.scaling.ok) CHECK(lo.scaling.ok);
        }
    }
}

TEST_CASE("regime classification analytic rules") {
    SUBCASE("slow decay keeps the strong-convergence flag") {
        const auto rc = classify_regime(reference_power_set());
        CHECK(rc.kind == Regime::SlowOnly);
        CHECK(rc.strong_convergence_flag);
        CHECK(rc.method == ClassifyMethod::Analytic);
    }
    SUBCASE("fast decay") {
        const auto rc = classify_regime(reference_power_set(1.0 / 16.0, 4.0));
        CHECK(rc.kind == Regime::Fast);
        CHECK_FALSE(rc.strong_convergence_flag);
    }
    SUBCASE("too-slow decay") {
        const auto rc = classify_regime(reference_power_set(1.0 / 16.0, 0.5));
        CHECK(rc.kind == Regime::Neither);
        CHECK_FALSE(rc.strong_convergence_flag);
    }
    SUBCASE("boundary r = beta + 2 stays slow without the flag") {
        const auto rc = classify_regime(reference_power_set(1.0 / 16.0, 3.0));
        CHECK(rc.kind == Regime::SlowOnly);
        CHECK_FALSE(rc.strong_convergence_flag);
    }
    SUBCASE("zero Tikhonov counts as fast") {
        const ScheduleSet s = ScheduleSet::make(
            ScheduleFamily::power_damping(17.0), ScheduleFamily::power_scaling(1.0),
            ScheduleFamily::zero_tikhonov(), 1.0 / 16.0, 1.0);
        const auto rc = classify_regime(s);
        CHECK(rc.kind == Regime::Fast);
        CHECK_FALSE(rc.strong_convergence_flag);
    }
}

TEST_CASE("quadrature classification agrees with the analytic rules") {
    for (double r : {0.5, 1.5, 2.0, 2.5, 3.5, 4.0}) {
        const ScheduleSet s = reference_power_set(1.0 / 16.0, r);
        const auto analytic = classify_regime(s, false);
        const auto quad = classify_regime(s, true);
        CAPTURE(r);
        CHECK(analytic.kind == quad.kind);
        CHECK(analytic.strong_convergence_flag == quad.strong_convergence_flag);
        CHECK(quad.method == ClassifyMethod::Quadrature);
    }
    // Fast always implies the slow integral converges.
    for (double r : {0.5, 2.0, 4.0}) {
        const auto rc = classify_regime(reference_power_set(1.0 / 16.0, r));
        if (rc.kind == Regime::Fast) {
            CHECK(r > 1.0);  // slow integral of t^(1 - r - 1) needs r > beta
        }
    }
}

TEST_CASE("non-power families use the sampled paths") {
    std::vector<ScheduleFamily::TabulatedPoint> pts;
    for (int i = 0; i <= 400; ++i) {
        const double t = 1.0 + 99.0 * i / 400.0;
        pts.push_back({t, 7.0 / (t * t), -14.0 / (t * t * t)});  // mirrors 7/t^2
    }
    const ScheduleSet s = ScheduleSet::make(ScheduleFamily::power_damping(17.0),
                                            ScheduleFamily::power_scaling(1.0),
                                            ScheduleFamily::tabulated(pts), 1.0 / 16.0, 1.0);
    const auto report = validate_conditions(s);
    CHECK(report.damping.ok);
    CHECK(report.scaling.ok);
    CHECK(report.tikhonov_growth.ok);
    CHECK(report.eps_monotone.ok);

    const auto rc = classify_regime(s);
    CHECK(rc.method == ClassifyMethod::Quadrature);
    // Constant extrapolation past the last table point makes both tail
    // integrals diverge.
    CHECK(rc.kind == Regime::Neither);
}

TEST_CASE("default validation grid spans two decades") {
    const auto grid = default_validation_grid(reference_power_set());
    CHECK(grid.size() == 200);
    CHECK(grid.front() == 1.0);
    CHECK(grid.back() == doctest::Approx(100.0).epsilon(1e-12));
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}
