#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstring>

#include "saddleflow/dynamics.hpp"
#include "saddleflow/problems.hpp"
#include "saddleflow/rng.hpp"

using namespace saddleflow;

namespace {

SaddleProblem toy() { return quadratic_minmax_problem(1.0, 6.0, 4.0, 10.0); }

ScheduleSet toy_schedules(ScheduleFamily tikhonov = ScheduleFamily::power_tikhonov(7.0, 2.0)) {
    return ScheduleSet::make(ScheduleFamily::power_damping(17.0),
                             ScheduleFamily::power_scaling(1.0), std::move(tikhonov),
                             1.0 / 16.0, 1.0);
}

std::vector<double> random_state(std::size_t len, GaussianSampler& g) {
    std::vector<double> v(len);
    for (double& x : v) x = g.next();
    return v;
}

}  // namespace

TEST_CASE("state packing and splitting") {
    const FlatState s = pack_state(2.0, std::vector<double>{1, 2}, std::vector<double>{3},
                                   std::vector<double>{4, 5}, std::vector<double>{6});
    CHECK(s.lambda == std::vector<double>{1, 2, 3, 4, 5, 6});
    const auto blocks = split_state(s.lambda, 2, 1);
    CHECK(blocks.x[1] == 2.0);
    CHECK(blocks.y[0] == 3.0);
    CHECK(blocks.xdot[0] == 4.0);
    CHECK(blocks.ydot[0] == 6.0);
    CHECK_THROWS_AS(split_state(s.lambda, 2, 2), std::invalid_argument);
}

TEST_CASE("equilibrium state maps to zero") {
    const SaddleProblem p = toy();
    const ScheduleSet s = toy_schedules();
    const std::vector<double> zeros(8, 0.0);
    const auto out = rhs(SystemVariant::han(), p, s, 1.0, zeros);
    for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("right-hand side at the reference start point") {
    const SaddleProblem p = toy();
    const ScheduleSet s = toy_schedules();
    const FlatState state = pack_state(1.0, std::vector<double>{1.0, 1.5},
                                       std::vector<double>{1.0, 1.5},
                                       std::vector<double>{1.0, 1.0},
                                       std::vector<double>{1.0, 1.0});
    const auto out = rhs(SystemVariant::han(), p, s, 1.0, state.lambda);
    // Velocity blocks pass through; acceleration blocks were evaluated by an
    // independent exact-arithmetic computation of the same formula.
    CHECK(out[0] == 1.0);
    CHECK(out[1] == 1.0);
    CHECK(out[2] == 1.0);
    CHECK(out[3] == 1.0);
    CHECK(out[4] == doctest::Approx(-63.875).epsilon(1e-14));
    CHECK(out[5] == doctest::Approx(-266.75).epsilon(1e-14));
    CHECK(out[6] == doctest::Approx(-134.25).epsilon(1e-14));
    CHECK(out[7] == doctest::Approx(-303.125).epsilon(1e-14));
}

TEST_CASE("zero-Tikhonov variants coincide bit for bit") {
    const SaddleProblem p = toy();
    const ScheduleSet zero_set = toy_schedules(ScheduleFamily::zero_tikhonov());
    const ScheduleSet full_set = toy_schedules();
    GaussianSampler g(RngSeed{5});
    for (int trial = 0; trial < 1000; ++trial) {
        const auto state = random_state(8, g);
        const double t = 1.0 + std::abs(g.next()) * 10.0;
        const auto han_zero = rhs(SystemVariant::han(), p, zero_set, t, state);
        const auto han_no = rhs(SystemVariant::han_no_tikhonov(), p, full_set, t, state);
        const auto mpdd = rhs(SystemVariant::mpdd(), p, full_set, t, state);
        CHECK(std::memcmp(han_zero.data(), han_no.data(), 8 * sizeof(double)) == 0);
        CHECK(std::memcmp(han_zero.data(), mpdd.data(), 8 * sizeof(double)) == 0);
    }
}

TEST_CASE("baseline variant pins its own parameters") {
    CHECK(SystemVariant::apdd(2.0).apdd_theta() == 0.75);
    CHECK(SystemVariant::apdd(5.0).apdd_theta() == 0.5);
    CHECK_THROWS_AS(SystemVariant::apdd(0.0), std::invalid_argument);

    // For alpha = 2 at t = 1 the baseline flow must match a hand expansion:
    // xddot = -2 xdot - (grad f(x) + K^T (y + 0.75 ydot)).
    const SaddleProblem p = toy();
    const ScheduleSet s = toy_schedules();
    const std::vector<double> state{1, 0, 0, 1, 0, 0, 0, 0};  // x=(1,0), y=(0,1)
    const auto out = rhs(SystemVariant::apdd(2.0), p, s, 1.0, state);
    // grad f((1,0)) = (2,12); K^T (0,1) = (10,60)
    CHECK(out[4] == doctest::Approx(-(2.0 + 10.0)).epsilon(1e-14));
    CHECK(out[5] == doctest::Approx(-(12.0 + 60.0)).epsilon(1e-14));
    // ydot block: -grad g((0,1)) + K (1,0) with grad g((0,1)) = (80,200)
    CHECK(out[6] == doctest::Approx(-80.0 + 4.0).epsilon(1e-14));
    CHECK(out[7] == doctest::Approx(-200.0 + 10.0).epsilon(1e-14));
}

TEST_CASE("adjoint consistency inside the right-hand side") {
    const SaddleProblem p = toy();
    const ScheduleSet s = toy_schedules();
    const Matrix kt = p.coupling.transposed();
    GaussianSampler g(RngSeed{19});
    for (int trial = 0; trial < 50; ++trial) {
        const auto state = random_state(8, g);
        const double t = 1.0 + std::abs(g.next()) * 5.0;
        const auto base = rhs(SystemVariant::han(), p, s, t, state);

        // Rebuild the acceleration blocks with an independent transpose-multiply
        // (a materialized K^T applied forward instead of apply_transpose).
        const auto blocks = split_state(state, 2, 2);
        const double alpha = s.damping.value(t);
        const double beta = s.scaling.value(t);
        const double eps = s.tikhonov.value(t);
        std::vector<double> yext(2), xext(2);
        for (int i = 0; i < 2; ++i) {
            yext[i] = blocks.y[i] + s.theta * t * blocks.ydot[i];
            xext[i] = blocks.x[i] + s.theta * t * blocks.xdot[i];
        }
        const auto kty = kt.apply(yext);
        const auto kx = kt.apply_transpose(xext);
        const auto gf = p.f_grad_at(blocks.x);
        const auto gg = p.g_grad_at(blocks.y);
        for (int i = 0; i < 2; ++i) {
            const double want_x =
                -alpha * blocks.xdot[i] - beta * (gf[i] + eps * blocks.x[i] + kty[i]);
            const double want_y =
                -alpha * blocks.ydot[i] + beta * (-gg[i] - eps * blocks.y[i] + kx[i]);
            CHECK(std::abs(base[4 + i] - want_x) <= 1e-14 * std::max(1.0, std::abs(want_x)));
            CHECK(std::abs(base[6 + i] - want_y) <= 1e-14 * std::max(1.0, std::abs(want_y)));
        }
    }
}

TEST_CASE("right-hand side is affine in the velocity blocks") {
    const SaddleProblem p = toy();
    const ScheduleSet s = toy_schedules();
    GaussianSampler g(RngSeed{23});
    for (int trial = 0; trial < 50; ++trial) {
        auto state = random_state(8, g);
        auto dir = std::vector<double>(8, 0.0);
        for (int i = 4; i < 8; ++i) dir[i] = g.next();  // perturb velocities only
        const double t = 1.0 + std::abs(g.next()) * 5.0;

        auto plus = state, plus2 = state;
        for (int i = 0; i < 8; ++i) {
            plus[i] += dir[i];
            plus2[i] += 2.0 * dir[i];
        }
        const auto f0 = rhs(SystemVariant::han(), p, s, t, state);
        const auto f1 = rhs(SystemVariant::han(), p, s, t, plus);
        const auto f2 = rhs(SystemVariant::han(), p, s, t, plus2);
        for (int i = 0; i < 8; ++i) {
            const double second_diff = f2[i] - 2.0 * f1[i] + f0[i];
            CHECK(std::abs(second_diff) <= 1e-10 * std::max(1.0, std::abs(f0[i])));
        }
    }
}

TEST_CASE("nonzero saddles are equilibria of the unregularized flow") {
    const SaddleProblem p = toy();
    const ScheduleSet s = toy_schedules();
    // (6,-1) kills mc x1 + nc x2; (10,-4) kills jc y1 + kc y2.
    const std::vector<double> state{6.0, -1.0, 10.0, -4.0, 0.0, 0.0, 0.0, 0.0};
    const auto out = rhs(SystemVariant::mpdd(), p, s, 3.0, state);
    for (double v : out) CHECK(std::abs(v) <= 1e-10);
}

TEST_CASE("dimension and domain errors") {
    const SaddleProblem p = toy();
    const ScheduleSet s = toy_schedules();
    CHECK_THROWS_AS(rhs(SystemVariant::han(), p, s, 1.0, std::vector<double>(7, 0.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(rhs(SystemVariant::han(), p, s, 0.5, std::vector<double>(8, 0.0)),
                    std::domain_error);
}
