#include "saddleflow/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "saddleflow/errors.hpp"

namespace saddleflow {

namespace {

// Dormand-Prince 5(4) tableau. b5 is the advancing (5th order) weight row,
// b4 the embedded 4th order row; the last stage is evaluated at the candidate
// point, so k7 seeds the next step (FSAL).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4w = 125.0 / 192,
                 b5w = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

constexpr double min_shrink = 0.2;
constexpr double max_growth = 5.0;
constexpr int max_rejections_at_hmin = 20;

void ensure_finite(std::span<const double> v, double t) {
    for (double x : v)
        if (!std::isfinite(x))
            throw NumericalBlowupError("non-finite stage value at t = " + std::to_string(t), t);
}

class Dopri5Stepper {
public:
    Dopri5Stepper(const RhsFunction& f, std::size_t dim, const IntegratorConfig& cfg)
        : f_(f), cfg_(cfg), k1_(dim), k2_(dim), k3_(dim), k4_(dim), k5_(dim), k6_(dim),
          k7_(dim), work_(dim), y5_(dim) {}

    /// Evaluates k1 at (t, y) for the first step (later steps reuse k7).
    void prime(double t, std::span<const double> y) {
        f_(t, y, k1_);
        ensure_finite(k1_, t);
        primed_ = true;
    }

    bool primed() const { return primed_; }

    /// One attempted step; fills y5_ and returns the weighted error.
    double attempt(double t, std::span<const double> y, double h) {
        const std::size_t dim = y.size();
        auto stage = [&](std::span<double> k, double c, auto&& combine) {
            for (std::size_t i = 0; i < dim; ++i) work_[i] = y[i] + h * combine(i);
            f_(t + c * h, work_, k);
            ensure_finite(k, t + c * h);
        };

        stage(k2_, c2, [&](std::size_t i) { return a21 * k1_[i]; });
        stage(k3_, c3, [&](std::size_t i) { return a31 * k1_[i] + a32 * k2_[i]; });
        stage(k4_, c4,
              [&](std::size_t i) { return a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]; });
        stage(k5_, c5, [&](std::size_t i) {
            return a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i];
        });
        stage(k6_, 1.0, [&](std::size_t i) {
            return a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i];
        });

        for (std::size_t i = 0; i < dim; ++i)
            y5_[i] = y[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4w * k4_[i] + b5w * k5_[i] +
                                 b6 * k6_[i]);
        f_(t + h, y5_, k7_);
        ensure_finite(k7_, t + h);

        double sum_sq = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double err_i = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                                      e6 * k6_[i] + e7 * k7_[i]);
            const double w = cfg_.atol + cfg_.rtol * std::max(std::abs(y[i]), std::abs(y5_[i]));
            const double r = err_i / w;
            sum_sq += r * r;
        }
        return std::sqrt(sum_sq / static_cast<double>(dim));
    }

    std::span<const double> candidate() const { return y5_; }

    /// Commits the candidate: the final stage derivative becomes k1 (FSAL).
    void advance() { std::swap(k1_, k7_); }

    double grow_factor(double err) const {
        if (err == 0.0) return max_growth;
        return std::clamp(cfg_.safety * std::pow(err, -0.2), min_shrink, max_growth);
    }

private:
    const RhsFunction& f_;
    const IntegratorConfig& cfg_;
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, work_, y5_;
    bool primed_ = false;
};

}  // namespace

StepResult rk_step(const RhsFunction& f, const FlatState& state, double h,
                   const IntegratorConfig& config) {
    config.validate();
    if (!(h >= config.h_min && h <= config.h_max))
        throw std::invalid_argument("rk_step: h outside [h_min, h_max]");

    Dopri5Stepper stepper(f, state.lambda.size(), config);
    stepper.prime(state.t, state.lambda);
    const double err = stepper.attempt(state.t, state.lambda, h);

    StepResult result;
    result.accepted = err <= 1.0;
    result.error_estimate = err;
    result.new_state.t = state.t + h;
    result.new_state.lambda.assign(stepper.candidate().begin(), stepper.candidate().end());
    result.suggested_h =
        std::clamp(h * stepper.grow_factor(err), config.h_min, config.h_max);
    return result;
}

IntegrationResult integrate(const RhsFunction& f, const FlatState& state0, double t_end,
                            std::span<const double> samples, const IntegratorConfig& config) {
    config.validate();
    if (!(t_end >= state0.t))
        throw std::invalid_argument("integrate: t_end must be >= start time");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i] < state0.t || samples[i] > t_end)
            throw std::invalid_argument("integrate: sample outside [t0, t_end]");
        if (i > 0 && !(samples[i] > samples[i - 1]))
            throw std::invalid_argument("integrate: samples must be strictly increasing");
    }

    IntegrationResult result;
    result.final_state = state0;
    if (samples.empty()) return result;

    double t = state0.t;
    std::vector<double> y = state0.lambda;
    std::size_t next_sample = 0;

    // Samples at the start time are recorded without stepping.
    while (next_sample < samples.size() && samples[next_sample] == t) {
        result.states.push_back(FlatState{t, y});
        ++next_sample;
    }

    Dopri5Stepper stepper(f, y.size(), config);
    stepper.prime(t, y);

    double h = config.h_init;
    int rejections_at_hmin = 0;

    while (next_sample < samples.size() || t < t_end) {
        const double target = next_sample < samples.size() ? samples[next_sample] : t_end;
        bool clipped = false;
        double h_try = h;
        if (t + h_try >= target) {
            h_try = target - t;
            clipped = true;
        }

        const double err = stepper.attempt(t, y, h_try);
        if (err <= 1.0) {
            t = clipped ? target : t + h_try;
            y.assign(stepper.candidate().begin(), stepper.candidate().end());
            stepper.advance();
            ++result.steps_accepted;
            rejections_at_hmin = 0;
            if (!clipped || stepper.grow_factor(err) < 1.0)
                h = std::clamp(h_try * stepper.grow_factor(err), config.h_min, config.h_max);
            while (next_sample < samples.size() && samples[next_sample] == t) {
                result.states.push_back(FlatState{t, y});
                ++next_sample;
            }
            if (result.steps_accepted > config.max_steps)
                throw BudgetExceededError("integrate: max_steps exceeded at t = " +
                                              std::to_string(t),
                                          std::move(result.states));
        } else {
            ++result.steps_rejected;
            const double shrink = std::max(min_shrink, config.safety * std::pow(err, -0.2));
            const double h_next = std::max(h_try * shrink, config.h_min);
            if (h_try <= config.h_min * (1.0 + 1e-12)) {
                if (++rejections_at_hmin >= max_rejections_at_hmin)
                    throw NumericalBlowupError(
                        "integrate: repeated rejections at the minimum step size near t = " +
                            std::to_string(t),
                        t);
            }
            h = h_next;
        }
    }

    result.final_state = FlatState{t, std::move(y)};
    return result;
}

}  // namespace saddleflow
