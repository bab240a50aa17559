#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "saddleflow/problems.hpp"
#include "saddleflow/schedules.hpp"

namespace saddleflow {

/// Which second-order flow to evaluate.
///   Han:           the regularized flow, damping/scaling/Tikhonov from the
///                  schedule set, gradients extrapolated at y + theta t y'.
///   HanNoTikhonov: the same flow with eps forced to zero.
///   Apdd:          damping alpha/t, unit scaling, no Tikhonov term, and the
///                  fixed extrapolation constant max(1/2, 3/(2 alpha)).
///   Mpdd:          schedule damping and scaling, extrapolation theta t,
///                  no Tikhonov term.
struct SystemVariant {
    enum class Tag { Han, HanNoTikhonov, Apdd, Mpdd };

    Tag tag = Tag::Han;
    double apdd_alpha = 0.0;

    static SystemVariant han() { return {Tag::Han, 0.0}; }
    static SystemVariant han_no_tikhonov() { return {Tag::HanNoTikhonov, 0.0}; }
    static SystemVariant apdd(double alpha);
    static SystemVariant mpdd() { return {Tag::Mpdd, 0.0}; }

    double apdd_theta() const { return std::max(0.5, 1.5 / apdd_alpha); }

    std::string describe() const;
};

/// Flattened first-order state (t, x, y, x', y') packed as one vector of
/// length 2n + 2m in that block order.
struct FlatState {
    double t = 0.0;
    std::vector<double> lambda;
};

FlatState pack_state(double t, std::span<const double> x, std::span<const double> y,
                     std::span<const double> xdot, std::span<const double> ydot);

/// Read-only views into the four blocks of a packed state vector.
struct StateBlocks {
    std::span<const double> x;
    std::span<const double> y;
    std::span<const double> xdot;
    std::span<const double> ydot;
};

StateBlocks split_state(std::span<const double> lambda, std::size_t n, std::size_t m);

/// Right-hand side of the first-order reformulation:
///   d/dt (x, y, x', y') = (x', y',
///     -alpha x' - beta [grad f(x) + eps x + K^T (y + theta t y')],
///     -alpha y' + beta [-grad g(y) - eps y + K (x + theta t x')]).
/// Reusable evaluator holding the scratch buffers.
class RhsEvaluator {
public:
    RhsEvaluator(SystemVariant variant, const SaddleProblem& problem,
                 const ScheduleSet& schedules);

    void operator()(double t, std::span<const double> lambda, std::span<double> out) const;

    std::size_t state_size() const { return 2 * (n_ + m_); }

private:
    SystemVariant variant_;
    const SaddleProblem& problem_;
    const ScheduleSet& schedules_;
    std::size_t n_;
    std::size_t m_;
    mutable std::vector<double> ext_x_, ext_y_, grad_f_, grad_g_, kt_buf_, k_buf_;
};

/// One-shot evaluation (constructs scratch space per call).
std::vector<double> rhs(const SystemVariant& variant, const SaddleProblem& problem,
                        const ScheduleSet& schedules, double t,
                        std::span<const double> lambda);

}  // namespace saddleflow
