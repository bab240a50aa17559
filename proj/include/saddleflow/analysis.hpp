#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "saddleflow/dynamics.hpp"
#include "saddleflow/problems.hpp"
#include "saddleflow/schedules.hpp"

namespace saddleflow {

/// Quadratic weights of the two energies. For the fast energy b = 1/theta and
/// m = (t alpha(t) - 1 - 1/theta) / theta; for the slow energy b = 1/(theta t)
/// and m = (theta t alpha(t) - theta - 1) / (theta t)^2. m is nonnegative
/// exactly when the damping condition holds at t.
struct LyapunovWeights {
    double b = 0.0;
    double m = 0.0;

    static LyapunovWeights fast(const ScheduleSet& s, double t);
    static LyapunovWeights slow(const ScheduleSet& s, double t);
};

/// Per-time metrics derived from one integrated state. Fields that need a
/// reference saddle (gap, gradient residuals) or a particular problem shape
/// (phi) are optional.
struct TrajectorySample {
    double t = 0.0;
    FlatState state;
    std::optional<double> gap;
    double speed_x = 0.0;
    double speed_y = 0.0;
    std::optional<double> grad_res_f;
    std::optional<double> grad_res_g;
    double norm_xy = 0.0;
    std::optional<double> dist_minnorm;
    std::optional<double> e_fast;
    std::optional<double> e_slow;
    std::optional<double> phi;
};

/// Fast-regime energy at one state:
///   t^2 beta [ L(x, y*) - L(x*, y) + eps/2 (||x||^2 + ||y||^2) ]
///   + 1/2 ||b (x - x*) + t x'||^2 + m/2 ||x - x*||^2   (same for y).
/// Throws HypothesisViolationError when the damping condition fails at t
/// (negative m).
double lyapunov_fast(const SaddleProblem& p, const ScheduleSet& s, const FlatState& sample,
                     const PrimalDualPoint& ref);

/// Slow-regime energy: leading factor beta instead of t^2 beta, velocity term
/// x' instead of t x', weights from LyapunovWeights::slow.
double lyapunov_slow(const SaddleProblem& p, const ScheduleSet& s, const FlatState& sample,
                     const PrimalDualPoint& ref);

/// Closed-form (power families) or adaptive-Simpson value of
/// integral_{t0}^{t} tau beta(tau) eps(tau) d tau.
double weighted_tikhonov_integral(const ScheduleSet& s, double t);

/// Decay certificate for the fast energy: per sample,
///   E(t0) + (||x*||^2 + ||y*||^2) / (2 theta) * integral - E(t).
/// Nonnegative margins certify the energy bound along the trajectory.
/// Requires the schedule conditions to hold (throws otherwise).
std::vector<double> lyapunov_bound_margin(std::span<const TrajectorySample> trajectory,
                                          const SaddleProblem& p, const ScheduleSet& s,
                                          const PrimalDualPoint& ref);

/// Same certificate for t^2 times the slow energy.
std::vector<double> lyapunov_slow_bound_margin(std::span<const TrajectorySample> trajectory,
                                               const SaddleProblem& p, const ScheduleSet& s,
                                               const PrimalDualPoint& ref);

/// Least-squares slope of log v against log t over samples with t in
/// [window.first, window.second]. Needs at least 5 points, all v > 0.
double rate_slope(std::span<const std::pair<double, double>> samples,
                  std::pair<double, double> window);

struct AnnotateOptions {
    bool energies = false;  // fill e_fast / e_slow when the weights are valid
};

/// Fills the full metric vector for each state. ref may be null; reference
/// dependent fields are then omitted. phi is filled whenever the problem
/// carries an objective.
std::vector<TrajectorySample> annotate(std::span<const FlatState> trajectory,
                                       const SaddleProblem& p, const ScheduleSet& s,
                                       const PrimalDualPoint* ref,
                                       const AnnotateOptions& options);

}  // namespace saddleflow
