#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "saddleflow/dynamics.hpp"

namespace saddleflow {

/// Tolerances and step bounds for the adaptive Dormand-Prince 5(4) solver.
/// The error norm is the componentwise weighted RMS with weights
/// atol + rtol * max(|old|, |new|); a step is accepted when it is <= 1.
struct IntegratorConfig {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_init = 1e-3;
    double h_min = 1e-12;
    double h_max = 1.0;
    double safety = 0.9;
    std::size_t max_steps = 1000000;

    void validate() const {
        if (!(rtol > 0.0) || !(atol > 0.0))
            throw std::invalid_argument("IntegratorConfig: tolerances must be positive");
        if (!(h_min <= h_init && h_init <= h_max))
            throw std::invalid_argument("IntegratorConfig: need h_min <= h_init <= h_max");
        if (!(safety > 0.0 && safety < 1.0))
            throw std::invalid_argument("IntegratorConfig: safety must lie in (0, 1)");
        if (max_steps < 1) throw std::invalid_argument("IntegratorConfig: max_steps must be >= 1");
    }
};

struct StepResult {
    bool accepted = false;
    FlatState new_state;
    double error_estimate = 0.0;  // weighted RMS, acceptance threshold is 1
    double suggested_h = 0.0;
};

using RhsFunction = std::function<void(double, std::span<const double>, std::span<double>)>;

/// One attempted Dormand-Prince step of size h from state. Always returns the
/// 5th-order candidate together with the embedded error estimate; accepted is
/// set iff the weighted error is <= 1. Throws NumericalBlowupError when a
/// stage value is non-finite.
StepResult rk_step(const RhsFunction& f, const FlatState& state, double h,
                   const IntegratorConfig& config);

/// The step budget was exhausted; carries the samples collected so far.
class BudgetExceededError : public std::runtime_error {
public:
    BudgetExceededError(const std::string& what, std::vector<FlatState> partial)
        : std::runtime_error(what), partial_(std::move(partial)) {}

    const std::vector<FlatState>& partial() const { return partial_; }

private:
    std::vector<FlatState> partial_;
};

struct IntegrationResult {
    std::vector<FlatState> states;  // one per requested sample time, exact times
    FlatState final_state;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
};

/// Integrates from state0 to t_end, forcing step endpoints onto each sample
/// time (no interpolation). samples must be strictly increasing and contained
/// in [state0.t, t_end]. Deterministic for fixed inputs.
IntegrationResult integrate(const RhsFunction& f, const FlatState& state0, double t_end,
                            std::span<const double> samples, const IntegratorConfig& config);

}  // namespace saddleflow
