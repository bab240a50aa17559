#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace saddleflow {

/// One time-dependent coefficient with its exact closed-form derivative.
/// Supported families:
///   power_damping(a)      alpha(t) = a / t
///   case2_damping(a)      alpha(t) = (2 a t - 2) / t^2
///   power_scaling(b)      beta(t)  = t^b
///   constant_scaling(v)   beta(t)  = v
///   power_tikhonov(c, r)  eps(t)   = c / t^r
///   case2_tikhonov(b)     eps(t)   = 3 / t^(b+3)
///   zero_tikhonov()       eps(t)   = 0
///   tabulated(triples)    test-only escape hatch, linear interpolation
class ScheduleFamily {
public:
    enum class Kind {
        PowerDamping,
        Case2Damping,
        PowerScaling,
        ConstantScaling,
        PowerTikhonov,
        Case2Tikhonov,
        ZeroTikhonov,
        Tabulated,
    };

    struct Eval {
        double value;
        double derivative;
    };

    /// Pure power representation value(t) = coef * t^exponent, when one exists.
    struct PowerForm {
        double coef;
        double exponent;
    };

    struct TabulatedPoint {
        double t;
        double value;
        double derivative;
    };

    static ScheduleFamily power_damping(double alpha);
    static ScheduleFamily case2_damping(double alpha);
    static ScheduleFamily power_scaling(double beta);
    static ScheduleFamily constant_scaling(double value);
    static ScheduleFamily power_tikhonov(double c, double r);
    static ScheduleFamily case2_tikhonov(double beta);
    static ScheduleFamily zero_tikhonov();
    static ScheduleFamily tabulated(std::vector<TabulatedPoint> points);

    Kind kind() const { return kind_; }
    double param1() const { return p1_; }
    double param2() const { return p2_; }

    /// Closed-form value and derivative at t > 0; throws std::domain_error
    /// for nonpositive t.
    Eval eval(double t) const;
    double value(double t) const { return eval(t).value; }
    double derivative(double t) const { return eval(t).derivative; }

    std::optional<PowerForm> power_form() const;

    std::string describe() const;

private:
    ScheduleFamily(Kind kind, double p1, double p2) : kind_(kind), p1_(p1), p2_(p2) {}

    Kind kind_;
    double p1_ = 0.0;
    double p2_ = 0.0;
    std::vector<TabulatedPoint> table_;
};

/// Damping, scaling and Tikhonov coefficients together with the extrapolation
/// constant theta and the initial time t0. The Tikhonov family must be
/// nonincreasing on [t0, infinity); this is checked on a sample grid at
/// construction.
struct ScheduleSet {
    ScheduleFamily damping;
    ScheduleFamily scaling;
    ScheduleFamily tikhonov;
    double theta = 0.0;
    double t0 = 0.0;

    static ScheduleSet make(ScheduleFamily damping, ScheduleFamily scaling,
                            ScheduleFamily tikhonov, double theta, double t0);

    /// Evaluations with the t >= t0 domain check.
    ScheduleFamily::Eval damping_at(double t) const;
    ScheduleFamily::Eval scaling_at(double t) const;
    ScheduleFamily::Eval tikhonov_at(double t) const;
};

/// Per-hypothesis verdict. The margin at a grid point is the slack of the
/// inequality written as (satisfied side) - (binding side) >= 0.
struct ConditionCheck {
    bool ok = false;
    double worst_margin = 0.0;        // most negative slack seen (or -inf, see below)
    std::vector<double> margins;      // pointwise slack on the grid
};

/// Verdicts for the four hypotheses on a schedule set:
///   damping:          alpha(t) >= (1 + theta) / (theta t)
///   scaling:          beta'(t)/beta(t) <= (1 - 2 theta) / (theta t)
///   tikhonov_growth:  alpha(t) + t alpha'(t) <= t beta(t) eps(t)
///   eps_monotone:     eps'(t) <= 0
/// Booleans hold iff worst_margin >= -1e-12. When an analytic test proves a
/// failure beyond the sampled grid, worst_margin is -infinity.
struct ConditionReport {
    ConditionCheck damping;
    ConditionCheck scaling;
    ConditionCheck tikhonov_growth;
    ConditionCheck eps_monotone;
    std::vector<double> grid;

    bool all_ok() const {
        return damping.ok && scaling.ok && tikhonov_growth.ok && eps_monotone.ok;
    }
};

inline constexpr double condition_margin_tolerance = -1e-12;

enum class Regime { Fast, SlowOnly, Neither };
enum class ClassifyMethod { Analytic, Quadrature };

/// Fast:     integral of t beta(t) eps(t) converges,
/// SlowOnly: only the integral of beta(t) eps(t) / t converges,
/// Neither:  both diverge.
/// strong_convergence_flag is set when the slow integral converges and
/// t^2 beta(t) eps(t) grows without bound, the combination that steers the
/// trajectory to the minimal-norm saddle point.
struct RegimeClass {
    Regime kind = Regime::Neither;
    bool strong_convergence_flag = false;
    ClassifyMethod method = ClassifyMethod::Analytic;
};

/// 200 log-spaced points on [t0, 100 t0].
std::vector<double> default_validation_grid(const ScheduleSet& s);

ConditionReport validate_conditions(const ScheduleSet& s, std::span<const double> grid);
ConditionReport validate_conditions(const ScheduleSet& s);

/// force_quadrature skips the analytic rules (used to cross-check the two
/// classification routes against each other).
RegimeClass classify_regime(const ScheduleSet& s, bool force_quadrature = false);

const char* to_string(Regime r);

}  // namespace saddleflow
