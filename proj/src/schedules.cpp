#include "saddleflow/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "saddleflow/errors.hpp"

namespace saddleflow {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ScheduleFamily ScheduleFamily::power_damping(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("power_damping: alpha must be positive");
    return ScheduleFamily(Kind::PowerDamping, alpha, 0.0);
}

ScheduleFamily ScheduleFamily::case2_damping(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("case2_damping: alpha must be positive");
    return ScheduleFamily(Kind::Case2Damping, alpha, 0.0);
}

ScheduleFamily ScheduleFamily::power_scaling(double beta) {
    if (!(beta >= 0.0)) throw std::invalid_argument("power_scaling: beta must be nonnegative");
    return ScheduleFamily(Kind::PowerScaling, beta, 0.0);
}

ScheduleFamily ScheduleFamily::constant_scaling(double value) {
    if (!(value > 0.0)) throw std::invalid_argument("constant_scaling: value must be positive");
    return ScheduleFamily(Kind::ConstantScaling, value, 0.0);
}

ScheduleFamily ScheduleFamily::power_tikhonov(double c, double r) {
    if (!(c > 0.0)) throw std::invalid_argument("power_tikhonov: c must be positive");
    if (!(r > 0.0)) throw std::invalid_argument("power_tikhonov: r must be positive");
    return ScheduleFamily(Kind::PowerTikhonov, c, r);
}

ScheduleFamily ScheduleFamily::case2_tikhonov(double beta) {
    if (!(beta >= 0.0)) throw std::invalid_argument("case2_tikhonov: beta must be nonnegative");
    return ScheduleFamily(Kind::Case2Tikhonov, beta, 0.0);
}

ScheduleFamily ScheduleFamily::zero_tikhonov() {
    return ScheduleFamily(Kind::ZeroTikhonov, 0.0, 0.0);
}

ScheduleFamily ScheduleFamily::tabulated(std::vector<TabulatedPoint> points) {
    if (points.size() < 2) throw std::invalid_argument("tabulated: need at least two points");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (!(points[i].t > points[i - 1].t))
            throw std::invalid_argument("tabulated: times must be strictly increasing");
    ScheduleFamily f(Kind::Tabulated, 0.0, 0.0);
    f.table_ = std::move(points);
    return f;
}

ScheduleFamily::Eval ScheduleFamily::eval(double t) const {
    if (!(t > 0.0)) throw std::domain_error("ScheduleFamily::eval: t must be positive");
    switch (kind_) {
        case Kind::PowerDamping:
            return {p1_ / t, -p1_ / (t * t)};
        case Kind::Case2Damping:
            // (2 a t - 2) / t^2 = 2a/t - 2/t^2
            return {2.0 * p1_ / t - 2.0 / (t * t),
                    -2.0 * p1_ / (t * t) + 4.0 / (t * t * t)};
        case Kind::PowerScaling: {
            const double v = std::pow(t, p1_);
            return {v, p1_ == 0.0 ? 0.0 : p1_ * v / t};
        }
        case Kind::ConstantScaling:
            return {p1_, 0.0};
        case Kind::PowerTikhonov: {
            const double v = p1_ * std::pow(t, -p2_);
            return {v, -p2_ * v / t};
        }
        case Kind::Case2Tikhonov: {
            const double r = p1_ + 3.0;
            const double v = 3.0 * std::pow(t, -r);
            return {v, -r * v / t};
        }
        case Kind::ZeroTikhonov:
            return {0.0, 0.0};
        case Kind::Tabulated: {
            if (t <= table_.front().t) return {table_.front().value, table_.front().derivative};
            if (t >= table_.back().t) return {table_.back().value, table_.back().derivative};
            auto it = std::upper_bound(table_.begin(), table_.end(), t,
                                       [](double x, const TabulatedPoint& p) { return x < p.t; });
            const TabulatedPoint& hi = *it;
            const TabulatedPoint& lo = *(it - 1);
            const double w = (t - lo.t) / (hi.t - lo.t);
            return {lo.value + w * (hi.value - lo.value),
                    lo.derivative + w * (hi.derivative - lo.derivative)};
        }
    }
    throw std::logic_error("ScheduleFamily::eval: unreachable");
}

std::optional<ScheduleFamily::PowerForm> ScheduleFamily::power_form() const {
    switch (kind_) {
        case Kind::PowerDamping:
            return PowerForm{p1_, -1.0};
        case Kind::PowerScaling:
            return PowerForm{1.0, p1_};
        case Kind::ConstantScaling:
            return PowerForm{p1_, 0.0};
        case Kind::PowerTikhonov:
            return PowerForm{p1_, -p2_};
        case Kind::Case2Tikhonov:
            return PowerForm{3.0, -(p1_ + 3.0)};
        case Kind::ZeroTikhonov:
            return PowerForm{0.0, 0.0};
        default:
            return std::nullopt;
    }
}

std::string ScheduleFamily::describe() const {
    switch (kind_) {
        case Kind::PowerDamping:
            return "power_damping:" + std::to_string(p1_);
        case Kind::Case2Damping:
            return "case2_damping:" + std::to_string(p1_);
        case Kind::PowerScaling:
            return "power_scaling:" + std::to_string(p1_);
        case Kind::ConstantScaling:
            return "constant_scaling:" + std::to_string(p1_);
        case Kind::PowerTikhonov:
            return "power_tikhonov:" + std::to_string(p1_) + "," + std::to_string(p2_);
        case Kind::Case2Tikhonov:
            return "case2_tikhonov:" + std::to_string(p1_);
        case Kind::ZeroTikhonov:
            return "zero";
        case Kind::Tabulated:
            return "tabulated";
    }
    return "unknown";
}

ScheduleSet ScheduleSet::make(ScheduleFamily damping, ScheduleFamily scaling,
                              ScheduleFamily tikhonov, double theta, double t0) {
    if (!(theta > 0.0)) throw std::invalid_argument("ScheduleSet: theta must be positive");
    if (!(t0 > 0.0)) throw std::invalid_argument("ScheduleSet: t0 must be positive");
    ScheduleSet s{std::move(damping), std::move(scaling), std::move(tikhonov), theta, t0};
    // Nonincreasing Tikhonov coefficient, sampled on a coarse log grid.
    for (int i = 0; i < 16; ++i) {
        const double t = t0 * std::pow(100.0, i / 15.0);
        if (s.tikhonov.derivative(t) > 1e-12)
            throw std::invalid_argument("ScheduleSet: tikhonov family must be nonincreasing");
    }
    return s;
}

ScheduleFamily::Eval ScheduleSet::damping_at(double t) const {
    if (t < t0) throw std::domain_error("ScheduleSet: t < t0");
    return damping.eval(t);
}

ScheduleFamily::Eval ScheduleSet::scaling_at(double t) const {
    if (t < t0) throw std::domain_error("ScheduleSet: t < t0");
    return scaling.eval(t);
}

ScheduleFamily::Eval ScheduleSet::tikhonov_at(double t) const {
    if (t < t0) throw std::domain_error("ScheduleSet: t < t0");
    return tikhonov.eval(t);
}

std::vector<double> default_validation_grid(const ScheduleSet& s) {
    std::vector<double> grid(200);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = s.t0 * std::pow(100.0, static_cast<double>(i) / (grid.size() - 1));
    return grid;
}

namespace {

// Does a*t^p <= b*t^q hold for every t >= t0, up to the margin tolerance?
// Coefficient comparisons absorb rounding at 1e-12 relative scale so that
// boundary families (exact equality in real arithmetic) count as passing.
std::optional<bool> power_leq(double a, double p, double b, double q, double t0) {
    const double tol = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    if (a <= tol) return b >= -tol;
    if (b <= 0.0) return false;
    if (p == q) return a <= b + tol;
    if (p < q) {
        const double lo = a * std::pow(t0, p);
        const double hi = b * std::pow(t0, q);
        return lo <= hi + 1e-12 * std::max({1.0, lo, hi});
    }
    return false;  // left side eventually dominates
}

struct PowerPair {
    double coef;
    double exponent;
};

// t * beta(t) * eps(t) as a power form, when both factors have one.
std::optional<PowerPair> growth_rhs_form(const ScheduleSet& s) {
    auto sb = s.scaling.power_form();
    auto tb = s.tikhonov.power_form();
    if (!sb || !tb) return std::nullopt;
    return PowerPair{sb->coef * tb->coef, sb->exponent + tb->exponent + 1.0};
}

ConditionCheck finalize_check(std::vector<double> margins, std::optional<bool> analytic) {
    ConditionCheck check;
    check.margins = std::move(margins);
    double worst = kInf;
    for (double m : check.margins) worst = std::min(worst, m);
    check.worst_margin = worst;
    if (analytic.has_value()) {
        check.ok = *analytic;
        if (!check.ok && check.worst_margin >= condition_margin_tolerance)
            check.worst_margin = -kInf;  // failure lies beyond the sampled grid
    } else {
        check.ok = check.worst_margin >= condition_margin_tolerance;
    }
    return check;
}

}  // namespace

ConditionReport validate_conditions(const ScheduleSet& s, std::span<const double> grid) {
    if (grid.empty()) throw std::invalid_argument("validate_conditions: grid must be nonempty");
    for (double t : grid)
        if (t < s.t0) throw std::invalid_argument("validate_conditions: grid point below t0");

    ConditionReport report;
    report.grid.assign(grid.begin(), grid.end());

    const double theta = s.theta;
    std::vector<double> m_damp, m_scal, m_growth, m_eps;
    m_damp.reserve(grid.size());
    m_scal.reserve(grid.size());
    m_growth.reserve(grid.size());
    m_eps.reserve(grid.size());

    for (double t : grid) {
        const auto a = s.damping.eval(t);
        const auto b = s.scaling.eval(t);
        const auto e = s.tikhonov.eval(t);
        m_damp.push_back(a.value - (1.0 + theta) / (theta * t));
        m_scal.push_back((1.0 - 2.0 * theta) / (theta * t) - b.derivative / b.value);
        m_growth.push_back(t * b.value * e.value - (a.value + t * a.derivative));
        m_eps.push_back(-e.derivative);
    }

    // Analytic verdicts where every participating family is a pure power.
    std::optional<bool> analytic_damp, analytic_scal, analytic_growth;
    if (auto d = s.damping.power_form())
        analytic_damp = power_leq((1.0 + theta) / theta, -1.0, d->coef, d->exponent, s.t0);
    if (auto b = s.scaling.power_form())
        // beta'(t)/beta(t) = exponent / t for any pure power.
        analytic_scal = power_leq(b->exponent, -1.0, (1.0 - 2.0 * theta) / theta, -1.0, s.t0);
    {
        // alpha + t alpha' = coef (1 + exponent) t^exponent for pure powers,
        // and exactly 2/t^2 for the case2 family.
        std::optional<PowerPair> lhs;
        if (auto d = s.damping.power_form())
            lhs = PowerPair{d->coef * (1.0 + d->exponent), d->exponent};
        else if (s.damping.kind() == ScheduleFamily::Kind::Case2Damping)
            lhs = PowerPair{2.0, -2.0};
        auto rhs = growth_rhs_form(s);
        if (lhs && rhs) {
            if (lhs->coef <= 0.0)
                analytic_growth = true;  // right side is nonnegative for all t
            else
                analytic_growth =
                    power_leq(lhs->coef, lhs->exponent, rhs->coef, rhs->exponent, s.t0);
        }
    }

    report.damping = finalize_check(std::move(m_damp), analytic_damp);
    report.scaling = finalize_check(std::move(m_scal), analytic_scal);
    report.tikhonov_growth = finalize_check(std::move(m_growth), analytic_growth);
    report.eps_monotone = finalize_check(std::move(m_eps), std::nullopt);
    return report;
}

ConditionReport validate_conditions(const ScheduleSet& s) {
    const auto grid = default_validation_grid(s);
    return validate_conditions(s, grid);
}

namespace {

// Numerical integral of integrand(t) over [lo, hi] by adaptive Simpson.
double adaptive_simpson(const std::function<double(double)>& f, double lo, double hi,
                        double f_lo, double f_mid, double f_hi, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid);
    const double rmid = 0.5 * (mid + hi);
    const double f_lmid = f(lmid);
    const double f_rmid = f(rmid);
    const double whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
    const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lmid + f_mid);
    const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rmid + f_hi);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, lo, mid, f_lo, f_lmid, f_mid, tol / 2.0, depth - 1) +
           adaptive_simpson(f, mid, hi, f_mid, f_rmid, f_hi, tol / 2.0, depth - 1);
}

double integrate_window(const std::function<double(double)>& f, double lo, double hi,
                        double tol) {
    const double mid = 0.5 * (lo + hi);
    return adaptive_simpson(f, lo, hi, f(lo), f(mid), f(hi), tol, 30);
}

// Doubling-horizon convergence heuristic: the tail integral is declared
// divergent when the partial sum still grows by more than 1% over the last
// doubling before the 1e8 horizon.
bool integral_converges(const std::function<double(double)>& f, double t0) {
    double total = 0.0;
    double lo = t0;
    double hi = 2.0 * t0;
    double before_last = 0.0;
    while (lo < 1e8) {
        total += integrate_window(f, lo, std::min(hi, 2e8), 1e-12 * std::max(1.0, total));
        if (hi >= 1e8) break;
        before_last = total;
        lo = hi;
        hi *= 2.0;
    }
    if (before_last <= 0.0) return true;  // effectively zero mass
    return (total - before_last) <= 0.01 * before_last;
}

}  // namespace

RegimeClass classify_regime(const ScheduleSet& s, bool force_quadrature) {
    const auto sb = s.scaling.power_form();
    const auto tb = s.tikhonov.power_form();

    if (sb && tb && !force_quadrature) {
        RegimeClass rc;
        rc.method = ClassifyMethod::Analytic;
        if (tb->coef == 0.0) {
            // eps == 0: both integrals vanish, nothing grows.
            rc.kind = Regime::Fast;
            rc.strong_convergence_flag = false;
            return rc;
        }
        // With beta(t) = B t^p and eps(t) = C t^-r(effective exponents), write
        // everything in the exponent e of the integrand t^e: convergence of
        // the tail integral means e < -1.
        const double fast_exponent = sb->exponent + tb->exponent + 1.0;   // t beta eps
        const double slow_exponent = sb->exponent + tb->exponent - 1.0;   // beta eps / t
        const double growth_exponent = sb->exponent + tb->exponent + 2.0; // t^2 beta eps
        const bool fast = fast_exponent < -1.0;
        const bool slow = slow_exponent < -1.0;
        rc.kind = fast ? Regime::Fast : (slow ? Regime::SlowOnly : Regime::Neither);
        rc.strong_convergence_flag = slow && growth_exponent > 0.0;
        return rc;
    }

    RegimeClass rc;
    rc.method = ClassifyMethod::Quadrature;
    auto fast_integrand = [&s](double t) {
        return t * s.scaling.value(t) * s.tikhonov.value(t);
    };
    auto slow_integrand = [&s](double t) {
        return s.scaling.value(t) * s.tikhonov.value(t) / t;
    };
    const bool fast = integral_converges(fast_integrand, s.t0);
    const bool slow = fast || integral_converges(slow_integrand, s.t0);
    rc.kind = fast ? Regime::Fast : (slow ? Regime::SlowOnly : Regime::Neither);

    if (slow) {
        // t^2 beta eps -> infinity probe at widening times: sustained growth
        // by at least 2x per two decades and a large final magnitude.
        const double g4 = 1e4 * 1e4 * s.scaling.value(1e4) * s.tikhonov.value(1e4);
        const double g6 = 1e6 * 1e6 * s.scaling.value(1e6) * s.tikhonov.value(1e6);
        const double g8 = 1e8 * 1e8 * s.scaling.value(1e8) * s.tikhonov.value(1e8);
        rc.strong_convergence_flag = g6 > 2.0 * g4 && g8 > 2.0 * g6 && g8 > 10.0;
    }
    return rc;
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::Fast:
            return "Fast";
        case Regime::SlowOnly:
            return "SlowOnly";
        case Regime::Neither:
            return "Neither";
    }
    return "unknown";
}

}  // namespace saddleflow
