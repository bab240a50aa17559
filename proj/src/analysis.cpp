#include "saddleflow/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "saddleflow/errors.hpp"

namespace saddleflow {

LyapunovWeights LyapunovWeights::fast(const ScheduleSet& s, double t) {
    const double alpha = s.damping_at(t).value;
    const double inv_theta = 1.0 / s.theta;
    return {inv_theta, (t * alpha - 1.0 - inv_theta) * inv_theta};
}

LyapunovWeights LyapunovWeights::slow(const ScheduleSet& s, double t) {
    const double alpha = s.damping_at(t).value;
    const double theta = s.theta;
    return {1.0 / (theta * t),
            (theta * t * alpha - theta - 1.0) / (theta * theta * t * t)};
}

namespace {

double energy_at(const SaddleProblem& p, const ScheduleSet& s, const FlatState& sample,
                 const PrimalDualPoint& ref, bool fast) {
    const auto blocks = split_state(sample.lambda, p.n, p.m);
    if (ref.x.size() != p.n || ref.y.size() != p.m)
        throw std::invalid_argument("lyapunov energy: reference dimensions mismatch");

    const double t = sample.t;
    LyapunovWeights w = fast ? LyapunovWeights::fast(s, t) : LyapunovWeights::slow(s, t);
    // Boundary families sit at m == 0 exactly; absorb rounding at the scale
    // of the condition tolerance.
    if (w.m < 0.0 && w.m >= -1e-12) w.m = 0.0;
    if (w.m < 0.0)
        throw HypothesisViolationError(
            "lyapunov energy: damping condition alpha(t) >= (1+theta)/(theta t) fails at t = " +
            std::to_string(t));

    const double beta = s.scaling_at(t).value;
    const double eps = s.tikhonov_at(t).value;
    const double lead = fast ? t * t * beta : beta;
    const double vel_scale = fast ? t : 1.0;

    const double gap = primal_dual_gap(
        p, PrimalDualPoint{{blocks.x.begin(), blocks.x.end()}, {blocks.y.begin(), blocks.y.end()}},
        ref);

    double sq_xy = 0.0;
    for (double v : blocks.x) sq_xy += v * v;
    for (double v : blocks.y) sq_xy += v * v;

    double cross = 0.0, dist_sq = 0.0;
    for (std::size_t i = 0; i < p.n; ++i) {
        const double d = blocks.x[i] - ref.x[i];
        const double mu = w.b * d + vel_scale * blocks.xdot[i];
        cross += mu * mu;
        dist_sq += d * d;
    }
    for (std::size_t i = 0; i < p.m; ++i) {
        const double d = blocks.y[i] - ref.y[i];
        const double mu = w.b * d + vel_scale * blocks.ydot[i];
        cross += mu * mu;
        dist_sq += d * d;
    }

    return lead * (gap + 0.5 * eps * sq_xy) + 0.5 * cross + 0.5 * w.m * dist_sq;
}

}  // namespace

double lyapunov_fast(const SaddleProblem& p, const ScheduleSet& s, const FlatState& sample,
                     const PrimalDualPoint& ref) {
    return energy_at(p, s, sample, ref, true);
}

double lyapunov_slow(const SaddleProblem& p, const ScheduleSet& s, const FlatState& sample,
                     const PrimalDualPoint& ref) {
    return energy_at(p, s, sample, ref, false);
}

double weighted_tikhonov_integral(const ScheduleSet& s, double t) {
    if (t < s.t0) throw std::domain_error("weighted_tikhonov_integral: t < t0");
    const auto sb = s.scaling.power_form();
    const auto tb = s.tikhonov.power_form();
    if (sb && tb) {
        // integrand = C tau^e with C = coef product, e = exponents + 1
        const double coef = sb->coef * tb->coef;
        const double expo = sb->exponent + tb->exponent + 1.0;
        if (coef == 0.0) return 0.0;
        if (expo == -1.0) return coef * (std::log(t) - std::log(s.t0));
        return coef / (expo + 1.0) * (std::pow(t, expo + 1.0) - std::pow(s.t0, expo + 1.0));
    }
    // Simpson fallback on the (smooth) integrand.
    if (t == s.t0) return 0.0;
    const int segments = 512;
    const double h = (t - s.t0) / segments;
    auto f = [&s](double tau) { return tau * s.scaling.value(tau) * s.tikhonov.value(tau); };
    double acc = f(s.t0) + f(t);
    for (int i = 1; i < segments; ++i)
        acc += (i % 2 == 1 ? 4.0 : 2.0) * f(s.t0 + i * h);
    return acc * h / 3.0;
}

namespace {

std::vector<double> bound_margins(std::span<const TrajectorySample> trajectory,
                                  const SaddleProblem& p, const ScheduleSet& s,
                                  const PrimalDualPoint& ref, bool fast) {
    if (trajectory.empty()) return {};
    const auto report = validate_conditions(s);
    if (!report.all_ok())
        throw HypothesisViolationError(
            "lyapunov bound margin: schedule set fails the certificate hypotheses");

    const double ref_sq = dot(ref.x, ref.x) + dot(ref.y, ref.y);
    const double scale = ref_sq / (2.0 * s.theta);

    auto value = [&](const TrajectorySample& ts) {
        const double e =
            fast ? lyapunov_fast(p, s, ts.state, ref) : lyapunov_slow(p, s, ts.state, ref);
        return fast ? e : ts.t * ts.t * e;
    };

    const double at_start = value(trajectory.front());
    const double t_start = trajectory.front().t;
    std::vector<double> margins;
    margins.reserve(trajectory.size());
    for (const auto& ts : trajectory) {
        const double integral =
            weighted_tikhonov_integral(s, ts.t) - weighted_tikhonov_integral(s, t_start);
        margins.push_back(at_start + scale * integral - value(ts));
    }
    return margins;
}

}  // namespace

std::vector<double> lyapunov_bound_margin(std::span<const TrajectorySample> trajectory,
                                          const SaddleProblem& p, const ScheduleSet& s,
                                          const PrimalDualPoint& ref) {
    return bound_margins(trajectory, p, s, ref, true);
}

std::vector<double> lyapunov_slow_bound_margin(std::span<const TrajectorySample> trajectory,
                                               const SaddleProblem& p, const ScheduleSet& s,
                                               const PrimalDualPoint& ref) {
    return bound_margins(trajectory, p, s, ref, false);
}

double rate_slope(std::span<const std::pair<double, double>> samples,
                  std::pair<double, double> window) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t count = 0;
    for (const auto& [t, v] : samples) {
        if (t < window.first || t > window.second) continue;
        if (!(v > 0.0))
            throw std::invalid_argument("rate_slope: values must be positive inside the window");
        const double lt = std::log(t);
        const double lv = std::log(v);
        sx += lt;
        sy += lv;
        sxx += lt * lt;
        sxy += lt * lv;
        ++count;
    }
    if (count < 5) throw std::invalid_argument("rate_slope: need at least 5 points in the window");
    const double denom = count * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("rate_slope: degenerate abscissae");
    return (count * sxy - sx * sy) / denom;
}

std::vector<TrajectorySample> annotate(std::span<const FlatState> trajectory,
                                       const SaddleProblem& p, const ScheduleSet& s,
                                       const PrimalDualPoint* ref,
                                       const AnnotateOptions& options) {
    std::vector<TrajectorySample> out;
    out.reserve(trajectory.size());

    std::vector<double> grad_ref_f, grad_ref_g;
    if (ref) {
        if (ref->x.size() != p.n || ref->y.size() != p.m)
            throw std::invalid_argument("annotate: reference dimensions mismatch");
        grad_ref_f = p.f_grad_at(ref->x);
        grad_ref_g = p.g_grad_at(ref->y);
    }

    for (const FlatState& state : trajectory) {
        const auto blocks = split_state(state.lambda, p.n, p.m);
        TrajectorySample ts;
        ts.t = state.t;
        ts.state = state;
        ts.speed_x = norm2(blocks.xdot);
        ts.speed_y = norm2(blocks.ydot);
        ts.norm_xy = norm2_pair(blocks.x, blocks.y);

        PrimalDualPoint pt{{blocks.x.begin(), blocks.x.end()},
                           {blocks.y.begin(), blocks.y.end()}};

        if (ref) {
            ts.gap = primal_dual_gap(p, pt, *ref);
            std::vector<double> gf = p.f_grad_at(pt.x);
            for (std::size_t i = 0; i < gf.size(); ++i) gf[i] -= grad_ref_f[i];
            ts.grad_res_f = norm2(gf);
            std::vector<double> gg = p.g_grad_at(pt.y);
            for (std::size_t i = 0; i < gg.size(); ++i) gg[i] -= grad_ref_g[i];
            ts.grad_res_g = norm2(gg);
        }
        if (p.min_norm_saddle) {
            double acc = 0.0;
            for (std::size_t i = 0; i < p.n; ++i) {
                const double d = blocks.x[i] - p.min_norm_saddle->x[i];
                acc += d * d;
            }
            for (std::size_t i = 0; i < p.m; ++i) {
                const double d = blocks.y[i] - p.min_norm_saddle->y[i];
                acc += d * d;
            }
            ts.dist_minnorm = std::sqrt(acc);
        }
        if (options.energies && ref) {
            const LyapunovWeights wf = LyapunovWeights::fast(s, state.t);
            if (wf.m >= -1e-12) {
                ts.e_fast = lyapunov_fast(p, s, state, *ref);
                ts.e_slow = lyapunov_slow(p, s, state, *ref);
            }
        }
        if (p.objective) ts.phi = p.objective(pt.x);

        out.push_back(std::move(ts));
    }
    return out;
}

}  // namespace saddleflow
