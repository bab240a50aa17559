#include "saddleflow/problems.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "saddleflow/kernels.hpp"

namespace saddleflow {

namespace {

void require_point_dims(const SaddleProblem& p, const PrimalDualPoint& pt) {
    if (pt.x.size() != p.n || pt.y.size() != p.m)
        throw std::invalid_argument("point dimensions do not match problem");
}

void check_known_saddle(const SaddleProblem& p) {
    if (!p.known_saddle) return;
    if (saddle_residual(p, *p.known_saddle) > 1e-8)
        throw std::invalid_argument("known_saddle fails the first-order optimality check");
}

}  // namespace

std::vector<double> SaddleProblem::f_grad_at(std::span<const double> x) const {
    std::vector<double> out(n);
    f_grad(x, out);
    return out;
}

std::vector<double> SaddleProblem::g_grad_at(std::span<const double> y) const {
    std::vector<double> out(m);
    g_grad(y, out);
    return out;
}

SaddleProblem quadratic_minmax_problem(double mc, double nc, double jc, double kc) {
    if (mc == 0.0 || nc == 0.0 || jc == 0.0 || kc == 0.0)
        throw std::invalid_argument("quadratic_minmax_problem: coefficients must be nonzero");

    Matrix k(2, 2, {mc * jc, nc * jc, mc * kc, nc * kc});

    SaddleProblem p{
        .n = 2,
        .m = 2,
        .f_value =
            [mc, nc](std::span<const double> x) {
                const double s = mc * x[0] + nc * x[1];
                return s * s;
            },
        .f_grad =
            [mc, nc](std::span<const double> x, std::span<double> out) {
                const double s = 2.0 * (mc * x[0] + nc * x[1]);
                out[0] = s * mc;
                out[1] = s * nc;
            },
        .g_value =
            [jc, kc](std::span<const double> y) {
                const double s = jc * y[0] + kc * y[1];
                return s * s;
            },
        .g_grad =
            [jc, kc](std::span<const double> y, std::span<double> out) {
                const double s = 2.0 * (jc * y[0] + kc * y[1]);
                out[0] = s * jc;
                out[1] = s * kc;
            },
        .coupling = std::move(k),
        .known_saddle = PrimalDualPoint{{0.0, 0.0}, {0.0, 0.0}},
        .min_norm_saddle = PrimalDualPoint{{0.0, 0.0}, {0.0, 0.0}},
        .smoothness = std::make_pair(2.0 * (mc * mc + nc * nc), 2.0 * (jc * jc + kc * kc)),
        .objective = nullptr,
        .name = "quadratic_minmax",
    };
    check_known_saddle(p);
    return p;
}

double smoothed_l1(std::span<const double> x, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("smoothed_l1: a must be positive");
    // log(1+e^z) + log(1+e^-z) = |z| + 2 log1p(e^-|z|); the exponential
    // argument is never positive, so no overflow for any |a x_i|.
    double total = 0.0;
    for (double xi : x) {
        const double z = std::abs(a * xi);
        total += (z + 2.0 * std::log1p(std::exp(-z))) / a;
    }
    return total;
}

void smoothed_l1_grad(std::span<const double> x, double a, std::span<double> out) {
    if (!(a > 0.0)) throw std::invalid_argument("smoothed_l1_grad: a must be positive");
    if (out.size() != x.size()) throw std::invalid_argument("smoothed_l1_grad: size mismatch");
    kernels::tanh_map(x.data(), x.size(), 0.5 * a, out.data());
}

std::vector<double> smoothed_l1_grad(std::span<const double> x, double a) {
    std::vector<double> out(x.size());
    smoothed_l1_grad(x, a, out);
    return out;
}

SaddleProblem regression_saddle_problem(Matrix k, std::vector<double> b, double omega,
                                        double a) {
    if (b.size() != k.rows())
        throw std::invalid_argument("regression_saddle_problem: b length must equal k rows");
    if (!(omega > 0.0)) throw std::invalid_argument("regression_saddle_problem: omega must be positive");
    if (!(a > 0.0)) throw std::invalid_argument("regression_saddle_problem: a must be positive");

    const std::size_t n = k.cols();
    const std::size_t m = k.rows();
    auto k_shared = std::make_shared<Matrix>(std::move(k));
    auto b_shared = std::make_shared<std::vector<double>>(std::move(b));

    SaddleProblem p{
        .n = n,
        .m = m,
        .f_value = [omega, a](std::span<const double> x) { return omega * smoothed_l1(x, a); },
        .f_grad =
            [omega, a](std::span<const double> x, std::span<double> out) {
                smoothed_l1_grad(x, a, out);
                for (double& v : out) v *= omega;
            },
        .g_value =
            [b_shared](std::span<const double> y) {
                double quad = 0.0, lin = 0.0;
                for (std::size_t i = 0; i < y.size(); ++i) {
                    quad += y[i] * y[i];
                    lin += (*b_shared)[i] * y[i];
                }
                return 0.5 * quad + lin;
            },
        .g_grad =
            [b_shared](std::span<const double> y, std::span<double> out) {
                for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + (*b_shared)[i];
            },
        .coupling = *k_shared,
        .known_saddle = std::nullopt,
        .min_norm_saddle = std::nullopt,
        .smoothness = std::nullopt,
        .objective =
            [k_shared, b_shared, omega, a](std::span<const double> x) {
                std::vector<double> residual(k_shared->rows());
                k_shared->apply(x, residual);
                double quad = 0.0;
                for (std::size_t i = 0; i < residual.size(); ++i) {
                    const double r = residual[i] - (*b_shared)[i];
                    quad += r * r;
                }
                return 0.5 * quad + omega * smoothed_l1(x, a);
            },
        .name = "regression_smoothed_l1",
    };
    return p;
}

double lagrangian(const SaddleProblem& p, const PrimalDualPoint& pt) {
    require_point_dims(p, pt);
    std::vector<double> kx(p.m);
    p.coupling.apply(pt.x, kx);
    return p.f_value(pt.x) + dot(kx, pt.y) - p.g_value(pt.y);
}

void aug_grad_x(const SaddleProblem& p, const PrimalDualPoint& pt, double eps,
                std::span<double> out) {
    require_point_dims(p, pt);
    if (out.size() != p.n) throw std::invalid_argument("aug_grad_x: output size mismatch");
    if (!(eps >= 0.0)) throw std::invalid_argument("aug_grad_x: eps must be nonnegative");
    p.f_grad(pt.x, out);
    std::vector<double> kty(p.n);
    p.coupling.apply_transpose(pt.y, kty);
    for (std::size_t i = 0; i < p.n; ++i) out[i] += kty[i] + eps * pt.x[i];
}

void aug_grad_y(const SaddleProblem& p, const PrimalDualPoint& pt, double eps,
                std::span<double> out) {
    require_point_dims(p, pt);
    if (out.size() != p.m) throw std::invalid_argument("aug_grad_y: output size mismatch");
    if (!(eps >= 0.0)) throw std::invalid_argument("aug_grad_y: eps must be nonnegative");
    std::vector<double> gy(p.m);
    p.g_grad(pt.y, gy);
    p.coupling.apply(pt.x, out);
    for (std::size_t i = 0; i < p.m; ++i) out[i] += -gy[i] - eps * pt.y[i];
}

std::vector<double> aug_grad_x(const SaddleProblem& p, const PrimalDualPoint& pt, double eps) {
    std::vector<double> out(p.n);
    aug_grad_x(p, pt, eps, out);
    return out;
}

std::vector<double> aug_grad_y(const SaddleProblem& p, const PrimalDualPoint& pt, double eps) {
    std::vector<double> out(p.m);
    aug_grad_y(p, pt, eps, out);
    return out;
}

double primal_dual_gap(const SaddleProblem& p, const PrimalDualPoint& pt,
                       const PrimalDualPoint& ref) {
    require_point_dims(p, pt);
    require_point_dims(p, ref);
    return lagrangian(p, PrimalDualPoint{pt.x, ref.y}) -
           lagrangian(p, PrimalDualPoint{ref.x, pt.y});
}

double saddle_residual(const SaddleProblem& p, const PrimalDualPoint& pt) {
    std::vector<double> gx = aug_grad_x(p, pt, 0.0);
    std::vector<double> gy = aug_grad_y(p, pt, 0.0);
    return norm2(gx) + norm2(gy);
}

}  // namespace saddleflow
