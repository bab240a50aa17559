#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "saddleflow/matrix.hpp"

namespace saddleflow {

struct PrimalDualPoint {
    std::vector<double> x;
    std::vector<double> y;
};

/// A convex-concave bilinear saddle problem
///   min_x max_y  f(x) + <Kx, y> - g(y)
/// given by callables for f, g and their gradients plus the coupling matrix.
/// Immutable after construction; safe for shared concurrent reads.
struct SaddleProblem {
    std::size_t n = 0;  // primal dimension
    std::size_t m = 0;  // dual dimension

    std::function<double(std::span<const double>)> f_value;
    std::function<void(std::span<const double>, std::span<double>)> f_grad;
    std::function<double(std::span<const double>)> g_value;
    std::function<void(std::span<const double>, std::span<double>)> g_grad;

    Matrix coupling;  // m x n

    std::optional<PrimalDualPoint> known_saddle;
    std::optional<PrimalDualPoint> min_norm_saddle;
    std::optional<std::pair<double, double>> smoothness;  // (L1, L2), informational

    /// Scalar objective reported alongside runs when the problem has one
    /// (the regression problem sets this to its penalized least-squares value).
    std::function<double(std::span<const double>)> objective;

    std::string name;

    std::vector<double> f_grad_at(std::span<const double> x) const;
    std::vector<double> g_grad_at(std::span<const double> y) const;
};

/// The two-by-two quadratic min-max instance
///   f(x) = (mc x1 + nc x2)^2,  g(y) = (jc y1 + kc y2)^2,
///   K = [[mc jc, nc jc], [mc kc, nc kc]].
/// The origin is both a saddle point and the minimal-norm saddle point.
SaddleProblem quadratic_minmax_problem(double mc, double nc, double jc, double kc);

/// Smoothed L1 penalty: sum_i (1/a)(log(1+exp(a x_i)) + log(1+exp(-a x_i))),
/// evaluated with overflow-safe branches. Gradient component i is
/// tanh(a x_i / 2).
double smoothed_l1(std::span<const double> x, double a);
void smoothed_l1_grad(std::span<const double> x, double a, std::span<double> out);
std::vector<double> smoothed_l1_grad(std::span<const double> x, double a);

/// Saddle formulation of the smoothed-L1 regression problem:
///   f(x) = omega * R^a(x),  g(y) = ||y||^2 / 2 + <b, y>,  coupling = k.
/// Its objective field carries Phi(x) = ||Kx - b||^2 / 2 + omega * R^a(x).
SaddleProblem regression_saddle_problem(Matrix k, std::vector<double> b, double omega,
                                        double a);

/// L(x, y) = f(x) + <Kx, y> - g(y).
double lagrangian(const SaddleProblem& p, const PrimalDualPoint& pt);

/// Gradients of the epsilon-augmented Lagrangian
///   L_eps(x, y) = L(x, y) + (eps/2)(||x||^2 - ||y||^2):
///   aug_grad_x = grad f(x) + K^T y + eps x,
///   aug_grad_y = -grad g(y) + K x - eps y.
void aug_grad_x(const SaddleProblem& p, const PrimalDualPoint& pt, double eps,
                std::span<double> out);
void aug_grad_y(const SaddleProblem& p, const PrimalDualPoint& pt, double eps,
                std::span<double> out);
std::vector<double> aug_grad_x(const SaddleProblem& p, const PrimalDualPoint& pt, double eps);
std::vector<double> aug_grad_y(const SaddleProblem& p, const PrimalDualPoint& pt, double eps);

/// L(x, y_ref) - L(x_ref, y); nonnegative whenever ref is a saddle point.
double primal_dual_gap(const SaddleProblem& p, const PrimalDualPoint& pt,
                       const PrimalDualPoint& ref);

/// ||grad f(x) + K^T y|| + ||-grad g(y) + K x||; zero exactly at saddles.
double saddle_residual(const SaddleProblem& p, const PrimalDualPoint& pt);

}  // namespace saddleflow
