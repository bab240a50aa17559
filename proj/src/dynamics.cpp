#include "saddleflow/dynamics.hpp"

#include <stdexcept>

namespace saddleflow {

SystemVariant SystemVariant::apdd(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("SystemVariant::apdd: alpha must be positive");
    return {Tag::Apdd, alpha};
}

std::string SystemVariant::describe() const {
    switch (tag) {
        case Tag::Han:
            return "han";
        case Tag::HanNoTikhonov:
            return "han_notikhonov";
        case Tag::Apdd:
            return "apdd:" + std::to_string(apdd_alpha);
        case Tag::Mpdd:
            return "mpdd";
    }
    return "unknown";
}

FlatState pack_state(double t, std::span<const double> x, std::span<const double> y,
                     std::span<const double> xdot, std::span<const double> ydot) {
    if (x.size() != xdot.size() || y.size() != ydot.size())
        throw std::invalid_argument("pack_state: velocity blocks must match position blocks");
    FlatState s;
    s.t = t;
    s.lambda.reserve(2 * (x.size() + y.size()));
    s.lambda.insert(s.lambda.end(), x.begin(), x.end());
    s.lambda.insert(s.lambda.end(), y.begin(), y.end());
    s.lambda.insert(s.lambda.end(), xdot.begin(), xdot.end());
    s.lambda.insert(s.lambda.end(), ydot.begin(), ydot.end());
    return s;
}

StateBlocks split_state(std::span<const double> lambda, std::size_t n, std::size_t m) {
    if (lambda.size() != 2 * (n + m))
        throw std::invalid_argument("split_state: state length must be 2n + 2m");
    return StateBlocks{
        lambda.subspan(0, n),
        lambda.subspan(n, m),
        lambda.subspan(n + m, n),
        lambda.subspan(2 * n + m, m),
    };
}

RhsEvaluator::RhsEvaluator(SystemVariant variant, const SaddleProblem& problem,
                           const ScheduleSet& schedules)
    : variant_(variant),
      problem_(problem),
      schedules_(schedules),
      n_(problem.n),
      m_(problem.m),
      ext_x_(problem.n),
      ext_y_(problem.m),
      grad_f_(problem.n),
      grad_g_(problem.m),
      kt_buf_(problem.n),
      k_buf_(problem.m) {}

void RhsEvaluator::operator()(double t, std::span<const double> lambda,
                              std::span<double> out) const {
    if (lambda.size() != state_size() || out.size() != state_size())
        throw std::invalid_argument("RhsEvaluator: state length must be 2n + 2m");
    if (t < schedules_.t0) throw std::domain_error("RhsEvaluator: t < t0");

    double alpha, beta, eps, theta;
    switch (variant_.tag) {
        case SystemVariant::Tag::Han: {
            alpha = schedules_.damping.value(t);
            beta = schedules_.scaling.value(t);
            eps = schedules_.tikhonov.value(t);
            theta = schedules_.theta;
            break;
        }
        case SystemVariant::Tag::HanNoTikhonov:
        case SystemVariant::Tag::Mpdd: {
            alpha = schedules_.damping.value(t);
            beta = schedules_.scaling.value(t);
            eps = 0.0;
            theta = schedules_.theta;
            break;
        }
        case SystemVariant::Tag::Apdd: {
            alpha = variant_.apdd_alpha / t;
            beta = 1.0;
            eps = 0.0;
            theta = variant_.apdd_theta();
            break;
        }
        default:
            throw std::logic_error("RhsEvaluator: unknown variant");
    }

    const auto blocks = split_state(lambda, n_, m_);
    const double ext = theta * t;

    for (std::size_t i = 0; i < m_; ++i) ext_y_[i] = blocks.y[i] + ext * blocks.ydot[i];
    for (std::size_t i = 0; i < n_; ++i) ext_x_[i] = blocks.x[i] + ext * blocks.xdot[i];

    problem_.f_grad(blocks.x, grad_f_);
    problem_.g_grad(blocks.y, grad_g_);
    problem_.coupling.apply_transpose(ext_y_, kt_buf_);
    problem_.coupling.apply(ext_x_, k_buf_);

    double* d_x = out.data();
    double* d_y = d_x + n_;
    double* d_xdot = d_y + m_;
    double* d_ydot = d_xdot + n_;

    for (std::size_t i = 0; i < n_; ++i) d_x[i] = blocks.xdot[i];
    for (std::size_t i = 0; i < m_; ++i) d_y[i] = blocks.ydot[i];
    for (std::size_t i = 0; i < n_; ++i)
        d_xdot[i] = -alpha * blocks.xdot[i] -
                    beta * (grad_f_[i] + eps * blocks.x[i] + kt_buf_[i]);
    for (std::size_t i = 0; i < m_; ++i)
        d_ydot[i] = -alpha * blocks.ydot[i] +
                    beta * (-grad_g_[i] - eps * blocks.y[i] + k_buf_[i]);
}

std::vector<double> rhs(const SystemVariant& variant, const SaddleProblem& problem,
                        const ScheduleSet& schedules, double t,
                        std::span<const double> lambda) {
    RhsEvaluator evaluator(variant, problem, schedules);
    std::vector<double> out(lambda.size());
    evaluator(t, lambda, out);
    return out;
}

}  // namespace saddleflow
