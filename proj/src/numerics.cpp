#include "saddleflow/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "saddleflow/errors.hpp"

namespace saddleflow {

Matrix seeded_gaussian_matrix(std::size_t rows, std::size_t cols, RngSeed seed) {
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("seeded_gaussian_matrix: dimensions must be positive");
    GaussianSampler sampler(seed);
    Matrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) out(i, j) = sampler.next();
    return out;
}

Matrix orthonormal_factor(const Matrix& a) {
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    if (rows < cols)
        throw std::invalid_argument("orthonormal_factor: need rows >= cols");

    Matrix q(rows, cols);
    std::vector<double> v(rows);
    // Modified Gram-Schmidt with one reorthogonalization pass. The second
    // pass keeps ||Q^T Q - I|| at machine-epsilon level even for mildly
    // ill-conditioned inputs.
    for (std::size_t j = 0; j < cols; ++j) {
        double col_norm = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
            v[i] = a(i, j);
            col_norm += v[i] * v[i];
        }
        col_norm = std::sqrt(col_norm);
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t k = 0; k < j; ++k) {
                double proj = 0.0;
                for (std::size_t i = 0; i < rows; ++i) proj += q(i, k) * v[i];
                for (std::size_t i = 0; i < rows; ++i) v[i] -= proj * q(i, k);
            }
        }
        double residual = 0.0;
        for (std::size_t i = 0; i < rows; ++i) residual += v[i] * v[i];
        residual = std::sqrt(residual);
        // Pivot tolerance relative to the original column norm.
        if (!(residual > 1e-10 * std::max(col_norm, 1e-300)))
            throw DegenerateInputError("orthonormal_factor: rank-deficient input at column " +
                                       std::to_string(j));
        const double inv = 1.0 / residual;  // R(j,j) = residual > 0 by construction
        for (std::size_t i = 0; i < rows; ++i) q(i, j) = v[i] * inv;
    }
    return q;
}

PlantedFactors conditioned_factors(std::size_t rows, std::size_t cols, double kappa,
                                   double sigma_max, RngSeed seed) {
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("conditioned_factors: dimensions must be positive");
    if (!(kappa >= 1.0))
        throw std::invalid_argument("conditioned_factors: kappa must be >= 1");
    if (!(sigma_max > 0.0))
        throw std::invalid_argument("conditioned_factors: sigma_max must be positive");

    const std::size_t p = std::min(rows, cols);
    SplitMix64 splitter(seed);
    const RngSeed seed_u = splitter.fork();
    const RngSeed seed_v = splitter.fork();
    const RngSeed seed_sigma = splitter.fork();

    Matrix u = orthonormal_factor(seeded_gaussian_matrix(rows, p, seed_u));
    Matrix v = orthonormal_factor(seeded_gaussian_matrix(cols, p, seed_v));

    std::vector<double> sigma(p);
    sigma[0] = sigma_max;
    if (p >= 2) {
        // Pin both endpoints so the measured condition number is exactly
        // kappa; interior values are log-uniform on [sigma_max/kappa, sigma_max].
        sigma[p - 1] = sigma_max / kappa;
        SplitMix64 rng(seed_sigma);
        const double log_lo = std::log(sigma_max / kappa);
        const double log_hi = std::log(sigma_max);
        for (std::size_t i = 1; i + 1 < p; ++i)
            sigma[i] = std::exp(log_lo + (log_hi - log_lo) * rng.next_unit());
        std::sort(sigma.begin(), sigma.end(), std::greater<double>());
    }
    return PlantedFactors{std::move(u), std::move(v), std::move(sigma)};
}

Matrix assemble_from_factors(const PlantedFactors& f) {
    const std::size_t rows = f.u.rows();
    const std::size_t cols = f.v.rows();
    const std::size_t p = f.singular_values.size();
    Matrix k(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < p; ++r)
                acc += f.u(i, r) * f.singular_values[r] * f.v(j, r);
            k(i, j) = acc;
        }
    return k;
}

Matrix conditioned_matrix(std::size_t rows, std::size_t cols, double kappa,
                          double sigma_max, RngSeed seed) {
    return assemble_from_factors(conditioned_factors(rows, cols, kappa, sigma_max, seed));
}

}  // namespace saddleflow
