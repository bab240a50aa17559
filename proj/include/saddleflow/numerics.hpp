#pragma once

#include <vector>

#include "saddleflow/matrix.hpp"
#include "saddleflow/rng.hpp"

namespace saddleflow {

/// rows x cols matrix of i.i.d. standard normal draws from the documented
/// SplitMix64 + Box-Muller generator. Pure function of (rows, cols, seed).
Matrix seeded_gaussian_matrix(std::size_t rows, std::size_t cols, RngSeed seed);

/// Thin orthonormal factor Q of a (rows >= cols, full column rank) via
/// twice-iterated modified Gram-Schmidt. Sign convention: the implied
/// triangular factor has nonnegative diagonal. Throws DegenerateInputError
/// when a column is numerically dependent on its predecessors.
Matrix orthonormal_factor(const Matrix& a);

/// The planted factorization behind conditioned_matrix, kept so tests can
/// recover the singular values by applying K to the stored columns.
struct PlantedFactors {
    Matrix u;                            // rows x p, orthonormal columns
    Matrix v;                            // cols x p, orthonormal columns
    std::vector<double> singular_values; // p values, descending
};

/// Builds U, V from QR-orthonormalized seeded Gaussian matrices and plants
/// p = min(rows, cols) singular values drawn log-uniformly from
/// [sigma_max / kappa, sigma_max]. The largest and smallest endpoints are
/// always included, so the 2-norm condition number of the assembled matrix
/// equals kappa up to rounding.
PlantedFactors conditioned_factors(std::size_t rows, std::size_t cols, double kappa,
                                   double sigma_max, RngSeed seed);

/// K = U diag(sigma) V^T assembled from conditioned_factors.
Matrix conditioned_matrix(std::size_t rows, std::size_t cols, double kappa,
                          double sigma_max, RngSeed seed);

Matrix assemble_from_factors(const PlantedFactors& f);

}  // namespace saddleflow
