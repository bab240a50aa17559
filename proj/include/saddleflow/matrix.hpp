#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace saddleflow {

/// Dense row-major matrix of doubles. Entries are validated to be finite on
/// construction; dimensions must be positive.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const double* data() const { return data_.data(); }
    double* data() { return data_.data(); }
    std::span<const double> entries() const { return data_; }

    /// out = A x (out must have length rows()).
    void apply(std::span<const double> x, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> x) const;

    /// out = A^T x (out must have length cols()).
    void apply_transpose(std::span<const double> x, std::span<double> out) const;
    std::vector<double> apply_transpose(std::span<const double> x) const;

    Matrix transposed() const;

    /// Re-checks the finiteness invariant after in-place writes.
    void check_finite() const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

/// Euclidean norm, dot product and friends for plain vectors. These stay
/// serial so their accumulation order is fixed.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm2_pair(std::span<const double> a, std::span<const double> b);

}  // namespace saddleflow
