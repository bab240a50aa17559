#include "saddleflow/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "saddleflow/kernels.hpp"

namespace saddleflow {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("Matrix: dimensions must be positive");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows == 0 || cols == 0)
        throw std::invalid_argument("Matrix: dimensions must be positive");
    if (data_.size() != rows * cols)
        throw std::invalid_argument("Matrix: entry count does not match dimensions");
    check_finite();
}

void Matrix::check_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) throw std::invalid_argument("Matrix: non-finite entry");
}

void Matrix::apply(std::span<const double> x, std::span<double> out) const {
    if (x.size() != cols_ || out.size() != rows_)
        throw std::invalid_argument("Matrix::apply: size mismatch");
    kernels::matvec(data_.data(), rows_, cols_, x.data(), out.data());
}

std::vector<double> Matrix::apply(std::span<const double> x) const {
    std::vector<double> out(rows_);
    apply(x, out);
    return out;
}

void Matrix::apply_transpose(std::span<const double> x, std::span<double> out) const {
    if (x.size() != rows_ || out.size() != cols_)
        throw std::invalid_argument("Matrix::apply_transpose: size mismatch");
    kernels::matvec_transpose(data_.data(), rows_, cols_, x.data(), out.data());
}

std::vector<double> Matrix::apply_transpose(std::span<const double> x) const {
    std::vector<double> out(cols_);
    apply_transpose(x, out);
    return out;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm2_pair(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(dot(a, a) + dot(b, b));
}

}  // namespace saddleflow
