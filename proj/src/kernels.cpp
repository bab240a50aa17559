#include "saddleflow/kernels.hpp"

#include <cmath>
#include <cstdint>

namespace saddleflow::kernels {

void matvec_serial(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = a + i * cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void matvec_transpose_serial(const double* a, std::size_t rows, std::size_t cols,
                             const double* x, double* y) {
    for (std::size_t j = 0; j < cols; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < rows; ++i) acc += a[i * cols + j] * x[i];
        y[j] = acc;
    }
}

void tanh_map_serial(const double* x, std::size_t n, double scale, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(scale * x[i]);
}

void matvec(const double* a, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
    if (rows * cols < parallel_threshold) {
        matvec_serial(a, rows, cols, x, y);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(rows); ++i) {
        const double* row = a + static_cast<std::size_t>(i) * cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

void matvec_transpose(const double* a, std::size_t rows, std::size_t cols,
                      const double* x, double* y) {
    if (rows * cols < parallel_threshold) {
        matvec_transpose_serial(a, rows, cols, x, y);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(cols); ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < rows; ++i)
            acc += a[i * cols + static_cast<std::size_t>(j)] * x[i];
        y[j] = acc;
    }
}

void tanh_map(const double* x, std::size_t n, double scale, double* out) {
    if (n < parallel_threshold) {
        tanh_map_serial(x, n, scale, out);
        return;
    }
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
        out[i] = std::tanh(scale * x[i]);
}

}  // namespace saddleflow::kernels
