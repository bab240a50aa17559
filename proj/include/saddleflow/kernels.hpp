#pragma once

#include <cstddef>

namespace saddleflow::kernels {

// Dense row-major kernels. Each element of the output is accumulated in the
// same (serial, left-to-right) order in every variant, so the OpenMP versions
// are bit-identical to the serial references for any thread count. Reductions
// that cannot keep a fixed accumulation order stay serial by policy.

/// y = A x, A row-major (rows x cols). Serial reference.
void matvec_serial(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y);

/// y = A^T x, A row-major (rows x cols), x of length rows, y of length cols.
/// Serial reference; each y[j] is a straight scan down column j.
void matvec_transpose_serial(const double* a, std::size_t rows, std::size_t cols,
                             const double* x, double* y);

/// out[i] = tanh(scale * x[i]). Serial reference.
void tanh_map_serial(const double* x, std::size_t n, double scale, double* out);

/// OpenMP variants; dispatch to the serial reference below a size threshold.
void matvec(const double* a, std::size_t rows, std::size_t cols,
            const double* x, double* y);
void matvec_transpose(const double* a, std::size_t rows, std::size_t cols,
                      const double* x, double* y);
void tanh_map(const double* x, std::size_t n, double scale, double* out);

/// Work sizes below this many multiply-adds are not worth a parallel region.
inline constexpr std::size_t parallel_threshold = 32768;

}  // namespace saddleflow::kernels
