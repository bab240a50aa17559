// Times the OpenMP kernels against their serial references and checks that
// both produce bit-identical output (the parallel loops write disjoint
// elements in the same per-element order, so any mismatch is a bug).

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "saddleflow/kernels.hpp"
#include "saddleflow/numerics.hpp"

using namespace saddleflow;

namespace {

double time_ms(const std::function<void()>& body, int reps) {
    const auto begin = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) body();
    const auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(end - begin).count() / reps;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::string(argv[1]) == "--quick";
    const std::size_t rows = quick ? 200 : 2000;
    const std::size_t cols = quick ? 500 : 3000;
    const int reps = quick ? 20 : 50;

    const Matrix a = seeded_gaussian_matrix(rows, cols, RngSeed{7});
    const Matrix xv = seeded_gaussian_matrix(cols, 1, RngSeed{8});
    const Matrix yv = seeded_gaussian_matrix(rows, 1, RngSeed{9});
    const std::vector<double> x(xv.entries().begin(), xv.entries().end());
    const std::vector<double> y(yv.entries().begin(), yv.entries().end());

    std::vector<double> out_serial(rows), out_omp(rows);
    std::vector<double> outT_serial(cols), outT_omp(cols);
    std::vector<double> tanh_serial(cols), tanh_omp(cols);

    const double mv_s = time_ms(
        [&] { kernels::matvec_serial(a.data(), rows, cols, x.data(), out_serial.data()); }, reps);
    const double mv_p =
        time_ms([&] { kernels::matvec(a.data(), rows, cols, x.data(), out_omp.data()); }, reps);
    const double mt_s = time_ms(
        [&] {
            kernels::matvec_transpose_serial(a.data(), rows, cols, y.data(), outT_serial.data());
        },
        reps);
    const double mt_p = time_ms(
        [&] { kernels::matvec_transpose(a.data(), rows, cols, y.data(), outT_omp.data()); },
        reps);
    const double th_s = time_ms(
        [&] { kernels::tanh_map_serial(x.data(), cols, 50.0, tanh_serial.data()); }, reps);
    const double th_p =
        time_ms([&] { kernels::tanh_map(x.data(), cols, 50.0, tanh_omp.data()); }, reps);

    std::printf("kernel              serial(ms)   omp(ms)   speedup  bit-identical\n");
    std::printf("matvec              %9.3f  %9.3f  %7.2fx  %s\n", mv_s, mv_p, mv_s / mv_p,
                bits_equal(out_serial, out_omp) ? "yes" : "NO");
    std::printf("matvec_transpose    %9.3f  %9.3f  %7.2fx  %s\n", mt_s, mt_p, mt_s / mt_p,
                bits_equal(outT_serial, outT_omp) ? "yes" : "NO");
    std::printf("tanh_map            %9.3f  %9.3f  %7.2fx  %s\n", th_s, th_p, th_s / th_p,
                bits_equal(tanh_serial, tanh_omp) ? "yes" : "NO");

    const bool ok = bits_equal(out_serial, out_omp) && bits_equal(outT_serial, outT_omp) &&
                    bits_equal(tanh_serial, tanh_omp);
    return ok ? 0 : 1;
}
