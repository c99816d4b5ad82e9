// Timing comparison between the serial reference kernels and the OpenMP
// front-door versions, plus a bitwise equality check on every result.
#include <chrono>
#include <cstdio>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "imdiff/linalg.hpp"
#include "imdiff/rng.hpp"

using namespace imdiff;

namespace {

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

bool bitwise_equal(const Vec& a, const Vec& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

void bench_size(int n) {
    Rng rng(17);
    Mat a(n, n), b(n, n);
    Vec x(n);
    for (double& v : a.data) v = rng.gaussian();
    for (double& v : b.data) v = rng.gaussian();
    for (double& v : x) v = rng.gaussian();

    Mat c_ref, c_par;
    Vec y_ref, y_par;
    Mat g_ref, g_par;

    const double t_mm_ref = time_best_of(3, [&] { ref::matmul(a, b, c_ref); });
    const double t_mm_par = time_best_of(3, [&] { matmul(a, b, c_par); });
    const double t_mv_ref = time_best_of(5, [&] { ref::matvec(a, x, y_ref); });
    const double t_mv_par = time_best_of(5, [&] { matvec(a, x, y_par); });
    const double t_gr_ref = time_best_of(3, [&] { ref::gram(a, g_ref); });
    const double t_gr_par = time_best_of(3, [&] { gram(a, g_par); });

    const bool same = bitwise_equal(c_ref.data, c_par.data) && bitwise_equal(y_ref, y_par) &&
                      bitwise_equal(g_ref.data, g_par.data);
    const double mm_flops = 2.0 * n * double(n) * n;

    std::printf("n=%4d  matmul %8.2f -> %8.2f ms (%5.2fx, %6.2f GF/s)  matvec %6.3f -> %6.3f ms"
                "  gram %8.2f -> %8.2f ms  bitwise=%s\n",
                n, 1e3 * t_mm_ref, 1e3 * t_mm_par, t_mm_ref / t_mm_par, mm_flops / t_mm_par / 1e9,
                1e3 * t_mv_ref, 1e3 * t_mv_par, 1e3 * t_gr_ref, 1e3 * t_gr_par,
                same ? "yes" : "NO");
    if (!same) std::exit(1);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; front door runs serial\n");
#endif
    for (const int n : {128, 256, 512, 1024}) bench_size(n);
    return 0;
}
