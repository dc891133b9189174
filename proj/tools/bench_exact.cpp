// Benchmark: serial vs OpenMP bitmask-DP existence kernels on planted
// instances. Not a ctest; run it by hand to size the speedup on this box.
#include <chrono>
#include <cstdio>

#include "sfcmr/oracle.hpp"

#ifdef SFCMR_HAVE_OPENMP
#include <omp.h>
#endif

namespace {

template <typename F>
double time_ms(F&& f, int reps) {
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    const auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(end - start).count() / reps;
}

} // namespace

int main() {
#ifdef SFCMR_HAVE_OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not available; parallel kernel runs serially\n");
#endif
    std::printf("%-28s %10s %10s %8s\n", "instance", "serial ms", "openmp ms", "speedup");
    for (int n : {16, 18, 20}) {
        for (std::uint64_t seed : {7ull, 8ull}) {
            sfcmr::Graph g = sfcmr::gen_planted_cycle(n, 0.15, seed);
            bool rs = false, rp = false;
            const int reps = n >= 20 ? 3 : 5;
            const double ts = time_ms([&] { rs = sfcmr::ham_dp_serial(g, sfcmr::Mode::kCircuit); }, reps);
            const double tp =
                time_ms([&] { rp = sfcmr::ham_dp_parallel(g, sfcmr::Mode::kCircuit); }, reps);
            if (rs != rp) {
                std::printf("KERNEL MISMATCH on n=%d seed=%llu\n", n,
                            static_cast<unsigned long long>(seed));
                return 1;
            }
            std::printf("planted_cycle n=%-2d seed=%-4llu %10.2f %10.2f %7.2fx (exists=%d)\n", n,
                        static_cast<unsigned long long>(seed), ts, tp, ts / tp, rs ? 1 : 0);
        }
    }
    return 0;
}
