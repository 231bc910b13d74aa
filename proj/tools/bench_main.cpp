// Benchmark comparing the OpenMP kernels against their serial references:
// brute-force grid quadrature, multi-chain MCMC, and the chunked log-Laplace
// sum. Results must agree; the table reports timings and speedup.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "cbe/montecarlo.hpp"
#include "cbe/transform.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using clock_type = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn) {
    const auto t0 = clock_type::now();
    fn();
    const auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms, double diff) {
    std::printf("%-28s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   |diff| %.3g\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms, diff);
}

} // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled; both columns run serial code)\n");
#endif

    { // brute-force tensor grid, N = 3
        double serial_val = 0.0, parallel_val = 0.0;
        const double ts = time_ms([&] {
            serial_val = cbe::mc::detail::brute_force_tail_serial(3, 2.0, 0.0, 0.5, 220);
        });
        const double tp = time_ms([&] {
            parallel_val = cbe::mc::brute_force_tail(3, 2.0, 0.0, 0.5, 220);
        });
        report("brute_force_tail N=3", ts, tp, std::fabs(serial_val - parallel_val));
    }

    { // MCMC, 8 chains
        cbe::EnsembleParams p{32, 2.0, 4.0};
        cbe::mc::McConfig cfg;
        cfg.n_samples = 40000;
        cfg.n_burn = 300;
        cfg.thinning = 2;
        cfg.n_chains = 8;
        cfg.seed = 7;
        cbe::mc::SampleBatch serial_batch, parallel_batch;
        const double ts = time_ms([&] { serial_batch = cbe::mc::detail::mcmc_sample_serial(p, cfg); });
        const double tp = time_ms([&] { parallel_batch = cbe::mc::mcmc_sample(p, cfg); });
        double diff = 0.0;
        for (size_t i = 0; i < serial_batch.values.size(); ++i)
            diff = std::max(diff, std::fabs(serial_batch.values[i] - parallel_batch.values[i]));
        report("mcmc_sample N=32, 8 chains", ts, tp, diff);
    }

    { // chunked log-Laplace sum at large N
        cbe::EnsembleParams p{2000000, 2.0, 0.0};
        double v1 = 0.0, v2 = 0.0;
#ifdef _OPENMP
        const int saved = omp_get_max_threads();
        omp_set_num_threads(1);
#endif
        const double ts = time_ms([&] { v1 = cbe::exact::log_laplace(p, 3.0, 2); });
#ifdef _OPENMP
        omp_set_num_threads(saved);
#endif
        const double tp = time_ms([&] { v2 = cbe::exact::log_laplace(p, 3.0, 2); });
        report("log_laplace'' N=2e6", ts, tp, std::fabs(v1 - v2));
    }

    return 0;
}
