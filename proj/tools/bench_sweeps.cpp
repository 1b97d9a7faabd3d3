// Times the OpenMP sweep kernels against the serial reference on grids a few
// times denser than the default verification runs.

#include <chrono>
#include <cstdio>

#include "bobkov/sweep.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

template <typename Fn>
double time_ms(Fn&& fn) {
    const auto t0 = clock_type::now();
    fn();
    const auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms, int threads) {
    std::printf("%-24s serial %9.1f ms   parallel(%d) %9.1f ms   speedup %.2fx\n", name,
                serial_ms, threads, parallel_ms, serial_ms / parallel_ms);
}

} // namespace

int main() {
    bobkov::SweepOptions serial;
    serial.parallel = false;
    bobkov::SweepOptions parallel;
    const int threads = bobkov::resolve_threads(parallel);

    {
        bobkov::HjbGridSpec grid;
        grid.nt = 24;
        grid.np = 24;
        grid.lambdas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        double checksum = 0.0;
        const double s_ms = time_ms([&] {
            for (const auto& r : bobkov::hjb_sweep(grid, serial)) checksum += r.rel_residual;
        });
        const double p_ms = time_ms([&] {
            for (const auto& r : bobkov::hjb_sweep(grid, parallel)) checksum -= r.rel_residual;
        });
        report("hjb_sweep 24x24x9", s_ms, p_ms, threads);
        if (checksum != 0.0) std::printf("  serial/parallel mismatch! checksum %g\n", checksum);
    }

    {
        bobkov::HjbGridSpec grid; // default 6x6x5
        const double s_ms =
            time_ms([&] { (void)bobkov::derivative_sweep(grid, 1e-4, serial); });
        const double p_ms =
            time_ms([&] { (void)bobkov::derivative_sweep(grid, 1e-4, parallel); });
        report("derivative_sweep 6x6x5", s_ms, p_ms, threads);
    }

    {
        const auto corpus = bobkov::make_corpus_1d(42, 24);
        const bobkov::QuadratureSpec qspec;
        const double s_ms =
            time_ms([&] { (void)bobkov::deficit_corpus_eval(corpus, qspec, serial); });
        const double p_ms =
            time_ms([&] { (void)bobkov::deficit_corpus_eval(corpus, qspec, parallel); });
        report("deficit_corpus 24 fns", s_ms, p_ms, threads);
    }

    return 0;
}
