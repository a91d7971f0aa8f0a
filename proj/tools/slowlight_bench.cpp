// Benchmark: the same density sweep through the serial reference path
// (workers = 1) and the OpenMP worker pool, with a bitwise comparison of
// the resulting metrics.

#include <chrono>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "slowlight/scenarios.hpp"

namespace {

slowlight::Scenario bench_scenario() {
    slowlight::Scenario sc = slowlight::preset("fig3a");
    sc.z_max = {24.0, true};
    sc.slices = {{0.0, true}, {24.0, true}};
    sc.seed_label = "bench";
    return sc;
}

double timed_run(slowlight::Scenario sc, int workers, slowlight::RunRecord& rec) {
    sc.workers = workers;
    const auto t0 = std::chrono::steady_clock::now();
    rec = slowlight::run(sc);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool identical(const slowlight::RunRecord& a, const slowlight::RunRecord& b) {
    if (a.points.size() != b.points.size()) return false;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        const auto& pa = a.points[i].metrics;
        const auto& pb = b.points[i].metrics;
        if (pa.group_velocity != pb.group_velocity || pa.delay != pb.delay ||
            pa.transmission_energy != pb.transmission_energy ||
            pa.transmission_peak != pb.transmission_peak)
            return false;
    }
    return true;
}

}  // namespace

int main() {
    int hw = 1;
#ifdef _OPENMP
    hw = omp_get_max_threads();
#endif
    const slowlight::Scenario sc = bench_scenario();
    std::printf("density sweep, %zu points, z_max = 24 Beer lengths\n", sc.sweep_values.size());

    slowlight::RunRecord serial, parallel;
    const double t_serial = timed_run(sc, 1, serial);
    std::printf("serial reference (workers=1): %8.2f s\n", t_serial);
    const double t_parallel = timed_run(sc, hw, parallel);
    std::printf("OpenMP pool      (workers=%d): %8.2f s  speedup %.2fx\n", hw, t_parallel,
                t_serial / t_parallel);

    if (!identical(serial, parallel)) {
        std::printf("FAIL: serial and parallel sweeps disagree\n");
        return 1;
    }
    std::printf("serial and parallel metrics bitwise identical\n");
    return 0;
}
