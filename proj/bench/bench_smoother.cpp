// Compares the OpenMP kernels against the serial reference on a 2D grid.
// The two are bitwise-identical by construction; this measures the speedup.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "psaws/rng.hpp"
#include "psaws/smoother.hpp"

using namespace psaws;

namespace {

struct Scene {
    Design design;
    SmootherConfig config;
    std::vector<double> tvals;
    SmootherState prev;
};

Scene make_scene(int side, double h) {
    Scene sc{Design::grid(side, side),
             SmootherConfig{Family::gaussian(), 8.0,
                            BandwidthSchedule{h / 1.25, 1.25, 1}},
             {},
             {}};
    auto rng = make_stream(42, "bench", side);
    std::normal_distribution<double> noise(0.0, 1.0);
    sc.tvals.resize(sc.design.size());
    for (std::size_t i = 0; i < sc.tvals.size(); ++i)
        sc.tvals[i] = (i % (2 * side) < static_cast<std::size_t>(side) ? 0.0
                                                                       : 2.0) +
                      noise(rng);
    sc.prev = nonadaptive_estimate(sc.design, sc.config.kloc, sc.tvals,
                                   sc.config.schedule.at(0));
    return sc;
}

void bench_adaptive_step_parallel(benchmark::State& state) {
    auto sc = make_scene(static_cast<int>(state.range(0)),
                         static_cast<double>(state.range(1)));
    for (auto _ : state) {
        auto next = adaptive_step(sc.prev, sc.config, sc.design, sc.tvals);
        benchmark::DoNotOptimize(next.theta.data());
    }
}

void bench_adaptive_step_serial(benchmark::State& state) {
    auto sc = make_scene(static_cast<int>(state.range(0)),
                         static_cast<double>(state.range(1)));
    for (auto _ : state) {
        auto next =
            serial::adaptive_step(sc.prev, sc.config, sc.design, sc.tvals);
        benchmark::DoNotOptimize(next.theta.data());
    }
}

void bench_nonadaptive_parallel(benchmark::State& state) {
    auto sc = make_scene(static_cast<int>(state.range(0)),
                         static_cast<double>(state.range(1)));
    for (auto _ : state) {
        auto est = nonadaptive_estimate(sc.design, sc.config.kloc, sc.tvals,
                                        static_cast<double>(state.range(1)));
        benchmark::DoNotOptimize(est.theta.data());
    }
}

void bench_nonadaptive_serial(benchmark::State& state) {
    auto sc = make_scene(static_cast<int>(state.range(0)),
                         static_cast<double>(state.range(1)));
    for (auto _ : state) {
        auto est = serial::nonadaptive_estimate(
            sc.design, sc.config.kloc, sc.tvals,
            static_cast<double>(state.range(1)));
        benchmark::DoNotOptimize(est.theta.data());
    }
}

}  // namespace

BENCHMARK(bench_adaptive_step_parallel)
    ->Args({64, 4})
    ->Args({128, 4})
    ->Args({128, 8})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bench_adaptive_step_serial)
    ->Args({64, 4})
    ->Args({128, 4})
    ->Args({128, 8})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bench_nonadaptive_parallel)
    ->Args({128, 8})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bench_nonadaptive_serial)
    ->Args({128, 8})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
