// Serial reference vs OpenMP kernels on the same path. Thread count comes
// from OMP_NUM_THREADS.

#include <numbers>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "roctb/action.hpp"
#include "roctb/minimizer.hpp"

using namespace roctb;

namespace {

struct Setup {
    TimeGrid grid;
    FieldParams params;
    std::vector<cplx> z;
    std::vector<cplx> z2;
};

Setup make(int segments) {
    const KeplerArc arc = arc_from_apoapsis(1.0, 1.0);
    Setup s{build_grid(-*arc.t_apoapsis(), 0.0, segments, 1.5, SingularEnd::Right), FieldParams(1.0, 1.0, arc), {}, {}};
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-0.01, 0.01);
    for (double t : s.grid.nodes()) {
        const cplx z = std::polar(1.0, 0.75 * std::numbers::pi + 0.5 * std::numbers::pi * t);
        s.z.push_back(z);
        s.z2.push_back(z + cplx(u(rng), u(rng)));
    }
    return s;
}

Exec exec_of(const benchmark::State& state) { return state.range(1) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_Value(benchmark::State& state) {
    const Setup s = make(static_cast<int>(state.range(0)));
    const ActionFunctional f(s.grid, s.params, {exec_of(state), true});
    for (auto _ : state) benchmark::DoNotOptimize(f.value(s.z));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Difference(benchmark::State& state) {
    const Setup s = make(static_cast<int>(state.range(0)));
    const ActionFunctional f(s.grid, s.params, {exec_of(state), true});
    for (auto _ : state) benchmark::DoNotOptimize(f.difference(s.z, s.z2));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Gradient(benchmark::State& state) {
    const Setup s = make(static_cast<int>(state.range(0)));
    const ActionFunctional f(s.grid, s.params, {exec_of(state), true});
    for (auto _ : state) benchmark::DoNotOptimize(f.node_gradient(s.z));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Residual(benchmark::State& state) {
    const Setup s = make(static_cast<int>(state.range(0)));
    const ActionFunctional f(s.grid, s.params, {exec_of(state), true});
    for (auto _ : state) benchmark::DoNotOptimize(f.el_residual(s.z));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Minimize(benchmark::State& state) {
    const KeplerArc arc = arc_from_apoapsis(1.0, 1.0);
    ProblemConfig c{FieldParams(1.0, 1.0, arc), -*arc.t_apoapsis(), 0.0, Ray{0.75 * std::numbers::pi},
                    Ray{0.25 * std::numbers::pi}, MeshConfig{}, SolverConfig{}, InitConfig{}};
    c.mesh.segments = static_cast<int>(state.range(0));
    c.solver.exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(minimize(c).action);
}

void kernel_args(benchmark::internal::Benchmark* b) {
    for (long n : {1L << 10, 1L << 14, 1L << 18})
        for (long e : {0L, 1L}) b->Args({n, e});
    b->ArgNames({"N", "parallel"});
}

}  // namespace

BENCHMARK(BM_Value)->Apply(kernel_args);
BENCHMARK(BM_Difference)->Apply(kernel_args);
BENCHMARK(BM_Gradient)->Apply(kernel_args);
BENCHMARK(BM_Residual)->Apply(kernel_args);
BENCHMARK(BM_Minimize)->Args({4096, 0})->Args({4096, 1})->ArgNames({"N", "parallel"})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
