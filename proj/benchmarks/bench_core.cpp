#include <benchmark/benchmark.h>

#include "sliplab/cell_problem.hpp"
#include "sliplab/energetics.hpp"
#include "sliplab/microstructure.hpp"
#include "sliplab/rank_one.hpp"

using namespace sliplab;

namespace {

const SlipSystem kDiag = make_slip_system({1, 1});
const RectDomain kUnit{0, 1, 0, 1};

void BM_classify_rank_one(benchmark::State& state) {
    const MsElement F{Rotation{M_PI / 2}, 2.0};
    const MsElement G{Rotation{0.0}, 0.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(classify_rank_one(F, G, kDiag));
    }
}
BENCHMARK(BM_classify_rank_one);

void BM_laminate_decompose(benchmark::State& state) {
    const Mat2 N = n_from_gamma(Rotation{0.2}, -0.5, 0.5, kDiag);
    for (auto _ : state) {
        benchmark::DoNotOptimize(laminate_decompose_ns(N, kDiag));
    }
}
BENCHMARK(BM_laminate_decompose);

void BM_build_nested_laminate(benchmark::State& state) {
    const LayerGeometry geom{0.5, 0.125};
    const double h = geom.epsilon / static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            build_nested_laminate(-0.5, Rotation{0}, kDiag, geom, h, kUnit));
    }
    state.SetLabel("h = eps/" + std::to_string(state.range(0)));
}
BENCHMARK(BM_build_nested_laminate)->Arg(16)->Arg(64);

void BM_energy_eps(benchmark::State& state) {
    const LayerGeometry geom{0.5, 0.125};
    const auto field = build_nested_laminate(-0.5, Rotation{0}, kDiag, geom, 0.125 / 16, kUnit);
    for (auto _ : state) {
        benchmark::DoNotOptimize(energy_eps(field, kDiag, geom));
    }
}
BENCHMARK(BM_energy_eps);

void BM_rasterize(benchmark::State& state) {
    const LayerGeometry geom{0.5, 0.125};
    const auto field = build_nested_laminate(-0.5, Rotation{0}, kDiag, geom, 0.125 / 16, kUnit);
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(rasterize_gradient(field, n, n));
    }
}
BENCHMARK(BM_rasterize)->Arg(64)->Arg(256);

void BM_w_cell_ansatz(benchmark::State& state) {
    const Mat2 F = Mat2::identity() - 0.5 * outer({1, 0}, {0, 1});
    for (auto _ : state) {
        benchmark::DoNotOptimize(w_cell_ansatz(F, kDiag, 0.5, 0.0, 64));
    }
}
BENCHMARK(BM_w_cell_ansatz);

}  // namespace

BENCHMARK_MAIN();
