#include <benchmark/benchmark.h>

#include "nlmf/operators.hpp"
#include "nlmf/solver.hpp"
#include "nlmf/verify.hpp"

using namespace nlmf;

namespace {

struct Fixture {
    PointCloud cloud;
    std::vector<Neighborhood> nbhds;
    KernelSpec spec;
    ReproducingSpace space;

    Fixture(int n_side, double dh_ratio, double s, ReproducingMode mode, int order)
        : cloud(build_uniform_grid(Rect{0, 0, 1, 1}, 1.0 / n_side, dh_ratio / n_side)),
          nbhds(build_neighborhoods(cloud, dh_ratio / n_side)),
          spec(KernelSpec::make(dh_ratio / n_side, s)),
          space(build_basis(order, spec, mode)) {}
};

void BM_WeightGenerationScalar(benchmark::State& state) {
    const Fixture fx(static_cast<int>(state.range(0)), 3.5, 0.0,
                     ReproducingMode::DiffusionScalar, 2);
    for (auto _ : state) {
        auto families = generate_all_weights(fx.cloud, fx.nbhds, fx.space, fx.spec);
        benchmark::DoNotOptimize(families);
    }
    state.SetItemsProcessed(state.iterations() * fx.nbhds.size());
}
BENCHMARK(BM_WeightGenerationScalar)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_WeightGenerationTensor(benchmark::State& state) {
    const Fixture fx(static_cast<int>(state.range(0)), 3.5, 1.0,
                     ReproducingMode::PeridynamicTensor, 3);
    for (auto _ : state) {
        auto families = generate_all_weights(fx.cloud, fx.nbhds, fx.space, fx.spec);
        benchmark::DoNotOptimize(families);
    }
    state.SetItemsProcessed(state.iterations() * fx.nbhds.size());
}
BENCHMARK(BM_WeightGenerationTensor)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_DiffusionApply(benchmark::State& state) {
    const Fixture fx(static_cast<int>(state.range(0)), 3.5, 0.0,
                     ReproducingMode::DiffusionScalar, 2);
    const auto weights = generate_all_weights(fx.cloud, fx.nbhds, fx.space, fx.spec);
    const NonlocalOperator op =
        assemble_diffusion(fx.cloud, fx.nbhds, weights, constant_coefficient(1.0), fx.spec);
    ScalarField u(fx.cloud.size());
    for (int i = 0; i < fx.cloud.size(); ++i)
        u[i] = fx.cloud.points[i].x * fx.cloud.points[i].y;
    ScalarField out;
    for (auto _ : state) {
        op.apply(u, out);
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(state.iterations() * op.rows());
}
BENCHMARK(BM_DiffusionApply)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_StaticSolve(benchmark::State& state) {
    const ManufacturedCase mcase = case_example2();
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto row = run_static_case(mcase, n, 3.5 / n, 2);
        benchmark::DoNotOptimize(row);
    }
}
BENCHMARK(BM_StaticSolve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
