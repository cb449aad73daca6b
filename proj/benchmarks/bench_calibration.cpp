#include <benchmark/benchmark.h>

#include <vector>

#include "magyc/ellipsoid_fit.hpp"
#include "magyc/model.hpp"
#include "magyc/preprocess.hpp"
#include "magyc/sim.hpp"
#include "magyc/solver.hpp"

using namespace magyc;

namespace {

std::vector<ProcessedSample> wam_stream() {
    static const std::vector<ProcessedSample> processed = [] {
        const SimulationTruth truth = SimulationTruth::reference();
        const Dataset ds = synthesize(profile_for(MotionKind::WAM, 1), truth, 2);
        return preprocess(ds.samples, {.window = 25});
    }();
    return processed;
}

}  // namespace

static void ResidualJacobian(benchmark::State& state) {
    const auto processed = wam_stream();
    const CalibrationState x = SimulationTruth::reference().to_state();
    std::size_t i = 0;
    for (auto _ : state) {
        const auto jac = residual_jacobian(x, processed[i % processed.size()]);
        benchmark::DoNotOptimize(jac);
        ++i;
    }
}
BENCHMARK(ResidualJacobian);

static void GraphAccumulate(benchmark::State& state) {
    const auto processed = wam_stream();
    const auto graph = build_graph(processed, NoiseModel{}, SolverConfig{});
    const CalibrationState x = CalibrationState::identity();
    Mat12 h;
    Vec12 g;
    double cost;
    for (auto _ : state) {
        graph.accumulate(x, h, g, cost);
        benchmark::DoNotOptimize(cost);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(graph.size()));
}
BENCHMARK(GraphAccumulate);

static void BatchSolve(benchmark::State& state) {
    const auto processed = wam_stream();
    const SolverConfig cfg;
    const auto graph = build_graph(processed, NoiseModel{}, cfg);
    for (auto _ : state) {
        const auto result = optimize_batch(graph, cfg);
        benchmark::DoNotOptimize(result.final_cost);
    }
}
BENCHMARK(BatchSolve)->Unit(benchmark::kMillisecond);

static void IncrementalStream(benchmark::State& state) {
    const auto processed = wam_stream();
    const SolverConfig cfg;
    for (auto _ : state) {
        const auto result = optimize_incremental(processed, NoiseModel{}, cfg);
        benchmark::DoNotOptimize(result.final_cost);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(processed.size()));
}
BENCHMARK(IncrementalStream)->Unit(benchmark::kMillisecond);

static void EllipsoidFit(benchmark::State& state) {
    const SimulationTruth truth = SimulationTruth::reference();
    const Dataset ds = synthesize(profile_for(MotionKind::WAM, 7), truth, 8);
    std::vector<Vec3> mags;
    mags.reserve(ds.samples.size());
    for (const auto& s : ds.samples) mags.push_back(s.m);
    for (auto _ : state) {
        const auto fit = ellipsoid_fit(mags);
        benchmark::DoNotOptimize(fit.algebraic_residual);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mags.size()));
}
BENCHMARK(EllipsoidFit)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
