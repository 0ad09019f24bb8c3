// Serial reference kernels against their OpenMP versions.
// Run with STICKY_SPECTRA_THREADS=<n> to pin the thread count.

#include "sticky/assembly.hpp"
#include "sticky/cheeger.hpp"
#include "sticky/disk.hpp"
#include "sticky/harness.hpp"
#include "sticky/mesh_generators.hpp"
#include "sticky/parallel.hpp"

#include <benchmark/benchmark.h>

using namespace sticky;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) ? "openmp" : "serial"); }

void BM_BulkStiffness(benchmark::State& state) {
    const auto mesh = with_random_weights(generate_disk_mesh(6, Geometry::Hyperbolic), 1);
    AssemblyOptions options;
    options.execution = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_bulk_stiffness(mesh, options));
    label(state);
}

void BM_BulkMass(benchmark::State& state) {
    const auto mesh = with_random_weights(generate_disk_mesh(6, Geometry::Hyperbolic), 1);
    AssemblyOptions options;
    options.execution = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_bulk_mass(mesh, options));
    label(state);
}

void BM_SubsetMeasureTable(benchmark::State& state) {
    const auto mesh = with_random_weights(generate_small_disk(18, Geometry::Euclidean), 2);
    for (auto _ : state) benchmark::DoNotOptimize(SubsetMeasureTable(mesh, mode(state)).size());
    label(state);
}

void BM_BruteForceHC(benchmark::State& state) {
    const auto mesh = with_random_weights(generate_small_disk(18, Geometry::Euclidean), 2);
    const SubsetMeasureTable table(mesh);
    for (auto _ : state)
        benchmark::DoNotOptimize(brute_force_constant(table, ConstantKind::HC, RestrictionVariant::Combined, 1.0, mode(state)));
    label(state);
}

void BM_TripleConstant(benchmark::State& state) {
    const auto mesh = with_random_weights(generate_small_disk(14, Geometry::Euclidean), 3);
    const SubsetMeasureTable table(mesh);
    for (auto _ : state)
        benchmark::DoNotOptimize(brute_force_constant(table, ConstantKind::HD, RestrictionVariant::Combined, 1.0, mode(state)));
    label(state);
}

void BM_DiskRows(benchmark::State& state) {
    const auto alphas = alpha_grid();
    for (auto _ : state) benchmark::DoNotOptimize(disk_rows(Geometry::Hyperbolic, alphas, {0.0}, -1, mode(state)));
    label(state);
}

}  // namespace

BENCHMARK(BM_BulkStiffness)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BulkMass)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SubsetMeasureTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceHC)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TripleConstant)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiskRows)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(1);

int main(int argc, char** argv) {
    configure_threads_from_env();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
