// Serial reference vs OpenMP kernels on the grid workloads.

#include <benchmark/benchmark.h>

#include "potlab/measure.hpp"

using namespace potlab;

namespace {

HarmonicTuple triple() { return HarmonicTuple::from_branches({Poly{0.0}, Poly{2.0, 1.0}, Poly{-0.5}}); }

Execution mode(const benchmark::State& st) { return st.range(1) ? Execution::parallel : Execution::serial; }

void BM_components(benchmark::State& st) {
  const HarmonicTuple H = triple();
  const Grid g = Grid::square(0.0, 0.2, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_components(H, g, mode(st)));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}

void BM_subharmonic(benchmark::State& st) {
  const HarmonicTuple H = triple();
  const Grid g = Grid::square(0.0, 0.2, static_cast<int>(st.range(0)));
  const auto F = max_configuration(H, {0, 1, 2}, g);
  for (auto _ : st) benchmark::DoNotOptimize(verify_subharmonic(F, mode(st)));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}

void BM_potential(benchmark::State& st) {
  auto f = [](cplx z) { return std::sqrt(4.0 + z.real()) / (kTwoPi * std::sqrt(-z.real())); };
  const Measure mu{{}, {gauss_jacobi_arc({-4.0, 0.0}, 64, 0.5, -0.5, f)}};
  const Grid g = Grid::square(cplx(-2, 0.0137), 10.0, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(potential_field(mu, g, mode(st)));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}

void BM_algebraic_components(benchmark::State& st) {
  const BivariatePolynomial P({Poly{-1.0}, Poly{0.0, 1.0}, Poly{0.0, 1.0}});
  const Grid g = Grid::square(3.0, 1.0, static_cast<int>(st.range(0)));
  // fresh tuple each time: frames are cached per tuple
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_components(HarmonicTuple(P, 2.0), g, mode(st)));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}

}  // namespace

BENCHMARK(BM_components)->ArgsProduct({{101, 401}, {0, 1}})->ArgNames({"n", "omp"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_subharmonic)->ArgsProduct({{101, 401}, {0, 1}})->ArgNames({"n", "omp"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_potential)->ArgsProduct({{101, 201}, {0, 1}})->ArgNames({"n", "omp"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_algebraic_components)->ArgsProduct({{21, 41}, {0, 1}})->ArgNames({"n", "omp"})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
