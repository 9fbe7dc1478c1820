#include <benchmark/benchmark.h>

#include <cmath>

#include "phaselab/almost_diag.hpp"
#include "phaselab/corpus.hpp"
#include "phaselab/estimates.hpp"
#include "phaselab/propagator.hpp"

using namespace phaselab;

namespace {

Grid benchGrid(int points) { return Grid(1, 12.0, points); }

}  // namespace

static void BM_StftForward(benchmark::State& state) {
  const Grid g = benchGrid(static_cast<int>(state.range(0)));
  const Window w = Window::gaussian(g);
  const StftPlan plan(w, defaultLattice(g));
  const SampledFunction f = TestCorpus(g, 1)[0];
  for (auto _ : state) benchmark::DoNotOptimize(plan.values(f));
}
BENCHMARK(BM_StftForward)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_StftRoundTrip(benchmark::State& state) {
  const Grid g = benchGrid(static_cast<int>(state.range(0)));
  const Window w = Window::gaussian(g);
  const PhaseLattice lat = defaultLattice(g);
  const SampledFunction f = TestCorpus(g, 1)[3];
  for (auto _ : state) benchmark::DoNotOptimize(stftInverse(stft(f, w, lat), w));
}
BENCHMARK(BM_StftRoundTrip)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_WeylQuantize(benchmark::State& state) {
  const Grid g = benchGrid(static_cast<int>(state.range(0)));
  const PhaseSymbol a = PhaseSymbol::sinXsinXi();
  for (auto _ : state) benchmark::DoNotOptimize(weylQuantize(a, g).matrix());
}
BENCHMARK(BM_WeylQuantize)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_UnitaryGroupBuild(benchmark::State& state) {
  const Grid g = benchGrid(static_cast<int>(state.range(0)));
  const WeylOperator H = weylQuantize(
      PhaseSymbol::quadratic(QuadraticHamiltonian::harmonicOscillator(1)) + PhaseSymbol::cosX(), g);
  for (auto _ : state) benchmark::DoNotOptimize(UnitaryGroup(H).eigenvalues());
}
BENCHMARK(BM_UnitaryGroupBuild)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_FreePropagatorApply(benchmark::State& state) {
  const Grid g = benchGrid(static_cast<int>(state.range(0)));
  const Propagator U = freePropagator(1.0, g);
  const SampledFunction f = TestCorpus(g, 1)[0];
  for (auto _ : state) benchmark::DoNotOptimize(U.apply(f));
}
BENCHMARK(BM_FreePropagatorApply)->Arg(256)->Arg(2048);

static void BM_GaborMatrix(benchmark::State& state) {
  const Grid g(1, 18.0, 256);
  const Window w = Window::gaussian(g);
  const UnitaryGroup group(weylQuantize(PhaseSymbol::quadratic(QuadraticHamiltonian::harmonicOscillator(1)), g));
  const LinearMap U = group.at(1.0).asMap();
  const double radius = static_cast<double>(state.range(0));
  const PhaseLattice zLat = PhaseLattice::symmetric(1, 0.5, 0.5, radius, radius);
  const PhaseLattice wLat = PhaseLattice::symmetric(1, 0.5, 0.5, 11.0, 11.0);
  const FlowMap flow = linearFlow(quadraticFlow(QuadraticHamiltonian::harmonicOscillator(1), 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(gaborMatrix(U, w, zLat, wLat, flow).values);
}
BENCHMARK(BM_GaborMatrix)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_RestrictionRatioCorpus(benchmark::State& state) {
  const Grid g = benchGrid(256);
  const TestCorpus corpus(g, 1);
  const LinearMap U = freePropagator(1.0, g).asMap();
  const Cutoff phi = gaussianCutoff(2.0);
  for (auto _ : state) {
    double best = 0.0;
    for (const auto& f : corpus.functions()) best = std::max(best, restrictionRatio(U, f, phi, 1.0));
    benchmark::DoNotOptimize(best);
  }
}
BENCHMARK(BM_RestrictionRatioCorpus)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
