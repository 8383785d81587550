#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "ddestab/chart.hpp"
#include "ddestab/criteria.hpp"
#include "ddestab/hemato.hpp"
#include "ddestab/simulator.hpp"
#include "ddestab/spectrum.hpp"

using namespace ddestab;

namespace {

const DelayDistribution kFig1(DiscreteAtoms({{0.8, 0.625}, {0.2, 3.5}}));

HematoModel fig3_model(double r, double h) {
  HematoModel m;
  m.alpha = 1.0;
  m.k0 = 2.0;
  m.r = r;
  m.h = h;
  m.lineages = {{0.3, 2, 2.0}, {0.4, 20, 10.0}, {0.3, 60, 20.0}};
  return m;
}

void BM_tangency_constants(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(constants_c_thetac());
}
BENCHMARK(BM_tangency_constants);

void BM_fig1_crossing(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(c_crossings(kFig1, 0.5, std::sqrt(0.75)));
}
BENCHMARK(BM_fig1_crossing);

void BM_fig1_chord(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(extremal_given_u(-0.5, 0.9969, 0.5192));
}
BENCHMARK(BM_fig1_chord);

void BM_rightmost_single(benchmark::State& st) {
  const CharacteristicProblem p(0.0, 1.0, DelayDistribution::single(std::numbers::pi / 2));
  for (auto _ : st) benchmark::DoNotOptimize(rightmost_root(p));
}
BENCHMARK(BM_rightmost_single);

void BM_rightmost_atoms(benchmark::State& st) {
  const CharacteristicProblem p(-0.5, 1.0, kFig1);
  for (auto _ : st) benchmark::DoNotOptimize(rightmost_root(p));
}
BENCHMARK(BM_rightmost_atoms);

void BM_rightmost_fig3_chain(benchmark::State& st) {
  const auto m = fig3_model(1.0, 1.9);
  const CharacteristicProblem p(0.0, 0.95, DelayDistribution(m.mixture()));
  for (auto _ : st) benchmark::DoNotOptimize(rightmost_root(p));
}
BENCHMARK(BM_rightmost_fig3_chain);

void BM_classify_fig1(benchmark::State& st) {
  const CharacteristicProblem p(0.0, 1.6, kFig1);
  for (auto _ : st) benchmark::DoNotOptimize(classify(p));
}
BENCHMARK(BM_classify_fig1);

void BM_chart(benchmark::State& st) {
  ChartJob job;
  job.na = job.nb = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(compute_chart(kFig1, job));
}
BENCHMARK(BM_chart)->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);

void BM_simulate_linear_mixture(benchmark::State& st) {
  const GammaMixture mix({{0.6, GammaKernel(3, 2.0)}, {0.4, GammaKernel(5, 4.0)}});
  const CharacteristicProblem p(0.5, 1.0, DelayDistribution(mix));
  for (auto _ : st) benchmark::DoNotOptimize(simulate_linear(p, HistorySpec::constant(1.0), 100.0, 0.01));
}
BENCHMARK(BM_simulate_linear_mixture)->Unit(benchmark::kMillisecond);

void BM_simulate_hemato(benchmark::State& st) {
  const auto m = fig3_model(1.0, 1.9);
  const auto mode = st.range(0) ? DelayMode::distributed_chain : DelayMode::discrete_at_mean;
  SimOptions opts;
  opts.stride = 200;
  for (auto _ : st) {
    benchmark::DoNotOptimize(simulate_hemato(m, HistorySpec::constant(1.05), 10.0, hemato_max_step(m), mode, opts));
  }
}
BENCHMARK(BM_simulate_hemato)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
