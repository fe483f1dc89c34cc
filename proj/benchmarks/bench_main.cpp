#include <benchmark/benchmark.h>

#include "lklab/experiments.hpp"
#include "lklab/fields.hpp"
#include "lklab/flow.hpp"
#include "lklab/godbillon.hpp"
#include "lklab/hodge.hpp"
#include "lklab/linking.hpp"
#include "lklab/models.hpp"
#include "lklab/parallel.hpp"
#include "lklab/shortpaths.hpp"

using namespace lklab;

namespace {

Point start(const Manifold& M) {
  auto rng = stream_rng(7, 0);
  return M.sample_uniform(rng);
}

void BM_HopfTrajectory(benchmark::State& state) {
  Manifold M = Manifold::sphere3xsphere3();
  VectorField X = hopf_pair_field(3.0, 1.0);
  Point x0 = start(M);
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(integrate(M, X, x0, t));
}
BENCHMARK(BM_HopfTrajectory)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_AsymptoticLk(benchmark::State& state) {
  Manifold M = Manifold::sphere3xsphere3();
  VectorField X = hopf_pair_field(1.0, 0.0);
  PhaseChain chain = models::s3xs3_chain();
  ShortPathSystem geo = ShortPathSystem::geodesic(M);
  Point x0 = start(M);
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(asymptotic_lk(M, X, x0, chain, geo, t));
}
BENCHMARK(BM_AsymptoticLk)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Fundl(benchmark::State& state) {
  std::mt19937_64 rng(1);
  auto a = hodge::FourierForm::random(3, 1, static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(hodge::fundl_residual(a));
}
BENCHMARK(BM_Fundl)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_GodbillonEvaluate(benchmark::State& state) {
  auto fam = godbillon::FoliationFamily::from_json(experiments::find("gv-family").params[0].default_value);
  auto probes = godbillon::family_probes(fam, 64, 3);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(godbillon::evaluate(fam, probes[i++ % probes.size()].x, 0.7));
}
BENCHMARK(BM_GodbillonEvaluate)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
