#include <random>

#include <benchmark/benchmark.h>

#include "rscca/experiments.h"
#include "rscca/robust_measures.h"
#include "rscca/scca.h"

namespace {

using namespace rscca;

VectorXd Normal(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  VectorXd x(n);
  for (Index i = 0; i < n; ++i) x[i] = normal(rng);
  return x;
}

void BM_Scale(benchmark::State& state, ScaleKind kind) {
  const VectorXd x = Normal(state.range(0), 1);
  ScaleSpec spec;
  spec.kind = kind;
  for (auto _ : state) benchmark::DoNotOptimize(Scale(x, spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK_CAPTURE(BM_Scale, mad, ScaleKind::kMad)->RangeMultiplier(4)->Range(100, 6400);
BENCHMARK_CAPTURE(BM_Scale, mscale, ScaleKind::kMScale)->RangeMultiplier(4)->Range(100, 6400);

void BM_Coassociation(benchmark::State& state, AssociationKind kind) {
  const VectorXd u = Normal(state.range(0), 2);
  const VectorXd v = 0.5 * u + Normal(state.range(0), 3);
  AssociationSpec spec;
  spec.kind = kind;
  for (auto _ : state) benchmark::DoNotOptimize(Coassociate(u, v, spec));
}
BENCHMARK_CAPTURE(BM_Coassociation, gk_bounded, AssociationKind::kGkBounded)->Arg(400)->Arg(1600);
BENCHMARK_CAPTURE(BM_Coassociation, m_scatter, AssociationKind::kMScatter)->Arg(400)->Arg(1600);
BENCHMARK_CAPTURE(BM_Coassociation, ogk, AssociationKind::kOgk)->Arg(400)->Arg(1600);

struct FitFixture {
  BasisSystem basis;
  MatrixXd sx;
  MatrixXd sy;
};

FitFixture MakeFixture(Index n, Index d) {
  const ProcessModel model = BuildModel(ModelConfig{});
  BasisSystem basis = BuildBasis(BasisKind::kFourier, d, model.basis().grid());
  const SamplePair s = SamplePairs(model, n, 7);
  MatrixXd sx = ProjectSample(s.x, basis);
  MatrixXd sy = ProjectSample(s.y, basis);
  return {std::move(basis), std::move(sx), std::move(sy)};
}

void BM_Objective(benchmark::State& state) {
  const FitFixture f = MakeFixture(state.range(0), 11);
  const ObjectiveContext ctx = MakeContext(f.sx, f.sy, f.basis, AssociationSpec{}, 0.1, 0.1);
  const VectorXd a = Normal(11, 4);
  const VectorXd b = Normal(11, 5);
  for (auto _ : state) benchmark::DoNotOptimize(Objective(a, b, ctx));
}
BENCHMARK(BM_Objective)->Arg(100)->Arg(400)->Arg(1600);

void BM_FitRobust(benchmark::State& state) {
  const FitFixture f = MakeFixture(state.range(0), 11);
  const ObjectiveContext ctx = MakeContext(f.sx, f.sy, f.basis, AssociationSpec{}, 0.1, 0.1);
  RobustOptions opt = StudyRobustOptions();
  opt.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(FitRobust(ctx, opt).lambda_hat);
}
BENCHMARK(BM_FitRobust)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_FitClassical(benchmark::State& state) {
  const FitFixture f = MakeFixture(state.range(0), 15);
  AssociationSpec spec;
  spec.kind = AssociationKind::kCovPearson;
  const ObjectiveContext ctx = MakeContext(f.sx, f.sy, f.basis, spec, 0.1, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(FitClassical(ctx).lambda_hat);
}
BENCHMARK(BM_FitClassical)->Arg(400)->Arg(1600);

}  // namespace

BENCHMARK_MAIN();
