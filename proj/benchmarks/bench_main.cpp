#include <benchmark/benchmark.h>

#include <cmath>

#include "jumpstab/jumpstab.hpp"

using namespace jumpstab;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

CoupledJumpDiffusion coupled_system() {
  SystemSpec spec;
  spec.dims = {1, 1, 1, 1, 0, 1};
  spec.drift1 = DriftField({1, 1}, [](const Vec& x1, const Vec& x2) { return Vec(-x1 + x2); });
  spec.diff1 = DiffusionField({1, 1}, [](const Vec&, const Vec&) { return Mat::Constant(1, 1, 0.5); });
  spec.drift2 = DriftField({1, 1}, [](const Vec& x1, const Vec& x2) { return Vec(x2 * (x1[0] - 1.0)); });
  spec.diff2 = DiffusionField({1, 1}, [](const Vec&, const Vec& x2) { return Mat(0.3 * x2); });
  spec.jump2 = JumpField({1, 1}, [](const Vec&, const Vec& x2, const Vec& m) { return Vec(m[0] * x2); });
  spec.levy2 = LevyMeasure::scalar({{-0.3, 0.5}});
  return CoupledJumpDiffusion(std::move(spec));
}

IntegratorConfig bench_config(double horizon) {
  IntegratorConfig cfg;
  cfg.dt = 1e-3;
  cfg.horizon = horizon;
  cfg.master_seed = 1;
  cfg.record_stride = 1000;
  cfg.threads = 1;
  return cfg;
}

}  // namespace

static void BM_IntegratorSteps(benchmark::State& state) {
  const auto sys = coupled_system();
  const auto cfg = bench_config(10.0);
  std::uint64_t path = 0;
  for (auto _ : state) {
    auto p = simulate_path(sys, v1(0.5), v1(1e-3), cfg, path++);
    benchmark::DoNotOptimize(p);
  }
  state.SetItemsProcessed(state.iterations() * cfg.steps());
}
BENCHMARK(BM_IntegratorSteps);

static void BM_ApplyGenerator(benchmark::State& state) {
  const auto sys = coupled_system();
  const ScalarField g{[](const Vec& z) { return std::log1p(z.squaredNorm()); }, {}, {}};
  Vec z(2);
  z << 0.4, 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(apply_generator(sys, g, z));
}
BENCHMARK(BM_ApplyGenerator);

static void BM_SphereOccupation(benchmark::State& state) {
  Mat B(2, 2);
  B << -1.0, -1.0, 1.0, -0.5;
  const Mat S = 0.3 * Mat::Identity(2, 2);
  LinearizedCoefficients lin;
  lin.l1 = 0;
  lin.l2 = 2;
  lin.B2 = [B](const Vec&) { return B; };
  lin.Sigma2 = {[S](const Vec&) { return S; }};
  Vec theta(2);
  theta << 1.0, 0.0;
  const auto cfg = bench_config(10.0);
  for (auto _ : state) {
    auto occ = sphere_occupation(lin, {}, nullptr, Vec(0), theta, cfg, 1);
    benchmark::DoNotOptimize(occ);
  }
  state.SetItemsProcessed(state.iterations() * cfg.steps());
}
BENCHMARK(BM_SphereOccupation);

static void BM_ConsensusNetwork(benchmark::State& state) {
  const int followers = static_cast<int>(state.range(0));
  IntMat a = IntMat::Zero(followers + 1, followers + 1);
  for (int i = 1; i <= followers; ++i) a(i, i - 1) = 1;
  for (int i = 2; i <= followers; ++i) a(i - 1, i) = 1;
  const auto g = laplacian_from_adjacency(a);
  const ConsensusProtocol p{Mat::Identity(1, 1), Mat::Identity(1, 1)};
  const auto noise = NoiseModel::uniform(followers, 0.1);
  const AgentDrift f = [](const Vec& x) { return Vec(-x); };
  const auto cfg = bench_config(1.0);
  for (auto _ : state) {
    auto path = simulate_network(g, p, noise, f, v1(0.0), Vec::Constant(followers, 1.0), cfg, 0);
    benchmark::DoNotOptimize(path);
  }
  state.SetItemsProcessed(state.iterations() * cfg.steps());
}
BENCHMARK(BM_ConsensusNetwork)->Arg(4)->Arg(16);
