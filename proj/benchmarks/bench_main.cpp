#include <benchmark/benchmark.h>

#include <random>

#include "equilex/builder.hpp"
#include "equilex/matrix_gate.hpp"
#include "equilex/newton.hpp"
#include "equilex/norm_oracle.hpp"

using namespace equilex;

namespace {

Point random_point(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Point p(dim);
  for (double& v : p.coords()) v = nd(rng);
  return p;
}

void BM_LpNorm(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const NormOracle o = NormOracle::lp(3.0, dim);
  const Point x = random_point(dim, 1);
  for (auto _ : state) benchmark::DoNotOptimize(norm(o, x));
}
BENCHMARK(BM_LpNorm)->Arg(64)->Arg(1024);

void BM_LpDuality(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const NormOracle o = NormOracle::lp(3.0, dim);
  const Point x = random_point(dim, 2);
  for (auto _ : state) benchmark::DoNotOptimize(support_functional(o, x));
}
BENCHMARK(BM_LpDuality)->Arg(64)->Arg(1024);

void BM_BlendedDuality(benchmark::State& state) {
  const NormOracle o = NormOracle::blended(4.0, 64);
  const Point x = random_point(64, 3);
  for (auto _ : state) benchmark::DoNotOptimize(support_functional(o, x));
}
BENCHMARK(BM_BlendedDuality);

void BM_GuardCheck(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(n).normalized();
  DifferentiableMap g;
  g.dim = static_cast<std::size_t>(n);
  g.domain_radius = 1.0;
  g.eval = [u](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return x + 0.1 * x.squaredNorm() * u;
  };
  g.jacobian = [u, n](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return Eigen::MatrixXd::Identity(n, n) + 0.2 * u * x.transpose();
  };
  for (auto _ : state) benchmark::DoNotOptimize(guard_check(g, 0.1, 200, 5));
}
BENCHMARK(BM_GuardCheck)->Arg(2)->Arg(9);

void BM_VerifySchedule(benchmark::State& state) {
  const EpsSchedule s = eps_schedule(0.05, 8);
  for (auto _ : state) benchmark::DoNotOptimize(verify_schedule(s, 100, 3));
}
BENCHMARK(BM_VerifySchedule);

void BM_BuildPerturbedL2(benchmark::State& state) {
  const NormOracle o = NormOracle::lp(2.0, 64);
  const SequenceSource src = SequenceSource::perturbed_basis(64, 0.5);
  BuilderOptions opt;
  opt.n_points = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build(o, src, TailPolicy{40, 5, 1e-8}, opt));
}
BENCHMARK(BM_BuildPerturbedL2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
