#include <benchmark/benchmark.h>

#include "mconn/flows.hpp"
#include "mconn/geometry.hpp"
#include "mconn/lagrange.hpp"
#include "mconn/sampling.hpp"

namespace {

using namespace mconn;

GLMetricField bench_metric(int n, SampleRng& rng) {
  std::vector<Expr> upper;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Expr e = Expr::constant(n, i == j ? 2.0 : 0.0);
      for (int t = 0; t < 2; ++t)
        e = e + rng.uniform(-0.05, 0.05) * Expr::coordinate(n, rng.uniform_int(0, 2 * n - 1)) *
                    Expr::coordinate(n, rng.uniform_int(0, 2 * n - 1));
      upper.push_back(e);
    }
  return GLMetricField(n, std::move(upper));
}

SemisprayField bench_spray(int n, SampleRng& rng) {
  std::vector<Expr> coeffs;
  for (int i = 0; i < n; ++i) {
    Expr e = Expr::constant(n, 0.0);
    for (int t = 0; t < 3; ++t)
      e = e + rng.uniform(-0.4, 0.4) * Expr::coordinate(n, rng.uniform_int(0, 2 * n - 1)) *
                  Expr::coordinate(n, rng.uniform_int(0, 2 * n - 1));
    coeffs.push_back(e);
  }
  return SemisprayField(n, std::move(coeffs));
}

void BM_MetricConnection(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SampleRng rng(7);
  const GLMetricField g = bench_metric(n, rng);
  const SemisprayField G = bench_spray(n, rng);
  const auto points = sample_points(Box::cube(n, -1.0, 1.0), 64, rng);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(metric_connection(G, g, points[k++ % points.size()]));
  }
}
BENCHMARK(BM_MetricConnection)->Arg(1)->Arg(2)->Arg(3);

void BM_UniqueConnection(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Expr L;
  for (int i = 1; i <= n; ++i) {
    const Expr term = (2.0 + 0.1 * Expr::base(n, 1)) * Expr::fiber(n, i) * Expr::fiber(n, i);
    L = L.empty() ? term : L + term;
  }
  const LagrangeSpace space(n, L);
  SampleRng rng(8);
  const auto points = sample_points(Box::cube(n, -1.0, 1.0), 64, rng);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(space.unique_connection(points[k++ % points.size()]));
  }
}
BENCHMARK(BM_UniqueConnection)->Arg(1)->Arg(2)->Arg(3);

void BM_PoincareOrbit(benchmark::State& state) {
  const LagrangeSpace p(2, parse_expression("(y1^2 + y2^2) / (x2^2)", 2));
  const Point start{{0, 1}, {1, 0}};
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_sode(p.canonic_spray_field(), start, 1e-3, steps));
  }
}
BENCHMARK(BM_PoincareOrbit)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
