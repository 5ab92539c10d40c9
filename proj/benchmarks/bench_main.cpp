#include <benchmark/benchmark.h>

#include <numbers>

#include "levyflow/algebra.hpp"
#include "levyflow/field.hpp"
#include "levyflow/heatflow.hpp"
#include "levyflow/levy.hpp"
#include "levyflow/path.hpp"
#include "levyflow/transport.hpp"

using namespace levyflow;

namespace {

const Torus& torus() {
  static const Torus t(2, 2 * std::numbers::pi);
  return t;
}

void BM_ExpmSu2(benchmark::State& state) {
  const LieElem x = su2(0.3, -0.8, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(expm(x));
}
BENCHMARK(BM_ExpmSu2);

void BM_ExpmRank4(benchmark::State& state) {
  Matrix m(4, 4);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = Complex(0.1 * r - 0.2 * c, 0.3 * (r + c));
  }
  const LieElem x = project_lie(m);
  for (auto _ : state) benchmark::DoNotOptimize(expm(x));
}
BENCHMARK(BM_ExpmRank4);

void BM_Transport(benchmark::State& state) {
  const GaugeField field = random_su2_field(torus(), 4, 0.3, 2, 1);
  const Curve curve = fourier_curve(torus(), 3, 0.2, 2);
  const double step = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(transport(field, curve, step));
}
BENCHMARK(BM_Transport)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_TransportLattice(benchmark::State& state) {
  const GaugeField field = sample_lattice(random_su2_field(torus(), 4, 0.3, 2, 1), 64);
  const Curve curve = fourier_curve(torus(), 3, 0.2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(transport(field, curve));
}
BENCHMARK(BM_TransportLattice)->Unit(benchmark::kMillisecond);

void BM_YmRhs(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const LatticeField lat = sample_lattice(random_su2_field(torus(), 4, 0.3, 2, 3), m);
  for (auto _ : state) benchmark::DoNotOptimize(ym_rhs(lat));
  state.SetItemsProcessed(state.iterations() * lat.num_sites());
}
BENCHMARK(BM_YmRhs)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SecondKernels(benchmark::State& state) {
  const GaugeField field = random_su2_field(torus(), 4, 0.3, 2, 1);
  const Curve curve = fourier_curve(torus(), 3, 0.2, 2);
  const TransportCache cache(field, curve);
  for (auto _ : state) benchmark::DoNotOptimize(second_kernels(cache));
}
BENCHMARK(BM_SecondKernels)->Unit(benchmark::kMillisecond);

void BM_LevyLaplacian(benchmark::State& state) {
  const GaugeField field = random_su2_field(torus(), 4, 0.3, 2, 1);
  const Curve curve = fourier_curve(torus(), 3, 0.2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(levy_laplacian_transport(field, curve));
}
BENCHMARK(BM_LevyLaplacian)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
