#include <cmath>

#include <benchmark/benchmark.h>

#include "streampca/bootstrap.hpp"
#include "streampca/model.hpp"
#include "streampca/oja.hpp"

using namespace streampca;

static void BM_OjaStep(benchmark::State& state) {
  const std::size_t d = state.range(0);
  const SpectralModel m = spectral_decompose(KernelScaledCovariance{d});
  RngStream rng(1, {1});
  const Vector x = sample_x(m, rng);
  auto s = OjaState::init(Vector(d, 1.0), 1.0, std::size_t{1} << 40);
  for (auto _ : state) {
    s.step(x);
    benchmark::DoNotOptimize(s.w());
  }
}
BENCHMARK(BM_OjaStep)->Arg(20)->Arg(100)->Arg(500);

static void BM_SampleX(benchmark::State& state) {
  const std::size_t d = state.range(0);
  const SpectralModel m = spectral_decompose(KernelScaledCovariance{d});
  RngStream rng(2, {1});
  Vector x(d), scratch(d);
  for (auto _ : state) {
    sample_x(m, rng, x, scratch);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_SampleX)->Arg(20)->Arg(100);

static void BM_Eigh(benchmark::State& state) {
  const SymMatrix s = build_kernel_covariance(state.range(0), 0.01, 1.0, 5.0);
  for (auto _ : state) benchmark::DoNotOptimize(eigh(s));
}
BENCHMARK(BM_Eigh)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_BootstrapStep(benchmark::State& state) {
  const std::size_t d = state.range(0), m = state.range(1);
  const SpectralModel model = spectral_decompose(KernelScaledCovariance{d});
  RngStream rng(3, {1});
  const Vector a = sample_x(model, rng), b = sample_x(model, rng);
  const GaussianMultipliers w(4, {4});
  auto e = BootstrapEnsemble::init(Vector(d, 1.0), m, 1.0, std::size_t{1} << 40);
  bool flip = false;
  for (auto _ : state) {
    e.step(flip ? a : b, w);
    flip = !flip;
  }
  state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_BootstrapStep)->Args({100, 300});

BENCHMARK_MAIN();
