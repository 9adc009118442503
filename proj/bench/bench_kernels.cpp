// Serial reference vs parallel kernels: torus symbol tabulation and the
// Brillouin-zone marginal used by window studies.

#include <benchmark/benchmark.h>

#include <cmath>

#include "frd/kernels.hpp"
#include "frd/walk.hpp"

namespace {

// A block symbol integrated over a small fixed s set, so each λ costs about
// as much as a real spectral integrand with a few hundred nodes.
frd::SymbolFn block_family(int d) {
  return [d](double lambda, double* out) {
    double v = 0.0;
    for (int i = 0; i < 256; ++i) v += frd::block_symbol(lambda, std::exp(-12.0 + 0.05 * i), 9, 81, d);
    out[0] = v;
  };
}

void BM_TabulateSerial(benchmark::State& st) {
  const frd::TorusSpec spec(2, 3, static_cast<int>(st.range(0)));
  const auto fn = block_family(2);
  for (auto _ : st) benchmark::DoNotOptimize(frd::tabulate_symbols_serial(spec, fn, 1));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(spec.volume()));
}

void BM_TabulateParallel(benchmark::State& st) {
  const frd::TorusSpec spec(2, 3, static_cast<int>(st.range(0)));
  const auto fn = block_family(2);
  for (auto _ : st) benchmark::DoNotOptimize(frd::tabulate_symbols(spec, fn, 1));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(spec.volume()));
}

const frd::RadialSymbolTable& table() {
  static const frd::RadialSymbolTable t(
      [](double lambda, double* out) {
        out[0] = std::exp(-lambda);
        out[1] = lambda * std::exp(-lambda);
      },
      2, 12.0, 8192);
  return t;
}

void BM_MarginalSerial(benchmark::State& st) {
  const frd::MidpointGrid grid(static_cast<int>(st.range(0)), 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(frd::window_marginal_serial(grid, table(), 3));
}

void BM_MarginalParallel(benchmark::State& st) {
  const frd::MidpointGrid grid(static_cast<int>(st.range(0)), 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(frd::window_marginal(grid, table(), 3));
}

}  // namespace

BENCHMARK(BM_TabulateSerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TabulateParallel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MarginalSerial)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MarginalParallel)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
