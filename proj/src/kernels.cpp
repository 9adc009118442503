#include "frd/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include "frd/walk.hpp"

namespace frd {

int worker_count() { return omp_get_max_threads(); }

void set_worker_count(int n) {
  if (n < 1) throw std::invalid_argument("worker count must be >= 1");
  omp_set_num_threads(n);
}

namespace {

// Canonical orbit representatives: sorted tuples 0 <= a_1 <= ... <= a_d <= half.
std::vector<std::vector<long>> orbits(int d, long half) {
  std::vector<std::vector<long>> out;
  std::vector<long> a(d, 0);
  while (true) {
    out.push_back(a);
    int k = d - 1;
    while (k >= 0 && a[k] == half) --k;
    if (k < 0) break;
    ++a[k];
    for (int m = k + 1; m < d; ++m) a[m] = a[k];
  }
  return out;
}

std::size_t dense_key(std::span<const long> sorted, long half) {
  std::size_t key = 0;
  for (long v : sorted) key = key * static_cast<std::size_t>(half + 1) + static_cast<std::size_t>(v);
  return key;
}

}  // namespace

std::size_t orbit_count(const TorusSpec& spec) { return orbits(spec.d(), spec.half()).size(); }

SymbolTables tabulate_symbols(const TorusSpec& spec, const SymbolFn& fn, int channels) {
  const int d = spec.d();
  const long half = spec.half();
  const auto reps = orbits(d, half);
  double dense = 1.0;
  for (int k = 0; k < d; ++k) dense *= static_cast<double>(half + 1);
  if (dense > static_cast<double>(1u << 27)) throw std::invalid_argument("torus too large for orbit tabulation");

  std::vector<double> orbit_values(reps.size() * static_cast<std::size_t>(channels));
  const long n = static_cast<long>(reps.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (long r = 0; r < n; ++r) {
    const double lam = laplacian_symbol_q(reps[r], spec.side());
    fn(lam, orbit_values.data() + static_cast<std::size_t>(r) * channels);
  }

  std::vector<int> key_to_orbit(static_cast<std::size_t>(dense), -1);
  for (std::size_t r = 0; r < reps.size(); ++r) key_to_orbit[dense_key(reps[r], half)] = static_cast<int>(r);

  SymbolTables out(channels, std::vector<double>(spec.volume()));
  const long V = static_cast<long>(spec.volume());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < V; ++i) {
    Coord q = spec.coords(static_cast<std::size_t>(i));
    for (long& v : q) v = std::abs(v);
    std::sort(q.begin(), q.end());
    const std::size_t r = static_cast<std::size_t>(key_to_orbit[dense_key(q, half)]);
    for (int c = 0; c < channels; ++c) out[c][i] = orbit_values[r * channels + c];
  }
  return out;
}

SymbolTables tabulate_symbols_serial(const TorusSpec& spec, const SymbolFn& fn, int channels) {
  SymbolTables out(channels, std::vector<double>(spec.volume()));
  std::vector<double> buf(channels);
  for (std::size_t i = 0; i < spec.volume(); ++i) {
    fn(laplacian_symbol_q(spec.coords(i), spec.side()), buf.data());
    for (int c = 0; c < channels; ++c) out[c][i] = buf[c];
  }
  return out;
}

RadialSymbolTable::RadialSymbolTable(const SymbolFn& fn, int channels, double lambda_max, int size,
                                     bool parallel)
    : channels_(channels), lambda_max_(lambda_max), size_(size) {
  if (channels < 1) throw std::invalid_argument("table needs at least one channel");
  if (!(lambda_max > 0.0)) throw std::invalid_argument("table range must be > 0");
  if (size < 8) throw std::invalid_argument("table size must be >= 8");
  dv_ = std::sqrt(lambda_max) / static_cast<double>(size - 1);
  // one ghost row below v = 0 and two rows above v_max
  const long rows = size + 3;
  data_.assign(static_cast<std::size_t>(rows) * channels, 0.0);
  auto fill = [&](long row) {
    const double v = (static_cast<double>(row) - 1.0) * dv_;
    fn(v * v, data_.data() + static_cast<std::size_t>(row) * channels);
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (long row = 1; row < rows; ++row) fill(row);
  } else {
    for (long row = 1; row < rows; ++row) fill(row);
  }
  // even extension: h(-dv) = h(dv)
  for (int c = 0; c < channels; ++c) data_[c] = data_[2 * channels + c];
}

MidpointGrid::MidpointGrid(int n_, double P_) : n(n_), P(P_) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("midpoint grid needs an even n >= 2");
  if (!(P > 0.0 && P <= std::numbers::pi)) throw std::invalid_argument("box half-width must lie in (0, pi]");
  dp = 2.0 * P / n;
  p.resize(n);
  lam1.resize(n);
  for (int i = 0; i < n; ++i) {
    p[i] = -P + (i + 0.5) * dp;
    const double sn = std::sin(p[i] / 2.0);
    lam1[i] = 4.0 * sn * sn;
  }
}

std::vector<double> window_marginal(const MidpointGrid& grid, const RadialSymbolTable& table,
                                    int d) {
  if (d < 2) throw std::invalid_argument("window marginals need d >= 2");
  const int n = grid.n;
  const int h = n / 2;
  const int ch = table.channels();
  const int rest = d - 2;
  // Only |p| matters on every axis: use the nonnegative half with weight 2
  // on each summed axis, and i <= k on the kept pair.
  std::vector<double> half_lam(h);
  for (int i = 0; i < h; ++i) half_lam[i] = grid.lam1[h + i];
  long rest_count = 1;
  for (int k = 0; k < rest; ++k) rest_count *= h;
  const double rest_weight = std::pow(2.0, rest);

  std::vector<double> half_g(static_cast<std::size_t>(h) * h * ch, 0.0);
#pragma omp parallel
  {
    std::vector<double> buf(ch), acc(ch);
#pragma omp for schedule(dynamic, 1)
    for (int i = 0; i < h; ++i) {
      for (int k = i; k < h; ++k) {
        std::fill(acc.begin(), acc.end(), 0.0);
        const double base = half_lam[i] + half_lam[k];
        for (long r = 0; r < rest_count; ++r) {
          long rr = r;
          double lam = base;
          for (int a = 0; a < rest; ++a) {
            lam += half_lam[rr % h];
            rr /= h;
          }
          table.eval(lam, buf.data());
          for (int c = 0; c < ch; ++c) acc[c] += buf[c];
        }
        for (int c = 0; c < ch; ++c) {
          const double v = rest_weight * acc[c];
          half_g[(static_cast<std::size_t>(i) * h + k) * ch + c] = v;
          half_g[(static_cast<std::size_t>(k) * h + i) * ch + c] = v;
        }
      }
    }
  }
  std::vector<double> g(static_cast<std::size_t>(n) * n * ch);
  auto fold = [h](int i) { return i >= h ? i - h : h - 1 - i; };
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int c = 0; c < ch; ++c)
        g[(static_cast<std::size_t>(i) * n + k) * ch + c] =
            half_g[(static_cast<std::size_t>(fold(i)) * h + fold(k)) * ch + c];
  return g;
}

std::vector<double> window_marginal_serial(const MidpointGrid& grid,
                                           const RadialSymbolTable& table, int d) {
  if (d < 2) throw std::invalid_argument("window marginals need d >= 2");
  const int n = grid.n;
  const int ch = table.channels();
  const int rest = d - 2;
  long rest_count = 1;
  for (int k = 0; k < rest; ++k) rest_count *= n;
  std::vector<double> g(static_cast<std::size_t>(n) * n * ch, 0.0);
  std::vector<double> buf(ch);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      for (long r = 0; r < rest_count; ++r) {
        long rr = r;
        double lam = grid.lam1[i] + grid.lam1[k];
        for (int a = 0; a < rest; ++a) {
          lam += grid.lam1[rr % n];
          rr /= n;
        }
        table.eval(lam, buf.data());
        for (int c = 0; c < ch; ++c) g[(static_cast<std::size_t>(i) * n + k) * ch + c] += buf[c];
      }
    }
  }
  return g;
}

}  // namespace frd
