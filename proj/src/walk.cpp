#include "frd/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "frd/fourier.hpp"

namespace frd {

double laplacian_symbol(std::span<const double> p) {
  double acc = 0.0;
  for (double v : p) {
    const double sn = std::sin(v / 2.0);
    acc += 4.0 * sn * sn;
  }
  return acc;
}

double laplacian_symbol_q(std::span<const long> q, long M) {
  long buf[16];
  std::vector<long> heap;
  long* a = buf;
  if (q.size() > 16) {
    heap.resize(q.size());
    a = heap.data();
  }
  for (std::size_t k = 0; k < q.size(); ++k) {
    long r = q[k] % M;
    if (r < 0) r += M;
    if (r > M / 2) r = M - r;
    a[k] = r;
  }
  std::sort(a, a + q.size());
  const double step = std::numbers::pi / static_cast<double>(M);
  double acc = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double sn = std::sin(step * static_cast<double>(a[k]));
    acc += 4.0 * sn * sn;
  }
  return acc;
}

double lazy_symbol(double lambda, int d) { return 1.0 - lambda / (4.0 * d); }

double theta(double s, int d) { return 4.0 * d / (s + 4.0 * d); }

BlockSchedule::BlockSchedule(std::vector<long> cuts) : T(std::move(cuts)) {
  if (T.size() < 2) throw std::invalid_argument("schedule needs at least T_0 and T_1");
  if (T[0] != 0) throw std::invalid_argument("schedule must start at T_0 = 0");
  for (std::size_t j = 1; j < T.size(); ++j)
    if (T[j] <= T[j - 1]) throw std::invalid_argument("schedule must be strictly increasing");
}

BlockSchedule BlockSchedule::standard(int L, int N) {
  if (L < 2 || N < 1) throw std::invalid_argument("standard schedule needs L >= 2 and N >= 1");
  std::vector<long> T{0};
  for (int j = 1; j <= N; ++j) T.push_back(ipow(L, 2 * j));
  return BlockSchedule(std::move(T));
}

double log_theta_mu(double lambda, double s, int d) {
  const double fd = 4.0 * d;
  if (lambda >= fd) return -std::numeric_limits<double>::infinity();
  return std::log1p(-std::max(lambda, 0.0) / fd) - std::log1p(s / fd);
}

namespace {

void require_s(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("spectral parameter s must be > 0");
}

// e^{T ell}, with the T = 0 case kept exact when ell = -inf.
double power(long T, double ell) { return T == 0 ? 1.0 : std::exp(static_cast<double>(T) * ell); }

}  // namespace

double block_symbol(double lambda, double s, long Ta, long Tb, int d) {
  require_s(s);
  if (Ta < 0 || Tb <= Ta) throw std::invalid_argument("block needs 0 <= Ta < Tb");
  const double lam = std::clamp(lambda, 0.0, 4.0 * d);
  const double ell = log_theta_mu(lam, s, d);
  return power(Ta, ell) * -std::expm1(static_cast<double>(Tb - Ta) * ell) / (s + lam);
}

double tail_symbol(double lambda, double s, long TN, int d) {
  require_s(s);
  const double lam = std::clamp(lambda, 0.0, 4.0 * d);
  return power(TN, log_theta_mu(lam, s, d)) / (s + lam);
}

void schedule_symbols(double lambda, double s, const BlockSchedule& schedule, int d,
                      std::span<double> out) {
  const int N = schedule.blocks();
  const double lam = std::clamp(lambda, 0.0, 4.0 * d);
  const double ell = log_theta_mu(lam, s, d);
  const double inv = 1.0 / (s + lam);
  for (int j = 0; j < N; ++j) {
    const long Ta = schedule.T[j];
    const long Tb = schedule.T[j + 1];
    out[j] = power(Ta, ell) * -std::expm1(static_cast<double>(Tb - Ta) * ell) * inv;
  }
  out[N] = power(schedule.T[N], ell) * inv;
}

ScaleKernelS build_block_kernel(const TorusSpec& spec, int j, double s,
                                const BlockSchedule& schedule) {
  require_s(s);
  if (j < 0 || j >= schedule.blocks()) throw std::invalid_argument("block index out of range");
  const long Ta = schedule.T[j];
  const long Tb = schedule.T[j + 1];
  std::vector<double> sym(spec.volume());
  for (std::size_t i = 0; i < sym.size(); ++i) {
    const Coord q = spec.coords(i);
    sym[i] = block_symbol(laplacian_symbol_q(q, spec.side()), s, Ta, Tb, spec.d());
  }
  ScaleKernelS out{j, s, idft_real(spec, sym), Tb - 1, 0, 2 * Tb < spec.side(), {}};
  const double sup = norms(out.kernel).sup;
  out.eps_range = range_of(out.kernel, Metric::l1, 1e-12 * sup);
  if (!out.resolvable)
    out.warning = "torus too small to resolve the exact range (2 T_{j+1} >= M)";
  return out;
}

WindowKernel lazy_step(const WindowKernel& k) {
  const int d = k.d();
  WindowKernel out(d, k.radius(), true);
  const double nb = 1.0 / (4.0 * d);
  Coord y(d);
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double v = k.values()[i];
    if (v == 0.0) continue;
    const Coord x = k.coords(i);
    out.values()[i] += 0.5 * v;
    for (int a = 0; a < d; ++a) {
      for (int sgn = -1; sgn <= 1; sgn += 2) {
        y = x;
        y[a] += sgn;
        if (!out.contains(y)) throw std::invalid_argument("window too small for the lazy step");
        out.at(y) += nb * v;
      }
    }
  }
  return out;
}

WindowKernel build_block_window(int d, int j, double s, const BlockSchedule& schedule) {
  require_s(s);
  if (j < 0 || j >= schedule.blocks()) throw std::invalid_argument("block index out of range");
  const long Ta = schedule.T[j];
  const long Tb = schedule.T[j + 1];
  const long R = std::max<long>(Tb - 1, 0);
  const double th = theta(s, d);
  WindowKernel power_n = WindowKernel::delta(d, R + 1);
  WindowKernel acc(d, R + 1, true);
  double thn = 1.0;
  for (long n = 0; n < Tb; ++n) {
    if (n >= Ta)
      for (std::size_t i = 0; i < acc.size(); ++i) acc.values()[i] += thn * power_n.values()[i];
    if (n + 1 < Tb) power_n = lazy_step(power_n);
    thn *= th;
  }
  // Copy onto the exact support window.
  WindowKernel out(d, R, true);
  const double inv = 1.0 / (s + 4.0 * d);
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] = inv * acc.value(out.coords(i));
  return out;
}

WindowKernel convolution_power_oracle(int d, int n, long radius, int n_max) {
  if (n < 0 || n > n_max) throw std::invalid_argument("convolution power outside [0, n_max]");
  if (radius < n) throw std::invalid_argument("window too small for the convolution power");
  WindowKernel k = WindowKernel::delta(d, radius);
  for (int i = 0; i < n; ++i) k = lazy_step(k);
  return k;
}

}  // namespace frd
