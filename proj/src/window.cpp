#include "frd/window.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace frd {

namespace {

using cd = std::complex<double>;

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

double DerivativeProfile::sup(int p) const {
  switch (p) {
    case 0: return max_abs(axis[0]);
    case 1: return max_abs(axis[1]);
    case 2: return std::max({max_abs(axis[2]), max_abs(mixed_axis), max_abs(mixed_diag)});
  }
  throw std::invalid_argument("profiles hold derivative orders 0..2");
}

double profile_difference(const DerivativeProfile& a, const DerivativeProfile& b, int p) {
  switch (p) {
    case 0: return max_abs_diff(a.axis[0], b.axis[0]);
    case 1: return max_abs_diff(a.axis[1], b.axis[1]);
    case 2:
      return std::max({max_abs_diff(a.axis[2], b.axis[2]), max_abs_diff(a.mixed_axis, b.mixed_axis),
                       max_abs_diff(a.mixed_diag, b.mixed_diag)});
  }
  throw std::invalid_argument("profiles hold derivative orders 0..2");
}

std::array<DerivativeProfile, 2> window_profiles(int d, const MidpointGrid& grid,
                                                 const RadialSymbolTable& table, long R) {
  const int n = grid.n;
  const int ch = table.channels();
  if (ch != 2) throw std::invalid_argument("window profiles expect value and dm2 channels");
  const std::vector<double> g2 = window_marginal(grid, table, d);
  const double norm = std::pow(grid.dp / (2.0 * std::numbers::pi), d);
  std::vector<cd> m(n);  // e^{ip} - 1
  for (int i = 0; i < n; ++i) m[i] = std::polar(1.0, grid.p[i]) - 1.0;
  const long T = 2 * R + 1;

  std::array<DerivativeProfile, 2> out;
  for (int c = 0; c < ch; ++c) {
    std::vector<double> g1(n, 0.0);
    std::vector<cd> C(n, 0.0);  // Σ_k g2(i,k)(e^{ip_k}-1)
    std::vector<cd> B(2 * n - 1, 0.0);  // diagonal: p_i + p_k = -2P + (i+k+1)dp
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) {
        const double v = g2[(static_cast<std::size_t>(i) * n + k) * ch + c];
        g1[i] += v;
        C[i] += v * m[k];
        B[i + k] += v * m[i] * m[k];
      }
    }
    DerivativeProfile& prof = out[c];
    for (auto& a : prof.axis) a.assign(T, 0.0);
    prof.mixed_axis.assign(T, 0.0);
    prof.mixed_diag.assign(T, 0.0);
#pragma omp parallel for schedule(static)
    for (long ti = 0; ti < T; ++ti) {
      const double t = static_cast<double>(ti - R);
      cd a0 = 0.0, a1 = 0.0, a2 = 0.0, mx = 0.0, dg = 0.0;
      for (int i = 0; i < n; ++i) {
        const cd e = std::polar(1.0, grid.p[i] * t);
        a0 += g1[i] * e;
        a1 += g1[i] * m[i] * e;
        a2 += g1[i] * m[i] * m[i] * e;
        mx += m[i] * C[i] * e;
      }
      for (int u = 0; u < 2 * n - 1; ++u) {
        const double pu = -2.0 * grid.P + (u + 1) * grid.dp;
        dg += B[u] * std::polar(1.0, pu * t);
      }
      prof.axis[0][ti] = norm * a0.real();
      prof.axis[1][ti] = norm * a1.real();
      prof.axis[2][ti] = norm * a2.real();
      prof.mixed_axis[ti] = norm * mx.real();
      prof.mixed_diag[ti] = norm * dg.real();
    }
  }
  return out;
}

SpectralNodes window_nodes(int d, long T_max, const SpectralParams& P, const QuadratureRule& rule) {
  const double fd = 4.0 * d;
  return spectral_nodes(P, rule, fd / static_cast<double>(T_max), fd);
}

WindowStudy window_study(int d, long Ta, long Tb, const SpectralNodes& nodes,
                         const WindowConfig& cfg) {
  if (d < 2) throw std::invalid_argument("window studies need d >= 2");
  if (Ta < 0 || Tb <= Ta) throw std::invalid_argument("block needs 0 <= Ta < Tb");
  const auto t0 = std::chrono::steady_clock::now();
  WindowStudy st;
  st.d = d;
  st.Ta = Ta;
  st.Tb = Tb;
  st.n = cfg.n;
  st.box = Ta == 0 ? std::numbers::pi
                   : std::min(std::numbers::pi, cfg.box_factor / std::sqrt(static_cast<double>(Ta)));
  // Stay well inside the alias half-period of both grids.
  const double alias = 0.4 * std::min(cfg.n, cfg.n_ref) * std::numbers::pi / st.box;
  st.R = std::max<long>(2, std::min<long>(static_cast<long>(std::ceil(cfg.reach * std::sqrt(static_cast<double>(Tb)))),
                                          static_cast<long>(alias)));

  const double fd = 4.0 * d;
  const double sh = std::sin(st.box / 2.0);
  const double lam_max = std::min(fd, d * 4.0 * sh * sh);
  std::vector<double> b(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) b[i] = std::log1p(nodes.s[i] / fd);
  auto fn = [&](double lambda, double* out) {
    const double lam = std::clamp(lambda, 0.0, fd);
    const double a = lam >= fd ? -std::numeric_limits<double>::infinity() : std::log1p(-lam / fd);
    double v = 0.0, w = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double ell = a - b[i];
      const double pa = Ta == 0 ? 1.0 : std::exp(static_cast<double>(Ta) * ell);
      const double blk = pa * -std::expm1(static_cast<double>(Tb - Ta) * ell) / (nodes.s[i] + lam);
      v += nodes.w_rho[i] * blk;
      w += nodes.w_dm2[i] * blk;
    }
    out[0] = v;
    out[1] = w;
  };
  const RadialSymbolTable table(fn, 2, lam_max, cfg.table_size);

  auto coarse = window_profiles(d, MidpointGrid(cfg.n, st.box), table, st.R);
  auto fine = window_profiles(d, MidpointGrid(cfg.n_ref, st.box), table, st.R);
  for (int c = 0; c < 2; ++c) {
    for (int p = 0; p <= 2; ++p) {
      const double ref = fine[c].sup(p);
      if (ref > 0.0) st.refine_defect = std::max(st.refine_defect, std::abs(coarse[c].sup(p) - ref) / ref);
    }
  }
  st.value = std::move(coarse[0]);
  st.dm2 = std::move(coarse[1]);
  st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return st;
}

}  // namespace frd
