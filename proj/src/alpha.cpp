#include "frd/alpha.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "frd/fourier.hpp"
#include "frd/kernels.hpp"

namespace frd {

TorusField Decomposition::total() const {
  TorusField t = pieces.front().kernel;
  for (std::size_t j = 1; j < pieces.size(); ++j) t += pieces[j].kernel;
  t += remainder.field;
  return t;
}

SpectralNodes decomposition_nodes(int d, double lambda_min, const SpectralParams& P,
                                  const QuadratureRule& rule, const BlockSchedule& schedule) {
  const double fd = 4.0 * d;
  const double s_lo = std::min(lambda_min, fd / static_cast<double>(schedule.T.back()));
  return spectral_nodes(P, rule, s_lo, fd);
}

SpectralNodes relayout_nodes(const SpectralNodes& ref, const SpectralParams& P,
                             const QuadratureRule& rule) {
  SpectralNodes n = layout_spectral_nodes(P, rule, ref.t_lo, ref.t_hi, ref.panels);
  n.error_estimate = ref.error_estimate;
  return n;
}

std::vector<double> exact_resolvent_symbol(const TorusSpec& spec, const SpectralParams& P) {
  P.require_resolvent();
  std::vector<double> sym(spec.volume());
  for (std::size_t i = 0; i < sym.size(); ++i) {
    const double lam = laplacian_symbol_q(spec.coords(i), spec.side());
    sym[i] = 1.0 / (std::pow(lam, P.alpha / 2.0) + P.m2);
  }
  return sym;
}

TorusField exact_torus_resolvent(const TorusSpec& spec, const SpectralParams& P) {
  return idft_real(spec, exact_resolvent_symbol(spec, P));
}

RangeReport measure_ranges(const TorusField& kernel, long Tb) {
  RangeReport r;
  r.exact = Tb - 1;
  r.resolvable = 2 * Tb < kernel.spec().side();
  const double eps = 1e-12 * norms(kernel).sup;
  r.eps_l1 = range_of(kernel, Metric::l1, eps);
  r.eps_l2 = range_of(kernel, Metric::l2, eps);
  r.eps_linf = range_of(kernel, Metric::linf, eps);
  return r;
}

namespace {

// Channels: blocks 0..N-1, tail, ∫ρ/(s+λ); then dm2 of blocks and tail.
SymbolFn schedule_integrator(const SpectralNodes& nodes, const BlockSchedule& schedule, int d,
                             bool dm2) {
  const int N = schedule.blocks();
  const double fd = 4.0 * d;
  std::vector<double> b(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) b[i] = std::log1p(nodes.s[i] / fd);
  return [&nodes, schedule, N, fd, dm2, b = std::move(b)](double lambda, double* out) {
    const int ch = N + 2 + (dm2 ? N + 1 : 0);
    std::fill(out, out + ch, 0.0);
    const double lam = std::clamp(lambda, 0.0, fd);
    const double a = lam >= fd ? -std::numeric_limits<double>::infinity() : std::log1p(-lam / fd);
    double pw[64];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double ell = a - b[i];
      const double inv = 1.0 / (nodes.s[i] + lam);
      pw[0] = 1.0;
      for (int j = 1; j <= N; ++j) pw[j] = std::exp(static_cast<double>(schedule.T[j]) * ell);
      const double wr = nodes.w_rho[i];
      const double wd = nodes.w_dm2[i];
      for (int j = 0; j < N; ++j) {
        const double dT = static_cast<double>(schedule.T[j + 1] - schedule.T[j]);
        const double blk = pw[j] * -std::expm1(dT * ell) * inv;
        out[j] += wr * blk;
        if (dm2) out[N + 2 + j] += wd * blk;
      }
      const double tail = pw[N] * inv;
      out[N] += wr * tail;
      out[N + 1] += wr * inv;
      if (dm2) out[2 * N + 2] += wd * tail;
    }
  };
}

AlphaScaleKernel make_piece(const TorusSpec& spec, const SpectralParams& P,
                            const BlockSchedule& schedule, int j, std::vector<double> symbol,
                            const SpectralNodes& nodes) {
  AlphaScaleKernel k;
  k.j = j;
  k.params = P;
  k.exponents = ScalingExponents::make(spec.d(), P.alpha);
  k.Ta = schedule.T[j];
  k.Tb = schedule.T[j + 1];
  k.kernel = idft_real(spec, symbol);
  k.symbol = std::move(symbol);
  k.ranges = measure_ranges(k.kernel, k.Tb);
  k.quad_error = nodes.error_estimate;
  k.quad_nodes = nodes.size();
  return k;
}

}  // namespace

Decomposition assemble(const TorusSpec& spec, const SpectralParams& P, const QuadratureRule& rule,
                       const BlockSchedule& schedule, const AssembleOptions& opts) {
  P.require_resolvent();
  rule.validate();
  if (schedule.blocks() != spec.N()) throw std::invalid_argument("schedule must have exactly N blocks");
  if (schedule.blocks() > 60) throw std::invalid_argument("schedule has too many blocks");
  const auto t0 = std::chrono::steady_clock::now();
  const int d = spec.d();
  const int N = spec.N();
  const double s1 = std::sin(std::numbers::pi / static_cast<double>(spec.side()));
  const SpectralNodes nodes = opts.layout ? relayout_nodes(*opts.layout, P, rule)
                                          : decomposition_nodes(d, 4.0 * s1 * s1, P, rule, schedule);
  const bool dm2 = opts.mass_derivatives;
  const int channels = N + 2 + (dm2 ? N + 1 : 0);
  SymbolTables tables = tabulate_symbols(spec, schedule_integrator(nodes, schedule, d, dm2), channels);

  Decomposition dec{spec, P, rule, schedule, {}, {}, {}, {}, {}, {}, {}, {}, 0, 0.0, 0.0, 0.0};
  for (int j = 0; j < N; ++j) dec.pieces.push_back(make_piece(spec, P, schedule, j, std::move(tables[j]), nodes));
  dec.remainder.N = N;
  dec.remainder.params = P;
  dec.remainder.field = idft_real(spec, tables[N]);
  dec.remainder.symbol = std::move(tables[N]);
  dec.quadrature_resolvent = std::move(tables[N + 1]);
  dec.exact_symbol = exact_resolvent_symbol(spec, P);
  dec.exact = idft_real(spec, dec.exact_symbol);
  if (dm2) {
    for (int j = 0; j < N; ++j)
      dec.dm2_pieces.push_back(make_piece(spec, P, schedule, j, std::move(tables[N + 2 + j]), nodes));
    TorusRemainder r;
    r.N = N;
    r.params = P;
    r.field = idft_real(spec, tables[2 * N + 2]);
    r.symbol = std::move(tables[2 * N + 2]);
    dec.dm2_remainder = std::move(r);
  }
  dec.nodes = nodes;
  dec.quad_nodes = nodes.size();
  dec.quad_panel_width = nodes.panel_width;
  dec.quad_error = nodes.error_estimate;
  dec.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return dec;
}

AlphaScaleKernel build_piece(int j, const TorusSpec& spec, const SpectralParams& P,
                             const QuadratureRule& rule, const BlockSchedule& schedule) {
  if (j < 0 || j >= spec.N()) throw std::invalid_argument("piece index out of range");
  return assemble(spec, P, rule, schedule).pieces[j];
}

TorusRemainder build_remainder(const TorusSpec& spec, const SpectralParams& P,
                               const QuadratureRule& rule, const BlockSchedule& schedule) {
  return assemble(spec, P, rule, schedule).remainder;
}

AlphaScaleKernel mass_derivative(const AlphaScaleKernel& piece, const TorusSpec& spec,
                                 const QuadratureRule& rule, const BlockSchedule& schedule) {
  AssembleOptions opts;
  opts.mass_derivatives = true;
  return assemble(spec, piece.params, rule, schedule, opts).dm2_pieces.at(piece.j);
}

TorusRemainder mass_derivative(const TorusRemainder& rem, const TorusSpec& spec,
                               const QuadratureRule& rule, const BlockSchedule& schedule) {
  AssembleOptions opts;
  opts.mass_derivatives = true;
  return *assemble(spec, rem.params, rule, schedule, opts).dm2_remainder;
}

TorusField CoarseDecomposition::total() const {
  std::vector<const TorusField*> order;
  for (const auto& p : pieces) order.push_back(&p);
  for (const auto& p : folded) order.push_back(&p);
  TorusField t = *order.front();
  for (std::size_t k = 1; k < order.size(); ++k) t += *order[k];
  t += remainder;
  return t;
}

CoarseDecomposition coarse_grain(const Decomposition& dec, int r) {
  if (r < 1) throw std::invalid_argument("coarse factor r must be >= 1");
  const int N = static_cast<int>(dec.pieces.size());
  if (r > N) throw std::invalid_argument("coarse factor exceeds the number of pieces");
  CoarseDecomposition c;
  c.r = r;
  c.L_prime = ipow(dec.spec.L(), r);
  const int groups = N / r;
  for (int j = 0; j < groups; ++j) {
    TorusField acc = dec.pieces[j * r].kernel;
    for (int l = 1; l < r; ++l) acc += dec.pieces[l + j * r].kernel;
    c.pieces.push_back(std::move(acc));
  }
  for (int j = groups * r; j < N; ++j) c.folded.push_back(dec.pieces[j].kernel);
  c.remainder = dec.remainder.field;
  return c;
}

WindowKernel rescaled_view(const AlphaScaleKernel& piece, int L, int q) {
  const int j = piece.j;
  if (q < 0 || q > j) throw std::invalid_argument("rescaled view needs 0 <= q <= j");
  const TorusSpec& spec = piece.kernel.spec();
  const long step = ipow(L, j - q);
  const long radius = spec.half() / step;
  const double factor = std::pow(static_cast<double>(L), j * piece.exponents.two_phi);
  WindowKernel w(spec.d(), radius, false);
  for (std::size_t i = 0; i < w.size(); ++i) {
    Coord k = w.coords(i);
    for (long& v : k) v *= step;
    w.values()[i] = factor * piece.kernel.at(k);
  }
  return w;
}

}  // namespace frd
