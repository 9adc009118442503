#include "frd/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <ostream>

#include "frd/walk.hpp"

namespace frd {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// FFTW planning is not thread safe; execution is. Estimate mode keeps the
// plan (and so the rounding) independent of timing.
void run_fft(const TorusSpec& spec, const Complex* in, Complex* out, int sign) {
  std::vector<int> n(spec.d(), static_cast<int>(spec.side()));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(spec.d(), n.data(),
                         reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                         reinterpret_cast<fftw_complex*>(out), sign,
                         FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT);
  }
  if (!plan) throw std::runtime_error("FFTW failed to create a plan");
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

std::vector<double> MomentumGrid::momentum(std::size_t index) const {
  const Coord q = spec_.coords(index);
  std::vector<double> p(q.size());
  const double step = 2.0 * std::numbers::pi / static_cast<double>(spec_.side());
  for (std::size_t k = 0; k < q.size(); ++k) p[k] = step * static_cast<double>(q[k]);
  return p;
}

double MomentumGrid::lambda(std::size_t index) const {
  return laplacian_symbol_q(spec_.coords(index), spec_.side());
}

ComplexField dft(const TorusField& f) {
  ComplexField in(f.spec());
  for (std::size_t i = 0; i < f.size(); ++i) in.values[i] = f[i];
  return dft(in);
}

ComplexField dft(const ComplexField& f) {
  ComplexField out(f.spec);
  run_fft(f.spec, f.values.data(), out.values.data(), FFTW_FORWARD);
  return out;
}

ComplexField idft(const ComplexField& coeffs) {
  ComplexField out(coeffs.spec);
  run_fft(coeffs.spec, coeffs.values.data(), out.values.data(), FFTW_BACKWARD);
  const double inv = 1.0 / static_cast<double>(coeffs.spec.volume());
  for (Complex& v : out.values) v *= inv;
  return out;
}

TorusField idft_real(const ComplexField& coeffs) {
  const ComplexField c = idft(coeffs);
  TorusField f(coeffs.spec);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = c.values[i].real();
  return f;
}

TorusField idft_real(const TorusSpec& spec, std::span<const double> coeffs) {
  if (coeffs.size() != spec.volume()) throw std::invalid_argument("coefficient count does not match torus volume");
  ComplexField c(spec);
  for (std::size_t i = 0; i < coeffs.size(); ++i) c.values[i] = coeffs[i];
  return idft_real(c);
}

double poisson_consistency(const WindowKernel& k, const TorusSpec& spec, double tail_tol) {
  const ComplexField lhs = dft(periodize(k, spec, tail_tol));
  const MomentumGrid grid(spec);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::vector<double> p = grid.momentum(i);
    Complex acc = 0.0;
    for (std::size_t n = 0; n < k.size(); ++n) {
      const double v = k.values()[n];
      if (v == 0.0) continue;
      const Coord x = k.coords(n);
      double px = 0.0;
      for (int a = 0; a < spec.d(); ++a) px += p[a] * static_cast<double>(x[a]);
      acc += v * std::polar(1.0, -px);
    }
    worst = std::max(worst, std::abs(lhs.values[i] - acc));
  }
  return worst;
}

DecayFit decay_fit(const TorusSpec& spec, std::span<const double> coeffs, int N,
                   const std::vector<int>& orders) {
  if (coeffs.size() != spec.volume()) throw std::invalid_argument("coefficient count does not match torus volume");
  const MomentumGrid grid(spec);
  const double scale = std::pow(static_cast<double>(spec.L()), N);
  DecayFit fit;
  // Least squares for y = log C - k x, x = log(1 + (L^N|p|)²).
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::vector<double> xs(coeffs.size()), ys(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::vector<double> p = grid.momentum(i);
    double p2 = 0.0;
    for (double v : p) p2 += v * v;
    xs[i] = std::log1p(scale * scale * p2);
    const double a = std::abs(coeffs[i]);
    ys[i] = a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity();
    if (p2 == 0.0) continue;
    if (a < 1e-300) {
      ++fit.excluded;
      continue;
    }
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    ++fit.used;
  }
  if (fit.used < 2) throw std::runtime_error("too few coefficients above 1e-300 to fit a decay envelope");
  const double n = static_cast<double>(fit.used);
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  fit.k = std::max(0.0, -slope);
  double rss = 0.0;
  double logC = intercept;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!std::isfinite(ys[i])) continue;
    logC = std::max(logC, ys[i] + fit.k * xs[i]);
  }
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (xs[i] == 0.0 || std::abs(coeffs[i]) < 1e-300) continue;
    const double r = ys[i] - (intercept - fit.k * xs[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  fit.C = std::exp(logC);
  fit.majorizes = true;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const double env = fit.C * std::exp(-fit.k * xs[i]);
    if (std::abs(coeffs[i]) > env * (1.0 + 1e-12)) fit.majorizes = false;
  }
  for (int l : orders) fit.adequate.emplace_back(l, 2.0 * fit.k > spec.d() + l + 1);
  return fit;
}

void write_coefficients_csv(std::ostream& os, const ComplexField& c) {
  const int d = c.spec.d();
  for (int k = 0; k < d; ++k) os << 'q' << (k + 1) << ',';
  os << "re,im\n";
  const long h = c.spec.half();
  Coord q(d, -h);
  char buf[64];
  while (true) {
    const Complex v = c.values[c.spec.index(q)];
    for (long x : q) os << x << ',';
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", v.real(), v.imag());
    os << buf << '\n';
    int k = d - 1;
    while (k >= 0 && q[k] == h) {
      q[k] = -h;
      --k;
    }
    if (k < 0) break;
    ++q[k];
  }
}

}  // namespace frd
