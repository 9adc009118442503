#include "frd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

namespace frd {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_s(double s) {
  if (!(s > 0.0)) throw std::invalid_argument("spectral variable s must be > 0");
}

template <unsigned Order>
GaussRule make_gauss() {
  using G = boost::math::quadrature::gauss<double, Order>;
  const auto& a = G::abscissa();
  const auto& w = G::weights();
  GaussRule r;
  // Boost stores the nonnegative half; mirror it.
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] == 0.0) continue;
    r.x.push_back(-a[i]);
    r.w.push_back(w[i]);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    r.x.push_back(a[i]);
    r.w.push_back(w[i]);
  }
  return r;
}

}  // namespace

SpectralParams::SpectralParams(double alpha_, double m2_) : alpha(alpha_), m2(m2_) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("alpha must lie in the open interval (0, 2)");
  if (!(m2 >= 0.0) || !std::isfinite(m2)) throw std::invalid_argument("m2 must be finite and >= 0");
}

double SpectralParams::sin_factor() const { return std::sin(kPi * alpha / 2.0) / kPi; }
double SpectralParams::cos_factor() const { return std::cos(kPi * alpha / 2.0); }

void SpectralParams::require_resolvent() const {
  if (!(m2 > 0.0))
    throw std::invalid_argument("m2 must be > 0: the torus resolvent is valid only when m ≠ 0");
}

void SpectralParams::require_continuity() const {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw std::invalid_argument("mass-derivative bounds require 1 < alpha < 2");
}

ScalingExponents ScalingExponents::make(int d, double alpha) {
  return {(d - alpha) / 2.0, d - alpha};
}

void QuadratureRule::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("rel_tol must lie in (0, 1)");
  if (max_panels < 1) throw std::invalid_argument("max_panels must be >= 1");
  if (order != 8 && order != 16 && order != 32) throw std::invalid_argument("Gauss order must be 8, 16 or 32");
  if (!(window > 0.0)) throw std::invalid_argument("quadrature window must be > 0");
}

const GaussRule& gauss_rule(int order) {
  static const GaussRule g8 = make_gauss<8>();
  static const GaussRule g16 = make_gauss<16>();
  static const GaussRule g32 = make_gauss<32>();
  switch (order) {
    case 8: return g8;
    case 16: return g16;
    case 32: return g32;
  }
  throw std::invalid_argument("Gauss order must be 8, 16 or 32");
}

double denominator(double s, const SpectralParams& P) {
  require_positive_s(s);
  const double x = std::pow(s, P.alpha / 2.0);
  return x * x + P.m2 * P.m2 + 2.0 * P.m2 * x * P.cos_factor();
}

double rho(double s, const SpectralParams& P) {
  require_positive_s(s);
  const double x = std::pow(s, P.alpha / 2.0);
  const double d = x * x + P.m2 * P.m2 + 2.0 * P.m2 * x * P.cos_factor();
  return P.sin_factor() * x / d;
}

double rho_dm2(double s, const SpectralParams& P) {
  require_positive_s(s);
  const double x = std::pow(s, P.alpha / 2.0);
  const double c = P.cos_factor();
  const double d = x * x + P.m2 * P.m2 + 2.0 * P.m2 * x * c;
  return -P.sin_factor() * x * (2.0 * P.m2 + 2.0 * x * c) / (d * d);
}

double integrate_log_axis(const std::function<double(double)>& g, double t_lo, double t_hi,
                          double kappa_lo, double kappa_hi, double h0,
                          const QuadratureRule& rule) {
  rule.validate();
  if (!(kappa_lo > 0.0) || !(kappa_hi > 0.0))
    throw std::invalid_argument("integrand is not integrable: tail decay rate must be > 0");
  if (!(t_hi > t_lo)) throw std::invalid_argument("empty integration range");
  const GaussRule& gr = gauss_rule(rule.order);
  const double span = t_hi - t_lo;
  const double tails = g(t_lo) / kappa_lo + g(t_hi) / kappa_hi;

  auto eval = [&](double h, double& abs_sum) {
    const long n = static_cast<long>(std::ceil(span / h - 1e-9));
    if (n > rule.max_panels) throw QuadratureError("quadrature did not converge within max_panels");
    const double hh = span / static_cast<double>(n);
    double total = 0.0;
    abs_sum = 0.0;
    for (long k = 0; k < n; ++k) {
      const double mid = t_lo + (k + 0.5) * hh;
      double panel = 0.0;
      for (std::size_t i = 0; i < gr.x.size(); ++i) {
        const double v = gr.w[i] * g(mid + 0.5 * hh * gr.x[i]);
        panel += v;
        abs_sum += std::abs(v) * 0.5 * hh;
      }
      total += 0.5 * hh * panel;
    }
    return total + tails;
  };

  double h = std::min(h0, span);
  double abs_sum = 0.0;
  double prev = eval(h, abs_sum);
  while (true) {
    h /= 2.0;
    const double cur = eval(h, abs_sum);
    if (std::abs(cur - prev) <= rule.rel_tol * std::abs(cur) + 1e-15 * abs_sum) return cur;
    prev = cur;
  }
}

namespace {

struct AxisSetup {
  double t_lo;
  double t_hi;
  double kappa_lo;
  double kappa_hi;
  double h0;
};

// s as a function of the integration variable.
double s_of_t(const SpectralParams& P, double t) {
  if (P.m2 > 0.0) return std::exp((2.0 / P.alpha) * (std::log(P.m2) + t));
  return std::exp(t);
}

double t_of_s(const SpectralParams& P, double s) {
  if (P.m2 > 0.0) return (P.alpha / 2.0) * std::log(s) - std::log(P.m2);
  return std::log(s);
}

// Density weight per unit t: ρ(s) ds/dt, written in σ to avoid overflow.
double rho_dt(const SpectralParams& P, double t, double s) {
  if (P.m2 > 0.0) {
    const double c = P.cos_factor();
    if (t > 0.0) {
      const double u = std::exp(-t);
      // σ s /(m² Q) with Q = σ²(1 + 2cu + u²)
      return P.sin_factor() * (2.0 / P.alpha) * u * s / (P.m2 * (1.0 + 2.0 * c * u + u * u));
    }
    const double sigma = std::exp(t);
    return P.sin_factor() * (2.0 / P.alpha) * sigma * s /
           (P.m2 * (1.0 + 2.0 * c * sigma + sigma * sigma));
  }
  return P.sin_factor() * std::pow(s, 1.0 - P.alpha / 2.0);
}

double rho_dm2_dt(const SpectralParams& P, double t, double s) {
  const double c = P.cos_factor();
  const double pre = -P.sin_factor() * (4.0 / P.alpha) * s / (P.m2 * P.m2);
  if (t > 0.0) {
    const double u = std::exp(-t);
    const double q = 1.0 + 2.0 * c * u + u * u;
    // σ(1+cσ)/Q² = u²(u + c)/q²
    return pre * u * u * (u + c) / (q * q);
  }
  const double sigma = std::exp(t);
  const double q = 1.0 + 2.0 * c * sigma + sigma * sigma;
  return pre * sigma * (1.0 + c * sigma) / (q * q);
}

AxisSetup axis_for(const SpectralParams& P, const PowerEnvelope& env, const QuadratureRule& rule,
                   bool dm2) {
  if (!(env.scale_lo > 0.0) || !(env.scale_hi >= env.scale_lo))
    throw std::invalid_argument("envelope scales must satisfy 0 < scale_lo <= scale_hi");
  AxisSetup ax{};
  const double W = rule.window;
  if (P.m2 > 0.0) {
    const double k = 2.0 / P.alpha;
    ax.kappa_lo = 1.0 + k * (1.0 + env.a);
    ax.kappa_hi = (dm2 ? 2.0 : 1.0) - k * (1.0 + env.a + env.b);
    // The envelope itself changes shape at s = 1.
    ax.t_lo = std::min({0.0, t_of_s(P, 1.0), t_of_s(P, env.scale_lo)}) - W;
    ax.t_hi = std::max({0.0, t_of_s(P, 1.0), t_of_s(P, env.scale_hi)}) + W;
    ax.h0 = std::min(1.0, kPi * (1.0 - P.alpha / 2.0));
  } else {
    ax.kappa_lo = 1.0 - P.alpha / 2.0 + env.a;
    ax.kappa_hi = -(1.0 - P.alpha / 2.0 + env.a + env.b);
    ax.t_lo = std::min(0.0, std::log(env.scale_lo)) - W;
    ax.t_hi = std::max(0.0, std::log(env.scale_hi)) + W;
    ax.h0 = 1.0;
  }
  if (!(ax.kappa_lo > 0.0))
    throw std::invalid_argument("declared envelope is not integrable against rho near s = 0");
  if (!(ax.kappa_hi > 0.0))
    throw std::invalid_argument("declared envelope is not integrable against rho at large s");
  return ax;
}

// At each end of the range, |f|/envelope must have settled: it may not keep
// growing deeper into the tail.
void spot_check_envelope(const SpectralParams& P, const std::function<double(double)>& f,
                         const PowerEnvelope& env, const AxisSetup& ax) {
  auto ratio = [&](double t) {
    const double s = s_of_t(P, t);
    const double e = std::pow(s, env.a) * std::pow(1.0 + s, env.b);
    return std::abs(f(s)) / e;
  };
  const double step = 4.0;
  for (int side = 0; side < 2; ++side) {
    const double t_end = side == 0 ? ax.t_lo : ax.t_hi;
    const double t_deep = side == 0 ? ax.t_lo - step : ax.t_hi + step;
    const double r_end = ratio(t_end);
    const double r_deep = ratio(t_deep);
    if (!std::isfinite(r_deep) || r_deep > r_end * (1.0 + 1e-3) + 1e-300)
      throw std::invalid_argument("integrand violates its declared power envelope");
  }
}

}  // namespace

double integrate_rho(const SpectralParams& P, const std::function<double(double)>& f,
                     const PowerEnvelope& env, const QuadratureRule& rule) {
  const AxisSetup ax = axis_for(P, env, rule, false);
  spot_check_envelope(P, f, env, ax);
  auto g = [&](double t) {
    const double s = s_of_t(P, t);
    return rho_dt(P, t, s) * f(s);
  };
  return integrate_log_axis(g, ax.t_lo, ax.t_hi, ax.kappa_lo, ax.kappa_hi, ax.h0, rule);
}

double integrate_rho_dm2(const SpectralParams& P, const std::function<double(double)>& f,
                         const PowerEnvelope& env, const QuadratureRule& rule) {
  P.require_resolvent();
  const AxisSetup ax = axis_for(P, env, rule, true);
  spot_check_envelope(P, f, env, ax);
  auto g = [&](double t) {
    const double s = s_of_t(P, t);
    return rho_dm2_dt(P, t, s) * f(s);
  };
  return integrate_log_axis(g, ax.t_lo, ax.t_hi, ax.kappa_lo, ax.kappa_hi, ax.h0, rule);
}

double SpectralNodes::integrate(const std::function<double(double)>& f) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += w_rho[i] * f(s[i]);
  return acc;
}

double SpectralNodes::integrate_dm2(const std::function<double(double)>& f) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += w_dm2[i] * f(s[i]);
  return acc;
}

namespace {

SpectralNodes layout_nodes(const SpectralParams& P, const GaussRule& gr, double t_lo, double t_hi,
                           long panels) {
  SpectralNodes nodes;
  nodes.t_lo = t_lo;
  nodes.t_hi = t_hi;
  nodes.panels = static_cast<int>(panels);
  const double hh = (t_hi - t_lo) / static_cast<double>(panels);
  nodes.panel_width = hh;
  const std::size_t n = static_cast<std::size_t>(panels) * gr.x.size();
  nodes.s.reserve(n);
  nodes.w_rho.reserve(n);
  nodes.w_dm2.reserve(n);
  for (long k = 0; k < panels; ++k) {
    const double mid = t_lo + (k + 0.5) * hh;
    for (std::size_t i = 0; i < gr.x.size(); ++i) {
      const double t = mid + 0.5 * hh * gr.x[i];
      const double s = s_of_t(P, t);
      const double w = 0.5 * hh * gr.w[i];
      nodes.s.push_back(s);
      nodes.w_rho.push_back(w * rho_dt(P, t, s));
      nodes.w_dm2.push_back(w * rho_dm2_dt(P, t, s));
    }
  }
  return nodes;
}

}  // namespace

SpectralNodes spectral_nodes(const SpectralParams& P, const QuadratureRule& rule, double s_lo,
                             double s_hi) {
  P.require_resolvent();
  rule.validate();
  if (!(s_lo > 0.0) || !(s_hi >= s_lo)) throw std::invalid_argument("node scope must satisfy 0 < s_lo <= s_hi");
  const GaussRule& gr = gauss_rule(rule.order);
  const double t_lo = std::min(0.0, t_of_s(P, s_lo)) - rule.window;
  const double t_hi = std::max(0.0, t_of_s(P, s_hi)) + rule.window;
  const double span = t_hi - t_lo;

  // Probe scales: three per decade across the scope, plus λ = 0.
  std::vector<double> scales;
  const double decades = std::log10(s_hi / s_lo);
  const int np = std::max(2, static_cast<int>(std::ceil(3.0 * decades)) + 1);
  for (int k = 0; k < np; ++k) scales.push_back(s_lo * std::pow(s_hi / s_lo, k / double(np - 1)));

  struct ProbeValues {
    std::vector<double> v;
    double closed_err = 0.0;
  };
  auto probes = [&](const SpectralNodes& nd) {
    ProbeValues pv;
    auto stieltjes = [&](double lam) {
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < nd.size(); ++i) {
        const double r = 1.0 / (nd.s[i] + lam);
        a += nd.w_rho[i] * r;
        b += nd.w_dm2[i] * r;
      }
      const double g = 1.0 / (std::pow(lam, P.alpha / 2.0) + P.m2);
      pv.v.push_back(a);
      pv.v.push_back(b);
      pv.closed_err = std::max(pv.closed_err, std::abs(a - g) / g);
      pv.closed_err = std::max(pv.closed_err, std::abs(b + g * g) / (g * g));
    };
    stieltjes(0.0);
    for (double c : scales) {
      stieltjes(c);
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < nd.size(); ++i) {
        const double e = std::exp(-nd.s[i] / c);
        a += nd.w_rho[i] * e;
        b += nd.w_dm2[i] * e;
      }
      pv.v.push_back(a);
      pv.v.push_back(b);
    }
    return pv;
  };

  double h = std::min(std::min(1.0, kPi * (1.0 - P.alpha / 2.0)), span);
  long panels = static_cast<long>(std::ceil(span / h - 1e-9));
  SpectralNodes prev = layout_nodes(P, gr, t_lo, t_hi, panels);
  ProbeValues pv_prev = probes(prev);
  while (true) {
    panels *= 2;
    if (panels > rule.max_panels) throw QuadratureError("spectral node set did not converge within max_panels");
    SpectralNodes cur = layout_nodes(P, gr, t_lo, t_hi, panels);
    ProbeValues pv = probes(cur);
    double change = 0.0;
    for (std::size_t k = 0; k < pv.v.size(); ++k) {
      const double ref = std::max(std::abs(pv.v[k]), 1e-300);
      change = std::max(change, std::abs(pv.v[k] - pv_prev.v[k]) / ref);
    }
    cur.error_estimate = std::max(change, pv.closed_err);
    if (change <= rule.rel_tol && pv.closed_err <= rule.rel_tol) return cur;
    prev = std::move(cur);
    pv_prev = std::move(pv);
  }
}

SpectralNodes layout_spectral_nodes(const SpectralParams& P, const QuadratureRule& rule,
                                    double t_lo, double t_hi, int panels) {
  P.require_resolvent();
  rule.validate();
  if (panels < 1 || panels > rule.max_panels) throw std::invalid_argument("panel count outside [1, max_panels]");
  if (!(t_hi > t_lo)) throw std::invalid_argument("empty node range");
  return layout_nodes(P, gauss_rule(rule.order), t_lo, t_hi, panels);
}

StieltjesResult stieltjes_check(double lambda, const SpectralParams& P, const QuadratureRule& rule) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (!(lambda + P.m2 > 0.0)) throw std::invalid_argument("stieltjes check needs lambda + m2 > 0");
  const double exact = 1.0 / (std::pow(lambda, P.alpha / 2.0) + P.m2);
  PowerEnvelope env;
  env.a = lambda > 0.0 ? 0.0 : -1.0;
  env.b = lambda > 0.0 ? -1.0 : 0.0;
  const double scale = lambda > 0.0 ? lambda : 1.0;
  env.scale_lo = env.scale_hi = scale;
  const double value = integrate_rho(P, [lambda](double s) { return 1.0 / (s + lambda); }, env, rule);
  return {value, exact, std::abs(value - exact) / exact};
}

double H_alpha(double mu, double alpha, const QuadratureRule& rule) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("H_alpha requires 1 < alpha < 2");
  if (!(mu >= 0.0)) throw std::invalid_argument("mu must be >= 0");
  const double k = 2.0 / alpha;
  auto g = [=](double t) {
    // σ^{2/α+1}(1+σ)/(1+σ²)² / (1+μσ^{2/α}), evaluated without overflow.
    double rat;
    double lead;
    if (t > 0.0) {
      const double u = std::exp(-t);
      rat = (u + 1.0) / ((u * u + 1.0) * (u * u + 1.0));
      lead = (k + 1.0 - 3.0) * t;
    } else {
      const double sg = std::exp(t);
      rat = (1.0 + sg) / ((1.0 + sg * sg) * (1.0 + sg * sg));
      lead = (k + 1.0) * t;
    }
    return std::exp(lead) * rat / (1.0 + mu * std::exp(k * t));
  };
  const double t_lo = -rule.window;
  const double t_feat = mu > 0.0 ? -(alpha / 2.0) * std::log(mu) : 0.0;
  const double t_hi = std::max(0.0, t_feat) + rule.window;
  const double kappa_hi = mu > 0.0 ? 2.0 : 2.0 - k;
  return integrate_log_axis(g, t_lo, t_hi, k + 1.0, kappa_hi, 1.0, rule);
}

double F_alpha(double m2, double alpha, const QuadratureRule& rule) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("alpha must lie in (0, 2)");
  if (!(m2 > 0.0)) throw std::invalid_argument("F_alpha requires m2 > 0");
  const double k = 2.0 / alpha;
  const double mu = std::pow(m2, k);
  auto g = [=](double t) {
    double rat;
    double lead;
    if (t > 0.0) {
      const double u = std::exp(-t);
      rat = (u + 1.0) / ((u * u + 1.0) * (u * u + 1.0));
      lead = -2.0 * t;
    } else {
      const double sg = std::exp(t);
      rat = (1.0 + sg) / ((1.0 + sg * sg) * (1.0 + sg * sg));
      lead = t;
    }
    const double damp = 1.0 + mu * std::exp(k * t);
    return std::exp(lead) * rat / (damp * damp);
  };
  const double t_feat = -std::log(m2);  // σ where μσ^{2/α} = 1
  const double t_lo = std::min(0.0, t_feat) - rule.window;
  const double t_hi = std::max(0.0, t_feat) + rule.window;
  const double integral = integrate_log_axis(g, t_lo, t_hi, 1.0, 2.0 + 2.0 * k, 1.0, rule);
  return k * integral / (m2 * m2);
}

}  // namespace frd
