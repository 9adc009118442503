#pragma once

// Spectral density of the fractional resolvent and quadrature against it.
//
//   ((-Δ)^{α/2} + m²)^{-1} = ∫_0^∞ ds ρ_α(s, m²) (s - Δ)^{-1}
//
// Integrals are computed in t = log σ with s^{α/2} = m² σ (or t = log s when
// m² = 0) on uniform panels of fixed-order Gauss-Legendre nodes.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace frd {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpectralParams {
  double alpha;
  double m2;

  SpectralParams(double alpha, double m2);

  /// sin(πα/2)/π
  double sin_factor() const;
  /// cos(πα/2)
  double cos_factor() const;
  /// Torus resolvents exist only for m² > 0.
  void require_resolvent() const;
  /// Mass-derivative and continuity bounds need 1 < α < 2.
  void require_continuity() const;
};

struct ScalingExponents {
  double phi_dim;  // (d - α)/2
  double two_phi;  // d - α

  static ScalingExponents make(int d, double alpha);
};

struct QuadratureRule {
  double rel_tol = 1e-9;
  int max_panels = 4096;
  int order = 16;
  /// Extra width in t beyond the outermost feature on each side.
  double window = 30.0;

  void validate() const;
};

double rho(double s, const SpectralParams& P);
double rho_dm2(double s, const SpectralParams& P);
double denominator(double s, const SpectralParams& P);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_rule(int order);

/// A node set in s with weights for ∫ρ f ds and ∫∂ρ/∂m² f ds. Built once
/// per (params, scope) and shared by every symbol integrated against it.
struct SpectralNodes {
  std::vector<double> s;
  std::vector<double> w_rho;
  std::vector<double> w_dm2;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double panel_width = 0.0;
  int panels = 0;
  double error_estimate = 0.0;

  std::size_t size() const { return s.size(); }
  double integrate(const std::function<double(double)>& f) const;
  double integrate_dm2(const std::function<double(double)>& f) const;
};

/// Nodes resolving features of the integrand at s ∈ [s_lo, s_hi]. The panel
/// width is halved until probe integrals (Stieltjes resolvents with closed
/// forms and exponential cutoffs at the scope scales) agree to rel_tol.
SpectralNodes spectral_nodes(const SpectralParams& P, const QuadratureRule& rule, double s_lo,
                             double s_hi);

/// Nodes on a fixed panel layout in t (no convergence loop).
SpectralNodes layout_spectral_nodes(const SpectralParams& P, const QuadratureRule& rule,
                                    double t_lo, double t_hi, int panels);

/// Declared behaviour |f(s)| <= C s^a (1+s)^b, with the features of f
/// located in [scale_lo, scale_hi].
struct PowerEnvelope {
  double a = 0.0;
  double b = 0.0;
  double scale_lo = 1.0;
  double scale_hi = 1.0;
};

/// ∫_0^∞ ρ_α(s, m²) f(s) ds with tail corrections from the envelope powers.
double integrate_rho(const SpectralParams& P, const std::function<double(double)>& f,
                     const PowerEnvelope& env, const QuadratureRule& rule);
/// Same with ∂ρ/∂m² in place of ρ (requires m² > 0).
double integrate_rho_dm2(const SpectralParams& P, const std::function<double(double)>& f,
                         const PowerEnvelope& env, const QuadratureRule& rule);

/// ∫_{-∞}^{∞} g(t) dt where g ~ e^{κ_lo t} below t_lo and e^{-κ_hi t} above
/// t_hi. Panels are halved until successive results agree to rel_tol.
double integrate_log_axis(const std::function<double(double)>& g, double t_lo, double t_hi,
                          double kappa_lo, double kappa_hi, double h0,
                          const QuadratureRule& rule);

struct StieltjesResult {
  double value;
  double exact;
  double rel_err;
};

StieltjesResult stieltjes_check(double lambda, const SpectralParams& P,
                                const QuadratureRule& rule);

/// H_α(μ) = ∫_0^∞ dσ σ^{2/α}(1+σ)/(1+σ²)² (1+μσ^{2/α})^{-1}, 1 < α < 2.
double H_alpha(double mu, double alpha, const QuadratureRule& rule);
/// F_α(m²) = ∫_0^∞ ds s^{α/2-1}(m²+s^{α/2})/(s^α+m⁴)² (1+s)^{-2}, computed in
/// the σ variable: (2/α)(m²)^{-2} ∫dσ (1+σ)/(1+σ²)² (1+μσ^{2/α})^{-2}.
double F_alpha(double m2, double alpha, const QuadratureRule& rule);

}  // namespace frd
