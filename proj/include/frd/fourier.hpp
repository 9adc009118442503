#pragma once

// Discrete Fourier analysis on the torus.
//
//   f̂(p) = Σ_x f(x) e^{-ip·x},   f(x) = |Q|^{-1} Σ_p f̂(p) e^{ip·x},
//
// with p = (2π/M) q over the centered cube. Coefficient arrays use the same
// transform order as TorusField (index along each axis = q mod M).

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "frd/lattice.hpp"

namespace frd {

using Complex = std::complex<double>;

class MomentumGrid {
 public:
  explicit MomentumGrid(TorusSpec spec) : spec_(spec) {}

  const TorusSpec& spec() const { return spec_; }
  std::size_t size() const { return spec_.volume(); }
  /// Centered integer label q of a grid index.
  Coord label(std::size_t index) const { return spec_.coords(index); }
  std::vector<double> momentum(std::size_t index) const;
  /// Σ_k 4 sin²(p_k/2) at a grid index.
  double lambda(std::size_t index) const;

 private:
  TorusSpec spec_;
};

struct ComplexField {
  TorusSpec spec;
  std::vector<Complex> values;

  explicit ComplexField(TorusSpec s) : spec(s), values(s.volume()) {}
};

ComplexField dft(const TorusField& f);
ComplexField dft(const ComplexField& f);
/// Inverse transform; the imaginary part is dropped for the real overload.
TorusField idft_real(const ComplexField& coeffs);
ComplexField idft(const ComplexField& coeffs);
/// Inverse transform of a real coefficient array given in transform order.
TorusField idft_real(const TorusSpec& spec, std::span<const double> coeffs);

/// Max over grid momenta of |dft(periodize(k)) - Σ_x k(x) e^{-ip·x}|.
double poisson_consistency(const WindowKernel& k, const TorusSpec& spec, double tail_tol);

struct DecayFit {
  double C = 0.0;
  double k = 0.0;
  double residual = 0.0;  // rms of the log fit
  std::size_t used = 0;
  std::size_t excluded = 0;  // coefficients below 1e-300
  bool majorizes = false;
  /// (l, 2k > d + l + 1) for each requested order.
  std::vector<std::pair<int, bool>> adequate;
};

/// Fit |ĝ(p)| <= C (1 + (L^N |p|)²)^{-k} over nonzero momenta, then inflate C
/// so the envelope holds at every grid momentum.
DecayFit decay_fit(const TorusSpec& spec, std::span<const double> coeffs, int N,
                   const std::vector<int>& orders);

/// CSV with header q1,...,qd,re,im in lexicographic order over the cube.
void write_coefficients_csv(std::ostream& os, const ComplexField& c);

}  // namespace frd
