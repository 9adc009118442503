#pragma once

// Finite-range decomposition of ((-Δ)^{α/2} + m²)^{-1} on the torus:
//
//   G_{α,T} = Σ_{j<N} Γ̃_{j,α} + 𝒢̃_{N,α},
//   Γ̃_{j,α} = ∫ρ_α(s, m²) Γ̃_j(·, s) ds.
//
// Symbols are integrated per momentum on one shared spectral node set and
// transformed once.

#include <optional>
#include <string>
#include <vector>

#include "frd/lattice.hpp"
#include "frd/spectral.hpp"
#include "frd/walk.hpp"

namespace frd {

struct RangeReport {
  long exact = 0;  // T_{j+1} - 1 (l1)
  bool resolvable = false;
  long eps_l1 = 0;
  long eps_l2 = 0;
  long eps_linf = 0;
};

struct AlphaScaleKernel {
  int j = 0;
  SpectralParams params{1.0, 1.0};
  ScalingExponents exponents{};
  long Ta = 0;
  long Tb = 0;
  TorusField kernel;
  std::vector<double> symbol;
  RangeReport ranges;
  double quad_error = 0.0;
  std::size_t quad_nodes = 0;
};

struct TorusRemainder {
  int N = 0;
  SpectralParams params{1.0, 1.0};
  TorusField field;
  std::vector<double> symbol;
};

struct Decomposition {
  TorusSpec spec;
  SpectralParams params;
  QuadratureRule rule;
  BlockSchedule schedule;
  std::vector<AlphaScaleKernel> pieces;
  TorusRemainder remainder;
  /// (λ^{α/2} + m²)^{-1} and its transform.
  std::vector<double> exact_symbol;
  TorusField exact;
  /// ∫ρ/(s+λ) on the shared nodes.
  std::vector<double> quadrature_resolvent;
  /// Filled when built with mass derivatives.
  std::vector<AlphaScaleKernel> dm2_pieces;
  std::optional<TorusRemainder> dm2_remainder;
  /// The shared node set; its panel layout can be reused at nearby masses.
  SpectralNodes nodes;
  std::size_t quad_nodes = 0;
  double quad_panel_width = 0.0;
  double quad_error = 0.0;
  double build_seconds = 0.0;

  /// Pieces then remainder, added left to right in index order.
  TorusField total() const;
};

struct AssembleOptions {
  bool mass_derivatives = false;
  /// Reuse this node layout (rebuilt for the current params) instead of
  /// running the convergence loop; keeps finite differences in m² smooth.
  const SpectralNodes* layout = nullptr;
};

/// Spectral nodes covering the torus: λ from 4 sin²(π/M) to 4d and block
/// cutoffs 4d/T_j.
SpectralNodes decomposition_nodes(int d, double lambda_min, const SpectralParams& P,
                                  const QuadratureRule& rule, const BlockSchedule& schedule);
/// The node layout of `ref` (same t panels) for different params.
SpectralNodes relayout_nodes(const SpectralNodes& ref, const SpectralParams& P,
                             const QuadratureRule& rule);

std::vector<double> exact_resolvent_symbol(const TorusSpec& spec, const SpectralParams& P);
TorusField exact_torus_resolvent(const TorusSpec& spec, const SpectralParams& P);

Decomposition assemble(const TorusSpec& spec, const SpectralParams& P, const QuadratureRule& rule,
                       const BlockSchedule& schedule, const AssembleOptions& opts = {});

AlphaScaleKernel build_piece(int j, const TorusSpec& spec, const SpectralParams& P,
                             const QuadratureRule& rule, const BlockSchedule& schedule);
TorusRemainder build_remainder(const TorusSpec& spec, const SpectralParams& P,
                               const QuadratureRule& rule, const BlockSchedule& schedule);

/// ∂/∂m² of a piece or of the remainder, integrated against ∂ρ/∂m².
AlphaScaleKernel mass_derivative(const AlphaScaleKernel& piece, const TorusSpec& spec,
                                 const QuadratureRule& rule, const BlockSchedule& schedule);
TorusRemainder mass_derivative(const TorusRemainder& rem, const TorusSpec& spec,
                               const QuadratureRule& rule, const BlockSchedule& schedule);

struct CoarseDecomposition {
  int r = 1;
  long L_prime = 0;
  std::vector<TorusField> pieces;
  /// Fine pieces past the last full group of r, carried separately.
  std::vector<TorusField> folded;
  TorusField remainder;

  TorusField total() const;
};

/// Γ̃'_j = Σ_{l<r} Γ̃_{l+jr}, summed in increasing l.
CoarseDecomposition coarse_grain(const Decomposition& dec, int r);

/// L^{2j[φ]} Γ̃_{j,α}(L^{j-q} k) for the lattice points k of (ε_q Z)^d that fit
/// in the torus cube; compact window with radius floor(half / L^{j-q}).
WindowKernel rescaled_view(const AlphaScaleKernel& piece, int L, int q);

RangeReport measure_ranges(const TorusField& kernel, long Tb);

}  // namespace frd
