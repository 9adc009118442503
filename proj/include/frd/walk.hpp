#pragma once

// Finite-range decomposition of the lattice resolvent (s - Δ)^{-1} by blocking
// the Neumann series of the lazy random walk:
//
//   (s - Δ)^{-1} = (s+4d)^{-1} Σ_n θ^n P'^n,   P' = (I + P)/2,  θ = 4d/(s+4d).
//
// Block j sums n ∈ [T_j, T_{j+1}); the tail n >= T_N is the remainder.

#include <span>
#include <string>
#include <vector>

#include "frd/lattice.hpp"

namespace frd {

/// Σ_k 4 sin²(p_k/2).
double laplacian_symbol(std::span<const double> p);
/// Laplacian symbol at the torus momentum (2π/M) q. The terms are added in
/// order of sorted |q_k|, so every point of a symmetry orbit gets the same bits.
double laplacian_symbol_q(std::span<const long> q, long M);
/// 1 - λ/(4d)
double lazy_symbol(double lambda, int d);
/// 4d/(s + 4d)
double theta(double s, int d);

struct BlockSchedule {
  std::vector<long> T;  // T_0 = 0 < T_1 < ... < T_N

  BlockSchedule() = default;
  explicit BlockSchedule(std::vector<long> cuts);
  /// T_j = L^{2j} for j >= 1.
  static BlockSchedule standard(int L, int N);
  int blocks() const { return static_cast<int>(T.size()) - 1; }
};

/// log(θμ) = log1p(-λ/4d) - log1p(s/4d), with μ = 0 mapped to -inf.
double log_theta_mu(double lambda, double s, int d);

/// (s+4d)^{-1} Σ_{n=Ta}^{Tb-1} (θμ)^n, evaluated as
/// (θμ)^{Ta} (1 - (θμ)^{Tb-Ta}) / (s + λ) through exp/expm1 of log(θμ).
double block_symbol(double lambda, double s, long Ta, long Tb, int d);
/// (θμ)^{T_N} / (s + λ)
double tail_symbol(double lambda, double s, long TN, int d);

/// All N block symbols followed by the tail symbol at one (λ, s).
void schedule_symbols(double lambda, double s, const BlockSchedule& schedule, int d,
                      std::span<double> out);

struct ScaleKernelS {
  int j = 0;
  double s = 0.0;
  TorusField kernel;
  long exact_range = 0;     // T_{j+1} - 1 in l1
  long eps_range = 0;       // measured at 1e-12 x sup, l1
  bool resolvable = false;  // 2 T_{j+1} < M
  std::string warning;
};

/// Inverse transform of the block symbol over the torus momentum grid.
ScaleKernelS build_block_kernel(const TorusSpec& spec, int j, double s,
                                const BlockSchedule& schedule);

/// The same block on Z^d by real-space iteration of the step kernel; the
/// window has radius T_{j+1} - 1 and holds the whole support.
WindowKernel build_block_window(int d, int j, double s, const BlockSchedule& schedule);

/// n-fold convolution power of the lazy step kernel (1/2 at the origin,
/// 1/(4d) at each neighbour) on a window of the given radius.
WindowKernel convolution_power_oracle(int d, int n, long radius, int n_max = 100000);

/// One application of the lazy step kernel to a compact window kernel whose
/// support stays inside the window.
WindowKernel lazy_step(const WindowKernel& k);

}  // namespace frd
