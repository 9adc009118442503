#pragma once

// Z^d evaluation of single pieces via Brillouin-zone quadrature.
//
// A block [Ta, Tb) of the α-level decomposition has symbol h(λ) concentrated
// in |p| <~ Ta^{-1/2}, so its Z^d kernel and forward differences are
//
//   ∂^l Γ(x) = (2π)^{-d} ∫ h(λ(p)) Π_k (e^{ip_k} - 1)^{l_k} e^{ip·x} dp
//
// evaluated with a midpoint rule on the box [-P, P]^d. Values are taken on
// the x_1 axis and on the (x_1, x_2) diagonal, which together with the origin
// form the evaluation set for sup norms.

#include <array>
#include <vector>

#include "frd/kernels.hpp"
#include "frd/spectral.hpp"
#include "frd/walk.hpp"

namespace frd {

struct WindowConfig {
  int n = 512;
  int n_ref = 768;
  double box_factor = 20.0;  // P = min(π, box_factor / √Ta)
  int table_size = 8192;
  double reach = 5.0;  // R = reach √Tb
};

/// Values of one kernel along the evaluation lines, t ∈ [-R, R].
struct DerivativeProfile {
  std::array<std::vector<double>, 3> axis;  // ∂_1^k Γ(t e_1), k = 0, 1, 2
  std::vector<double> mixed_axis;           // ∂_1∂_2 Γ(t e_1)
  std::vector<double> mixed_diag;           // ∂_1∂_2 Γ(t (e_1 + e_2))

  /// Max |∂^p Γ| over the evaluation set for total order p <= 2.
  double sup(int p) const;
};

struct WindowStudy {
  int d = 0;
  long Ta = 0;
  long Tb = 0;
  double box = 0.0;
  long R = 0;
  int n = 0;
  DerivativeProfile value;
  DerivativeProfile dm2;
  /// max over p and channel of |sup_n - sup_nref| / sup_nref
  double refine_defect = 0.0;
  double seconds = 0.0;
};

/// Profiles of the block [Ta, Tb) integrated against the given spectral
/// nodes, plus the same for its m²-derivative.
WindowStudy window_study(int d, long Ta, long Tb, const SpectralNodes& nodes,
                         const WindowConfig& cfg);

/// Profiles from a tabulated symbol on one midpoint grid.
std::array<DerivativeProfile, 2> window_profiles(int d, const MidpointGrid& grid,
                                                 const RadialSymbolTable& table, long R);

/// Max |a - b| over the evaluation set, order p.
double profile_difference(const DerivativeProfile& a, const DerivativeProfile& b, int p);

/// Spectral nodes for window studies of blocks up to T_max.
SpectralNodes window_nodes(int d, long T_max, const SpectralParams& P, const QuadratureRule& rule);

}  // namespace frd
