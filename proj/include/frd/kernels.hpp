#pragma once

// Data-parallel kernels with serial references.
//
// Every symbol in this library is a function of λ(p) alone, so torus
// tabulation only evaluates one representative per orbit of coordinate
// permutations and reflections. The serial versions evaluate every point and
// exist for testing and benchmarking.

#include <cmath>
#include <functional>
#include <vector>

#include "frd/lattice.hpp"

namespace frd {

/// Writes `channels` symbol values at one λ.
using SymbolFn = std::function<void(double lambda, double* out)>;

/// channel-major tables over the torus momentum grid, transform order.
using SymbolTables = std::vector<std::vector<double>>;

SymbolTables tabulate_symbols(const TorusSpec& spec, const SymbolFn& fn, int channels);
SymbolTables tabulate_symbols_serial(const TorusSpec& spec, const SymbolFn& fn, int channels);

/// Number of symmetry orbits visited by tabulate_symbols.
std::size_t orbit_count(const TorusSpec& spec);

/// Symbol channels tabulated on a uniform grid in v = √λ and interpolated
/// with 4-point Lagrange. Symbols here are smooth and even in v.
class RadialSymbolTable {
 public:
  RadialSymbolTable(const SymbolFn& fn, int channels, double lambda_max, int size,
                    bool parallel = true);

  int channels() const { return channels_; }
  double lambda_max() const { return lambda_max_; }

  void eval(double lambda, double* out) const {
    const double v = std::sqrt(std::min(std::max(lambda, 0.0), lambda_max_));
    const double x = v / dv_;
    long i = static_cast<long>(x);
    if (i > size_ - 2) i = size_ - 2;
    const double f = x - static_cast<double>(i);
    // nodes i-1, i, i+1, i+2 at offsets -1, 0, 1, 2
    const double w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
    const double w1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    const double w2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
    const double w3 = (f + 1.0) * f * (f - 1.0) / 6.0;
    // data_ starts one ghost row before v = 0
    const double* r = data_.data() + static_cast<std::size_t>(i) * channels_;
    for (int c = 0; c < channels_; ++c)
      out[c] = w0 * r[c] + w1 * r[channels_ + c] + w2 * r[2 * channels_ + c] + w3 * r[3 * channels_ + c];
  }

 private:
  int channels_;
  double lambda_max_;
  long size_;
  double dv_;
  std::vector<double> data_;
};

/// Midpoint grid on [-P, P] with n (even) points.
struct MidpointGrid {
  int n;
  double P;
  double dp;
  std::vector<double> p;
  std::vector<double> lam1;  // 4 sin²(p/2)

  MidpointGrid(int n, double P);
};

/// g2[(i n + k) channels + c] = Σ over the remaining d-2 axes of h(λ1_i + λ1_k + ...).
std::vector<double> window_marginal(const MidpointGrid& grid, const RadialSymbolTable& table,
                                    int d);
std::vector<double> window_marginal_serial(const MidpointGrid& grid,
                                           const RadialSymbolTable& table, int d);

/// Worker count used by the parallel kernels.
int worker_count();
void set_worker_count(int n);

}  // namespace frd
