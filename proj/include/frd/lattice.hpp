#pragma once

// Torus and lattice geometry: fields on the fundamental cube, window kernels on
// Z^d, forward differences, norms, ranges and periodization.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace frd {

using Coord = std::vector<long>;

/// Geometry of the torus Z^d / L^{N+1} Z^d.
///
/// Points are represented by the centered fundamental cube
/// [-(M-1)/2, (M-1)/2]^d with M = L^{N+1}; since L is odd, M is odd and the
/// reflection x -> -x maps the cube onto itself.
class TorusSpec {
 public:
  /// Smallest admissible torus (d = 2, L = 3, N = 2).
  TorusSpec() : TorusSpec(2, 3, 2) {}
  TorusSpec(int d, int L, int N);

  int d() const { return d_; }
  int L() const { return L_; }
  int N() const { return N_; }
  long side() const { return side_; }
  long half() const { return (side_ - 1) / 2; }
  std::size_t volume() const { return volume_; }
  /// Nested-lattice increment eps_j = L^{-j}.
  double eps(int j) const;

  /// Centered representative of an arbitrary integer coordinate.
  long wrap(long x) const;
  std::size_t index(std::span<const long> x) const;
  Coord coords(std::size_t index) const;

  bool operator==(const TorusSpec& other) const = default;

 private:
  int d_;
  int L_;
  int N_;
  long side_;
  std::size_t volume_;
};

/// Integer power with overflow check.
long ipow(long base, int exp);

/// A real function on T_{N+1}. Storage uses transform order: the index along
/// each axis is x mod M, axis 0 slowest.
class TorusField {
 public:
  TorusField() : TorusField(TorusSpec()) {}
  explicit TorusField(TorusSpec spec);
  TorusField(TorusSpec spec, std::vector<double> values);

  const TorusSpec& spec() const { return spec_; }
  double at(std::span<const long> x) const { return values_[spec_.index(x)]; }
  double& at(std::span<const long> x) { return values_[spec_.index(x)]; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }

  TorusField& operator+=(const TorusField& other);
  TorusField& operator-=(const TorusField& other);
  TorusField& operator*=(double factor);

 private:
  TorusSpec spec_;
  std::vector<double> values_;
};

/// Certifies |f(x)| <= constant * rate^{|x|_1} outside the stored window.
struct DecayCertificate {
  double rate = 0.0;
  double constant = 0.0;
};

/// A kernel on Z^d stored on the window |x|_inf <= radius.
///
/// A compact kernel vanishes identically outside the window. Otherwise the
/// kernel must carry a decay certificate to be periodized.
class WindowKernel {
 public:
  WindowKernel(int d, long radius, bool compact = true);

  int d() const { return d_; }
  long radius() const { return radius_; }
  bool compact() const { return compact_; }
  const std::optional<DecayCertificate>& certificate() const { return certificate_; }
  void set_certificate(DecayCertificate cert) { certificate_ = cert; }
  /// Radius within which stored values are exact. Equal to radius() unless
  /// forward differences of a non-compact kernel consumed part of the window.
  long reliable_radius() const { return reliable_radius_; }
  void set_reliable_radius(long r) { reliable_radius_ = r; }

  bool contains(std::span<const long> x) const;
  std::size_t index(std::span<const long> x) const;
  Coord coords(std::size_t index) const;
  /// Value at x; zero outside the window for compact kernels.
  double value(std::span<const long> x) const;
  double& at(std::span<const long> x) { return values_[index(x)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }

  static WindowKernel delta(int d, long radius = 0);

 private:
  int d_;
  long radius_;
  bool compact_;
  long reliable_radius_;
  std::optional<DecayCertificate> certificate_;
  std::vector<double> values_;
};

struct MultiIndex {
  std::vector<int> l;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> orders);
  static MultiIndex zero(int d) { return MultiIndex(std::vector<int>(d, 0)); }
  static MultiIndex axis(int d, int k, int order = 1);
  int order() const;
  int dim() const { return static_cast<int>(l.size()); }
};

enum class Metric { l1, l2, linf };

const char* metric_name(Metric m);
double metric_norm(std::span<const long> x, Metric m);

struct Norms {
  double sup = 0.0;
  double l1 = 0.0;
};

Norms norms(const TorusField& f);
Norms norms(const WindowKernel& k);

/// Iterated forward differences (f(x+e_k) - f(x)), l_k times along axis k.
TorusField forward_diff(const TorusField& f, const MultiIndex& idx);
/// Compact kernels grow by idx.l[k] on the low side of axis k so the result is
/// exact; non-compact kernels keep their window and lose reliable radius.
WindowKernel forward_diff(const WindowKernel& f, const MultiIndex& idx);

/// Sum over translates by M Z^d. Translates are added shell by shell in
/// |n|_inf. For non-compact kernels the certificate bounds the contribution
/// of everything outside the window; it must come in below tail_tol.
TorusField periodize(const WindowKernel& k, const TorusSpec& spec, double tail_tol);

/// Certified sup-norm bound on the part of a certified kernel outside its
/// window: C * ((1+r)/(1-r))^d - C * (1 + 2r(1-r^R)/(1-r))^d.
double certified_tail(const DecayCertificate& cert, int d, long radius);

/// Smallest R with |k(x)| <= eps for every |x|_metric >= R. Torus distances
/// use the centered representative, which minimizes every metric when M is odd.
long range_of(const WindowKernel& k, Metric m, double eps);
long range_of(const TorusField& f, Metric m, double eps);

/// CSV with header x1,...,xd,value in lexicographic order over the cube.
void write_csv(std::ostream& os, const TorusField& f);
void write_csv(std::ostream& os, const WindowKernel& k);
TorusField read_csv(std::istream& is, const TorusSpec& spec);

}  // namespace frd
