#include "frd/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace frd {

namespace {

constexpr std::size_t kMaxVolume = std::size_t{1} << 31;

std::size_t checked_volume(long side, int d) {
  std::size_t v = 1;
  for (int k = 0; k < d; ++k) {
    if (v > kMaxVolume / static_cast<std::size_t>(side))
      throw std::invalid_argument("torus volume exceeds supported size");
    v *= static_cast<std::size_t>(side);
  }
  return v;
}

// Lexicographic iteration over [-r, r]^d.
template <class F>
void for_each_in_cube(int d, long r, F&& fn) {
  Coord x(d, -r);
  while (true) {
    fn(std::span<const long>(x));
    int k = d - 1;
    while (k >= 0 && x[k] == r) {
      x[k] = -r;
      --k;
    }
    if (k < 0) break;
    ++x[k];
  }
}

}  // namespace

long ipow(long base, int exp) {
  long r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<long>::max() / base)
      throw std::overflow_error("integer power overflows");
    r *= base;
  }
  return r;
}

TorusSpec::TorusSpec(int d, int L, int N) : d_(d), L_(L), N_(N) {
  if (d < 2) throw std::invalid_argument("dimension d must be >= 2");
  if (L < 3 || L % 2 == 0) throw std::invalid_argument("L must be odd and >= 3");
  if (N < 2) throw std::invalid_argument("depth N must be >= 2");
  side_ = ipow(L, N + 1);
  volume_ = checked_volume(side_, d);
}

double TorusSpec::eps(int j) const { return std::pow(static_cast<double>(L_), -j); }

long TorusSpec::wrap(long x) const {
  long r = x % side_;
  if (r < 0) r += side_;
  return r > half() ? r - side_ : r;
}

std::size_t TorusSpec::index(std::span<const long> x) const {
  std::size_t idx = 0;
  for (int k = 0; k < d_; ++k) {
    long r = x[k] % side_;
    if (r < 0) r += side_;
    idx = idx * static_cast<std::size_t>(side_) + static_cast<std::size_t>(r);
  }
  return idx;
}

Coord TorusSpec::coords(std::size_t index) const {
  Coord x(d_);
  for (int k = d_ - 1; k >= 0; --k) {
    long r = static_cast<long>(index % static_cast<std::size_t>(side_));
    index /= static_cast<std::size_t>(side_);
    x[k] = r > half() ? r - side_ : r;
  }
  return x;
}

TorusField::TorusField(TorusSpec spec) : spec_(spec), values_(spec.volume(), 0.0) {}

TorusField::TorusField(TorusSpec spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.volume())
    throw std::invalid_argument("field size does not match torus volume");
}

TorusField& TorusField::operator+=(const TorusField& other) {
  if (!(other.spec_ == spec_)) throw std::invalid_argument("torus mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

TorusField& TorusField::operator-=(const TorusField& other) {
  if (!(other.spec_ == spec_)) throw std::invalid_argument("torus mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

TorusField& TorusField::operator*=(double factor) {
  for (double& v : values_) v *= factor;
  return *this;
}

WindowKernel::WindowKernel(int d, long radius, bool compact)
    : d_(d), radius_(radius), compact_(compact), reliable_radius_(radius) {
  if (d < 1) throw std::invalid_argument("window dimension must be >= 1");
  if (radius < 0) throw std::invalid_argument("window radius must be >= 0");
  values_.assign(checked_volume(2 * radius + 1, d), 0.0);
}

WindowKernel WindowKernel::delta(int d, long radius) {
  WindowKernel k(d, radius, true);
  Coord zero(d, 0);
  k.at(zero) = 1.0;
  return k;
}

bool WindowKernel::contains(std::span<const long> x) const {
  for (int k = 0; k < d_; ++k)
    if (x[k] < -radius_ || x[k] > radius_) return false;
  return true;
}

std::size_t WindowKernel::index(std::span<const long> x) const {
  const auto w = static_cast<std::size_t>(2 * radius_ + 1);
  std::size_t idx = 0;
  for (int k = 0; k < d_; ++k) idx = idx * w + static_cast<std::size_t>(x[k] + radius_);
  return idx;
}

Coord WindowKernel::coords(std::size_t index) const {
  const auto w = static_cast<std::size_t>(2 * radius_ + 1);
  Coord x(d_);
  for (int k = d_ - 1; k >= 0; --k) {
    x[k] = static_cast<long>(index % w) - radius_;
    index /= w;
  }
  return x;
}

double WindowKernel::value(std::span<const long> x) const {
  if (!contains(x)) {
    if (compact_) return 0.0;
    throw std::out_of_range("point outside the window of a non-compact kernel");
  }
  return values_[index(x)];
}

MultiIndex::MultiIndex(std::vector<int> orders) : l(std::move(orders)) {
  for (int v : l)
    if (v < 0) throw std::invalid_argument("multi-index entries must be >= 0");
}

MultiIndex MultiIndex::axis(int d, int k, int order) {
  std::vector<int> l(d, 0);
  l.at(k) = order;
  return MultiIndex(std::move(l));
}

int MultiIndex::order() const {
  int s = 0;
  for (int v : l) s += v;
  return s;
}

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::l1: return "l1";
    case Metric::l2: return "l2";
    case Metric::linf: return "linf";
  }
  return "?";
}

double metric_norm(std::span<const long> x, Metric m) {
  double acc = 0.0;
  for (long v : x) {
    const double a = std::abs(static_cast<double>(v));
    switch (m) {
      case Metric::l1: acc += a; break;
      case Metric::l2: acc += a * a; break;
      case Metric::linf: acc = std::max(acc, a); break;
    }
  }
  return m == Metric::l2 ? std::sqrt(acc) : acc;
}

namespace {

// Pairwise summation with a fixed split, so results do not depend on the
// caller's threading.
double pairwise_abs_sum(std::span<const double> v) {
  if (v.size() <= 64) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_abs_sum(v.subspan(0, h)) + pairwise_abs_sum(v.subspan(h));
}

Norms norms_of(std::span<const double> v) {
  Norms n;
  for (double x : v) n.sup = std::max(n.sup, std::abs(x));
  n.l1 = pairwise_abs_sum(v);
  return n;
}

}  // namespace

Norms norms(const TorusField& f) { return norms_of(f.values()); }
Norms norms(const WindowKernel& k) { return norms_of(k.values()); }

TorusField forward_diff(const TorusField& f, const MultiIndex& idx) {
  const TorusSpec& spec = f.spec();
  if (idx.dim() != spec.d()) throw std::invalid_argument("multi-index dimension mismatch");
  TorusField cur = f;
  const auto M = static_cast<std::size_t>(spec.side());
  for (int k = 0; k < spec.d(); ++k) {
    std::size_t stride = 1;
    for (int a = spec.d() - 1; a > k; --a) stride *= M;
    for (int rep = 0; rep < idx.l[k]; ++rep) {
      TorusField next(spec);
      for (std::size_t i = 0; i < cur.size(); ++i) {
        const std::size_t coord = (i / stride) % M;
        const std::size_t j = coord + 1 == M ? i - coord * stride : i + stride;
        next[i] = cur[j] - cur[i];
      }
      cur = std::move(next);
    }
  }
  return cur;
}

WindowKernel forward_diff(const WindowKernel& f, const MultiIndex& idx) {
  if (idx.dim() != f.d()) throw std::invalid_argument("multi-index dimension mismatch");
  const int d = f.d();
  if (f.compact()) {
    // Support grows by one site per difference on the low side.
    const long R = f.radius() + idx.order();
    WindowKernel out(d, R, true);
    WindowKernel cur(d, R, true);
    for (std::size_t i = 0; i < f.size(); ++i) cur.at(f.coords(i)) = f.values()[i];
    for (int k = 0; k < d; ++k) {
      for (int rep = 0; rep < idx.l[k]; ++rep) {
        WindowKernel next(d, R, true);
        for (std::size_t i = 0; i < cur.size(); ++i) {
          Coord x = cur.coords(i);
          const double here = cur.values()[i];
          x[k] += 1;
          next.values()[i] = cur.value(x) - here;
        }
        cur = std::move(next);
      }
    }
    cur.set_reliable_radius(R);
    return cur;
  }
  WindowKernel cur = f;
  long lost = 0;
  for (int k = 0; k < d; ++k) {
    for (int rep = 0; rep < idx.l[k]; ++rep) {
      WindowKernel next(d, f.radius(), false);
      for (std::size_t i = 0; i < cur.size(); ++i) {
        Coord x = cur.coords(i);
        const double here = cur.values()[i];
        x[k] += 1;
        next.values()[i] = x[k] > f.radius() ? 0.0 : cur.values()[cur.index(x)] - here;
      }
      cur = std::move(next);
    }
    lost = std::max<long>(lost, idx.l[k]);
  }
  if (f.certificate()) {
    // |Δ^l f| <= 2^{|l|} C r^{|x|_1 - |l|} outside the window.
    DecayCertificate c = *f.certificate();
    c.constant *= std::pow(2.0 / c.rate, idx.order());
    cur.set_certificate(c);
  }
  cur.set_reliable_radius(f.reliable_radius() - lost);
  return cur;
}

double certified_tail(const DecayCertificate& cert, int d, long radius) {
  const double r = cert.rate;
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("certificate rate must lie in (0,1)");
  const double full = (1.0 + r) / (1.0 - r);
  const double inner = 1.0 + 2.0 * r * (1.0 - std::pow(r, static_cast<double>(radius))) / (1.0 - r);
  // full^d - inner^d = (full - inner) * sum_k full^k inner^{d-1-k}; the gap is
  // 2 r^{R+1}/(1-r) and is computed directly to avoid cancellation.
  const double gap = 2.0 * std::pow(r, static_cast<double>(radius + 1)) / (1.0 - r);
  double sum = 0.0;
  for (int k = 0; k < d; ++k) sum += std::pow(full, k) * std::pow(inner, d - 1 - k);
  return cert.constant * gap * sum;
}

TorusField periodize(const WindowKernel& k, const TorusSpec& spec, double tail_tol) {
  if (!(tail_tol > 0.0)) throw std::invalid_argument("tail_tol must be > 0");
  if (k.d() != spec.d()) throw std::invalid_argument("kernel and torus dimensions differ");
  if (!k.compact()) {
    if (!k.certificate())
      throw std::invalid_argument("kernel support exceeds its window and carries no decay certificate");
    const double tail = certified_tail(*k.certificate(), k.d(), k.reliable_radius());
    if (tail > tail_tol)
      throw std::invalid_argument("decay certificate too weak to reach tail_tol");
  }
  TorusField out(spec);
  const long M = spec.side();
  const long R = k.reliable_radius();
  // Shell |n|_inf = s holds the translates that can reach the window.
  const long shells = (R + spec.half()) / M + 1;
  for (long s = 0; s <= shells; ++s) {
    for_each_in_cube(spec.d(), s, [&](std::span<const long> n) {
      long ninf = 0;
      for (long v : n) ninf = std::max(ninf, std::abs(v));
      if (ninf != s) return;
      // Points x in the cube with x + M n inside the reliable window.
      Coord y(spec.d());
      for_each_in_cube(spec.d(), spec.half(), [&](std::span<const long> x) {
        bool inside = true;
        for (int a = 0; a < spec.d(); ++a) {
          y[a] = x[a] + M * n[a];
          if (y[a] < -R || y[a] > R) inside = false;
        }
        if (inside) out.at(x) += k.values()[k.index(y)];
      });
    });
  }
  return out;
}

namespace {

long range_from_points(double max_norm, bool any, Metric m) {
  if (!any) return 0;
  if (m == Metric::l2) return static_cast<long>(std::floor(max_norm)) + 1;
  return static_cast<long>(std::llround(max_norm)) + 1;
}

}  // namespace

long range_of(const WindowKernel& k, Metric m, double eps) {
  if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
  double best = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (std::abs(k.values()[i]) > eps) {
      const Coord x = k.coords(i);
      best = std::max(best, metric_norm(x, m));
      any = true;
    }
  }
  return range_from_points(best, any, m);
}

long range_of(const TorusField& f, Metric m, double eps) {
  if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
  double best = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) > eps) {
      const Coord x = f.spec().coords(i);
      best = std::max(best, metric_norm(x, m));
      any = true;
    }
  }
  return range_from_points(best, any, m);
}

namespace {

void write_header(std::ostream& os, int d) {
  for (int k = 0; k < d; ++k) os << 'x' << (k + 1) << ',';
  os << "value\n";
}

void write_row(std::ostream& os, std::span<const long> x, double v) {
  for (long c : x) os << c << ',';
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf << '\n';
}

}  // namespace

void write_csv(std::ostream& os, const TorusField& f) {
  write_header(os, f.spec().d());
  for_each_in_cube(f.spec().d(), f.spec().half(),
                   [&](std::span<const long> x) { write_row(os, x, f.at(x)); });
}

void write_csv(std::ostream& os, const WindowKernel& k) {
  write_header(os, k.d());
  for_each_in_cube(k.d(), k.radius(),
                   [&](std::span<const long> x) { write_row(os, x, k.values()[k.index(x)]); });
}

TorusField read_csv(std::istream& is, const TorusSpec& spec) {
  TorusField f(spec);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty kernel CSV");
  std::size_t rows = 0;
  Coord x(spec.d());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (int k = 0; k < spec.d(); ++k) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("short CSV row");
      x[k] = std::stol(cell);
    }
    if (!std::getline(ss, cell, ',')) throw std::runtime_error("missing CSV value");
    f.at(x) = std::stod(cell);
    ++rows;
  }
  if (rows != spec.volume()) throw std::runtime_error("CSV does not cover the fundamental cube");
  return f;
}

}  // namespace frd
