#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "frd/lattice.hpp"

using namespace frd;

namespace {

TorusField random_field(const TorusSpec& spec, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TorusField f(spec);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(gen);
  return f;
}

long l1(std::span<const long> x) {
  long s = 0;
  for (long v : x) s += std::abs(v);
  return s;
}

}  // namespace

TEST(TorusSpec, Geometry) {
  const TorusSpec s(2, 3, 2);
  EXPECT_EQ(s.side(), 27);
  EXPECT_EQ(s.half(), 13);
  EXPECT_EQ(s.volume(), 729u);
  EXPECT_DOUBLE_EQ(s.eps(2), 1.0 / 9.0);
  EXPECT_EQ(TorusSpec(3, 5, 2).volume(), 125u * 125u * 125u);
}

TEST(TorusSpec, RejectsInvalid) {
  EXPECT_THROW(TorusSpec(1, 3, 2), std::invalid_argument);
  EXPECT_THROW(TorusSpec(2, 4, 2), std::invalid_argument);
  EXPECT_THROW(TorusSpec(2, 3, 1), std::invalid_argument);
  EXPECT_THROW(TorusSpec(3, 9, 4), std::invalid_argument);  // volume
}

TEST(TorusSpec, WrapAndIndexRoundTrip) {
  const TorusSpec s(2, 3, 2);
  EXPECT_EQ(s.wrap(27), 0);
  EXPECT_EQ(s.wrap(14), -13);
  EXPECT_EQ(s.wrap(-14), 13);
  for (std::size_t i = 0; i < s.volume(); ++i) EXPECT_EQ(s.index(s.coords(i)), i);
  // transform order: x mod M, axis 0 slowest
  const Coord x{-1, 2};
  EXPECT_EQ(s.index(x), 26u * 27u + 2u);
}

TEST(ForwardDiff, TorusMatchesDirectDifference) {
  const TorusSpec s(2, 3, 2);
  const TorusField f = random_field(s, 1);
  const TorusField g = forward_diff(f, MultiIndex({1, 2}));
  for (std::size_t i = 0; i < s.volume(); ++i) {
    Coord x = s.coords(i);
    auto at = [&](long a, long b) {
      Coord y{s.wrap(x[0] + a), s.wrap(x[1] + b)};
      return f.at(y);
    };
    // Δ_1 Δ_2² f
    const double ref = (at(1, 2) - 2 * at(1, 1) + at(1, 0)) - (at(0, 2) - 2 * at(0, 1) + at(0, 0));
    EXPECT_NEAR(g[i], ref, 1e-14);
  }
}

TEST(ForwardDiff, CompactWindowGrowsAndStaysExact) {
  const WindowKernel d = WindowKernel::delta(2, 0);
  const WindowKernel g = forward_diff(d, MultiIndex::axis(2, 0));
  EXPECT_EQ(g.radius(), 1);
  EXPECT_DOUBLE_EQ(g.value(Coord{0, 0}), -1.0);
  EXPECT_DOUBLE_EQ(g.value(Coord{-1, 0}), 1.0);
  double sum = 0.0;
  for (double v : g.values()) sum += v;
  EXPECT_EQ(sum, 0.0);
}

TEST(ForwardDiff, NonCompactLosesReliableRadius) {
  WindowKernel k(2, 5, false);
  k.set_certificate({0.5, 1.0});
  const WindowKernel g = forward_diff(k, MultiIndex({2, 1}));
  EXPECT_EQ(g.reliable_radius(), 3);
  EXPECT_DOUBLE_EQ(g.certificate()->constant, std::pow(4.0, 3));
}

TEST(Norms, PairwiseSum) {
  TorusField f(TorusSpec(2, 3, 2));
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = (i % 2 ? -1.0 : 1.0) * 0.1;
  const Norms n = norms(f);
  EXPECT_DOUBLE_EQ(n.sup, 0.1);
  EXPECT_NEAR(n.l1, 72.9, 1e-12);
}

TEST(CertifiedTail, MatchesBruteForceGeometricSum) {
  // Σ over |x|_inf > R of C r^{|x|_1}, summed directly on a large box
  for (int d : {1, 2, 3}) {
    const double C = 1.7, r = 0.5;
    const long R = 6, big = 80;
    double brute = 0.0;
    Coord x(d, -big);
    while (true) {
      long inf = 0;
      for (long v : x) inf = std::max(inf, std::abs(v));
      if (inf > R) brute += C * std::pow(r, static_cast<double>(l1(x)));
      int a = 0;
      while (a < d && ++x[a] > big) x[a++] = -big;
      if (a == d) break;
    }
    EXPECT_NEAR(certified_tail({r, C}, d, R), brute, 1e-12 * brute) << "d=" << d;
  }
}

TEST(Periodize, CompactKernelWrapsLikeBruteForce) {
  const TorusSpec s(2, 3, 1 + 1);  // M = 27
  WindowKernel k(2, 15, true);  // wider than the torus half side
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& v : k.values()) v = u(gen);
  const TorusField p = periodize(k, s, 1e-300);
  TorusField ref(s);
  for (std::size_t i = 0; i < k.size(); ++i) {
    Coord x = k.coords(i);
    for (long& v : x) v = s.wrap(v);
    ref.at(x) += k.values()[i];
  }
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], ref[i], 1e-14);
}

TEST(Periodize, CertifiedGeometricKernelWithinTail) {
  // k(x) = 0.5^{|x|_1} stored on a window; the exact periodization is a
  // product of 1-d geometric lattice sums.
  const TorusSpec s(2, 3, 2);
  const double r = 0.5;
  const long R = 60;
  WindowKernel k(2, R, false);
  for (std::size_t i = 0; i < k.size(); ++i) k.values()[i] = std::pow(r, static_cast<double>(l1(k.coords(i))));
  k.set_certificate({r, 1.0});
  const double tol = 1e-12;
  const TorusField p = periodize(k, s, tol);
  const long M = s.side();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Coord x = s.coords(i);
    double ref = 1.0;
    for (long v : x) {
      // Σ_n r^{|v + nM|} = (r^{|v|} + r^{M-|v|}) / (1 - r^M)
      const double a = std::abs(static_cast<double>(v));
      ref *= (std::pow(r, a) + std::pow(r, M - a)) / (1.0 - std::pow(r, static_cast<double>(M)));
    }
    EXPECT_NEAR(p[i], ref, tol);
  }
}

TEST(Periodize, RequiresCertificateOrCompactSupport) {
  const TorusSpec s(2, 3, 2);
  WindowKernel k(2, 4, false);
  EXPECT_THROW(periodize(k, s, 1e-12), std::invalid_argument);
  k.set_certificate({0.9, 1.0});
  EXPECT_THROW(periodize(k, s, 1e-12), std::invalid_argument);
}

TEST(Range, DeltaAndBox) {
  EXPECT_EQ(range_of(WindowKernel::delta(2, 3), Metric::l1, 0.0), 1);
  EXPECT_EQ(range_of(WindowKernel(2, 3), Metric::l1, 0.0), 0);
  WindowKernel box(2, 5);
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Coord x = box.coords(i);
    if (std::abs(x[0]) <= 3 && std::abs(x[1]) <= 3) box.values()[i] = 1.0;
  }
  EXPECT_EQ(range_of(box, Metric::linf, 0.5), 4);
  EXPECT_EQ(range_of(box, Metric::l1, 0.5), 7);
  EXPECT_EQ(range_of(box, Metric::l2, 0.5), 5);  // floor(3√2) + 1
}

TEST(Csv, RoundTripIsExact) {
  const TorusSpec s(2, 3, 2);
  const TorusField f = random_field(s, 9);
  std::stringstream ss;
  write_csv(ss, f);
  const TorusField g = read_csv(ss, s);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(f[i], g[i]);
}
