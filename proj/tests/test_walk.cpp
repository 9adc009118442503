#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "frd/fourier.hpp"
#include "frd/walk.hpp"

using namespace frd;

namespace {

// (s+4d)^{-1} Σ_{n=Ta}^{Tb-1} (θμ)^n by direct summation in long double.
double series_block(double lambda, double s, long Ta, long Tb, int d) {
  const long double fd = 4.0L * d;
  const long double q = (fd / (s + fd)) * (1.0L - lambda / fd);
  long double acc = 0.0L, qn = std::pow(q, static_cast<long double>(Ta));
  for (long n = Ta; n < Tb; ++n) {
    acc += qn;
    qn *= q;
  }
  return static_cast<double>(acc / (s + fd));
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  unsigned long long c = 1;
  for (int i = 1; i <= k; ++i) c = c * static_cast<unsigned long long>(n - k + i) / static_cast<unsigned long long>(i);
  return static_cast<double>(c);
}

}  // namespace

TEST(LaplacianSymbol, ValuesAndOrbitInvariance) {
  const std::vector<double> p{std::numbers::pi, 0.0};
  EXPECT_DOUBLE_EQ(laplacian_symbol(p), 4.0);
  const long M = 27;
  const double a = laplacian_symbol_q(std::vector<long>{3, -7, 1}, M);
  EXPECT_EQ(a, laplacian_symbol_q(std::vector<long>{-1, 7, 3}, M));
  EXPECT_EQ(a, laplacian_symbol_q(std::vector<long>{7, 1, -3}, M));
  const double p0 = 2 * std::numbers::pi / M;
  EXPECT_NEAR(a, 4 * (std::pow(std::sin(3 * p0 / 2), 2) + std::pow(std::sin(7 * p0 / 2), 2) +
                      std::pow(std::sin(p0 / 2), 2)),
              1e-15);
}

TEST(BlockSchedule, StandardAndValidation) {
  EXPECT_EQ(BlockSchedule::standard(3, 2).T, (std::vector<long>{0, 9, 81}));
  EXPECT_THROW(BlockSchedule({1, 4}), std::invalid_argument);
  EXPECT_THROW(BlockSchedule({0, 4, 4}), std::invalid_argument);
  EXPECT_THROW(BlockSchedule({0}), std::invalid_argument);
}

TEST(BlockSymbol, MatchesDirectNeumannSeries) {
  for (int d : {2, 3}) {
    for (double lambda : {0.0, 1e-3, 0.7, 4.0, 4.0 * d}) {
      for (double s : {1e-4, 0.1, 2.0}) {
        for (auto [Ta, Tb] : {std::pair<long, long>{0, 9}, {9, 81}, {81, 729}}) {
          const double ref = series_block(lambda, s, Ta, Tb, d);
          EXPECT_NEAR(block_symbol(lambda, s, Ta, Tb, d), ref, 1e-13 * std::abs(ref) + 1e-300)
              << d << ' ' << lambda << ' ' << s << ' ' << Ta;
        }
      }
    }
  }
}

TEST(BlockSymbol, NearUnitRatioStaysAccurate) {
  // θμ = 1 - 2e-10: direct summation in long double still has ample digits
  const int d = 2;
  const double s = 1e-9, lambda = 1e-9;
  const double ref = series_block(lambda, s, 0, 200000, d);
  EXPECT_NEAR(block_symbol(lambda, s, 0, 200000, d), ref, 1e-12 * ref);
}

TEST(BlockSymbol, TelescopesToResolvent) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> up(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> us(-8.0, 2.0);
  const BlockSchedule sch = BlockSchedule::standard(3, 4);
  std::vector<double> out(5);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> p{up(gen), up(gen)};
    const double s = std::pow(10.0, us(gen));
    const double lambda = laplacian_symbol(p);
    schedule_symbols(lambda, s, sch, 2, out);
    double sum = 0.0;
    for (double v : out) sum += v;
    const double exact = 1.0 / (s + lambda);
    worst = std::max(worst, std::abs(sum - exact) / exact);
  }
  EXPECT_LE(worst, 1e-14);
}

TEST(ConvolutionPower, OneDimensionalBinomial) {
  // lazy step in d = 1 has symbol ((1 + cos p)/2) = |(1 + e^{ip})/2|², so the
  // n-fold power is C(2n, n + x) / 4^n, exactly representable
  const int n = 12;
  const WindowKernel k = convolution_power_oracle(1, n, n);
  for (std::size_t i = 0; i < k.size(); ++i) {
    const long x = k.coords(i)[0];
    EXPECT_EQ(k.values()[i], binomial(2 * n, n + static_cast<int>(x)) / std::pow(4.0, n));
  }
  EXPECT_THROW(convolution_power_oracle(1, 5, 4), std::invalid_argument);
}

TEST(BlockWindow, ExactSupportAndMass) {
  const BlockSchedule sch = BlockSchedule::standard(3, 2);
  const double s = 0.5;
  const WindowKernel w = build_block_window(2, 0, s, sch);
  EXPECT_EQ(w.radius(), 8);
  double sum = 0.0, edge = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Coord x = w.coords(i);
    const long r = std::abs(x[0]) + std::abs(x[1]);
    if (r > 8) EXPECT_EQ(w.values()[i], 0.0);
    if (r == 8) edge = std::max(edge, w.values()[i]);
    sum += w.values()[i];
  }
  EXPECT_GT(edge, 0.0);
  // zero-momentum symbol
  EXPECT_NEAR(sum, block_symbol(0.0, s, 0, 9, 2), 1e-15);
}

TEST(BlockKernel, TorusEqualsPeriodizedWindow) {
  const TorusSpec spec(2, 3, 2);
  const BlockSchedule sch = BlockSchedule::standard(3, 2);
  for (double s : {1e-3, 1.0}) {
    const ScaleKernelS k = build_block_kernel(spec, 0, s, sch);
    EXPECT_TRUE(k.resolvable);
    EXPECT_EQ(k.exact_range, 8);
    EXPECT_LE(k.eps_range, 9);
    const TorusField ref = periodize(build_block_window(2, 0, s, sch), spec, 1e-300);
    const double sup = norms(ref).sup;
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(k.kernel[i], ref[i], 1e-14 * sup);
  }
  const ScaleKernelS big = build_block_kernel(spec, 1, 1.0, sch);
  EXPECT_FALSE(big.resolvable);
  EXPECT_FALSE(big.warning.empty());
}
