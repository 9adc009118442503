#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "frd/alpha.hpp"
#include "frd/fourier.hpp"

using namespace frd;

namespace {

const Decomposition& fixture() {
  static const Decomposition dec =
      assemble(TorusSpec(2, 3, 2), SpectralParams(1.5, 1.0), QuadratureRule{}, BlockSchedule::standard(3, 2));
  return dec;
}

// |Q|^{-1} Σ_p cos(p·x) / (λ(p)^{α/2} + m²), summed directly.
double direct_resolvent(const TorusSpec& s, const Coord& x, double alpha, double m2) {
  const double step = 2.0 * std::numbers::pi / static_cast<double>(s.side());
  double acc = 0.0;
  for (std::size_t i = 0; i < s.volume(); ++i) {
    const Coord q = s.coords(i);
    double lam = 0.0, ph = 0.0;
    for (int a = 0; a < s.d(); ++a) {
      const double sn = std::sin(step * q[a] / 2.0);
      lam += 4.0 * sn * sn;
      ph += step * static_cast<double>(q[a] * x[a]);
    }
    acc += std::cos(ph) / (std::pow(lam, alpha / 2.0) + m2);
  }
  return acc / static_cast<double>(s.volume());
}

}  // namespace

TEST(Assemble, ReconstructsDirectResolvent) {
  const Decomposition& dec = fixture();
  const TorusField total = dec.total();
  double sup = 0.0, worst = 0.0;
  for (const Coord& x : {Coord{0, 0}, Coord{1, 0}, Coord{3, -2}, Coord{13, 13}, Coord{-7, 5}}) {
    const double ref = direct_resolvent(dec.spec, x, 1.5, 1.0);
    sup = std::max(sup, std::abs(ref));
    worst = std::max(worst, std::abs(total.at(x) - ref));
    EXPECT_NEAR(dec.exact.at(x), ref, 1e-14);
  }
  EXPECT_LE(worst, 1e-7 * sup);
}

TEST(Assemble, ZeroMomentum) {
  const Decomposition& dec = fixture();
  EXPECT_EQ(dec.exact_symbol[0], 1.0);
  double z = dec.remainder.symbol[0];
  for (const auto& p : dec.pieces) z += p.symbol[0];
  EXPECT_NEAR(z, 1.0, 1e-8);
}

TEST(Assemble, PieceSymbolsMatchDirectSpectralIntegral) {
  const Decomposition& dec = fixture();
  const QuadratureRule rule;
  for (std::size_t idx : {0u, 1u, 30u, 400u}) {
    const double lam = laplacian_symbol_q(dec.spec.coords(idx), dec.spec.side());
    for (const auto& p : dec.pieces) {
      PowerEnvelope env{0.0, -1.0, std::max(lam, 1e-3), 8.0};
      const double ref = integrate_rho(
          dec.params, [&](double s) { return block_symbol(lam, s, p.Ta, p.Tb, 2); }, env, rule);
      EXPECT_NEAR(p.symbol[idx], ref, 1e-8 * ref) << idx << ' ' << p.j;
    }
  }
}

TEST(Assemble, PositiveSemidefinite) {
  const Decomposition& dec = fixture();
  for (const auto& p : dec.pieces)
    for (double v : p.symbol) EXPECT_GE(v, -1e-12);
  for (double v : dec.remainder.symbol) EXPECT_GE(v, -1e-12);
}

TEST(Assemble, FirstPieceHasExactRange) {
  const Decomposition& dec = fixture();
  const AlphaScaleKernel& p = dec.pieces[0];
  ASSERT_TRUE(p.ranges.resolvable);
  EXPECT_EQ(p.ranges.exact, 8);
  const double sup = norms(p.kernel).sup;
  for (std::size_t i = 0; i < p.kernel.size(); ++i) {
    const Coord x = dec.spec.coords(i);
    if (std::abs(x[0]) + std::abs(x[1]) >= 9) EXPECT_LE(std::abs(p.kernel[i]), 1e-15 * sup);
  }
  EXPECT_FALSE(dec.pieces[1].ranges.resolvable);
}

TEST(Assemble, Preconditions) {
  EXPECT_THROW(assemble(TorusSpec(2, 3, 2), SpectralParams(1.5, 0.0), QuadratureRule{}, BlockSchedule::standard(3, 2)),
               std::invalid_argument);
  EXPECT_THROW(assemble(TorusSpec(2, 3, 2), SpectralParams(1.5, 1.0), QuadratureRule{}, BlockSchedule::standard(3, 3)),
               std::invalid_argument);
  EXPECT_THROW(build_piece(2, TorusSpec(2, 3, 2), SpectralParams(1.5, 1.0), QuadratureRule{}, BlockSchedule::standard(3, 2)),
               std::invalid_argument);
}

TEST(MassDerivative, MatchesCentralDifference) {
  const TorusSpec spec(2, 3, 2);
  const BlockSchedule sch = BlockSchedule::standard(3, 2);
  const QuadratureRule rule;
  AssembleOptions with;
  with.mass_derivatives = true;
  const Decomposition dec = assemble(spec, SpectralParams(1.25, 0.5), rule, sch, with);
  const double h = 5e-5;
  AssembleOptions lay;
  lay.layout = &dec.nodes;
  const Decomposition up = assemble(spec, SpectralParams(1.25, 0.5 + h), rule, sch, lay);
  const Decomposition dn = assemble(spec, SpectralParams(1.25, 0.5 - h), rule, sch, lay);
  for (int j = 0; j < 2; ++j) {
    TorusField fd = up.pieces[j].kernel;
    fd -= dn.pieces[j].kernel;
    fd *= 1.0 / (2.0 * h);
    const double sup = norms(dec.dm2_pieces[j].kernel).sup;
    for (std::size_t i = 0; i < fd.size(); ++i) EXPECT_NEAR(fd[i], dec.dm2_pieces[j].kernel[i], 1e-5 * sup);
  }
  // zero mode of the full derivative: -1/m⁴
  double z = dec.dm2_remainder->symbol[0];
  for (const auto& p : dec.dm2_pieces) z += p.symbol[0];
  EXPECT_NEAR(z, -4.0, 4e-8);
}

TEST(CoarseGrain, PreservesTotalBitwise) {
  const Decomposition& dec = fixture();
  const CoarseDecomposition c = coarse_grain(dec, 2);
  EXPECT_EQ(c.L_prime, 9);
  ASSERT_EQ(c.pieces.size(), 1u);
  const TorusField a = c.total(), b = dec.total();
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]);
  EXPECT_THROW(coarse_grain(dec, 3), std::invalid_argument);
}

TEST(CoarseGrain, GroupsAndFoldsLeftovers) {
  const Decomposition dec =
      assemble(TorusSpec(2, 3, 3), SpectralParams(1.5, 1.0), QuadratureRule{}, BlockSchedule::standard(3, 3));
  const CoarseDecomposition c = coarse_grain(dec, 2);
  ASSERT_EQ(c.pieces.size(), 1u);
  ASSERT_EQ(c.folded.size(), 1u);
  TorusField g = dec.pieces[0].kernel;
  g += dec.pieces[1].kernel;
  for (std::size_t i = 0; i < g.size(); ++i) ASSERT_EQ(c.pieces[0][i], g[i]);
}

TEST(RescaledView, SamplesCoarseLattice) {
  const Decomposition& dec = fixture();
  const AlphaScaleKernel& p = dec.pieces[1];
  const WindowKernel w = rescaled_view(p, 3, 0);
  EXPECT_EQ(w.radius(), 4);  // floor(13 / 3)
  const double factor = std::pow(3.0, 0.5);
  EXPECT_DOUBLE_EQ(w.value(Coord{1, -2}), factor * p.kernel.at(Coord{3, -6}));
  EXPECT_THROW(rescaled_view(p, 3, 2), std::invalid_argument);
}
