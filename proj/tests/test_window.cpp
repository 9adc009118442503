#include <gtest/gtest.h>

#include <cmath>

#include "frd/alpha.hpp"
#include "frd/window.hpp"

using namespace frd;

// For T_1 = 9 < M/2 the torus piece is the periodization of a compactly
// supported Z^d kernel, so it is itself the Z^d oracle.
TEST(WindowStudy, FirstBlockMatchesTorusPiece) {
  const SpectralParams P(1.5, 0.5);
  const QuadratureRule rule;
  const Decomposition dec = assemble(TorusSpec(2, 3, 2), P, rule, BlockSchedule::standard(3, 2));
  WindowConfig cfg;
  cfg.n = 128;
  cfg.n_ref = 192;
  const WindowStudy st = window_study(2, 0, 9, window_nodes(2, 81, P, rule), cfg);
  ASSERT_GE(st.R, 9);
  const TorusField& k = dec.pieces[0].kernel;
  const double sup = norms(k).sup;
  for (long t = -st.R; t <= st.R; ++t) {
    const long i = t + st.R;
    const Coord x{t, 0};
    const double ref = std::abs(t) <= 13 ? k.at(x) : 0.0;
    EXPECT_NEAR(st.value.axis[0][i], ref, 1e-8 * sup) << t;
    if (std::abs(t) + 2 <= 13) {
      const Coord x1{t + 1, 0}, x2{t + 2, 0}, y{t, 1}, y1{t + 1, 1}, dg{t, t}, dg1{t + 1, t}, dg2{t, t + 1}, dg3{t + 1, t + 1};
      EXPECT_NEAR(st.value.axis[1][i], k.at(x1) - k.at(x), 1e-8 * sup);
      EXPECT_NEAR(st.value.axis[2][i], k.at(x2) - 2 * k.at(x1) + k.at(x), 1e-8 * sup);
      EXPECT_NEAR(st.value.mixed_axis[i], k.at(y1) - k.at(y) - k.at(x1) + k.at(x), 1e-8 * sup);
      if (std::abs(t) + 1 <= 13)
        EXPECT_NEAR(st.value.mixed_diag[i], k.at(dg3) - k.at(dg1) - k.at(dg2) + k.at(dg), 1e-8 * sup);
    }
  }
  EXPECT_LE(st.refine_defect, 1e-6);
}

TEST(WindowStudy, Validation) {
  const SpectralParams P(1.5, 0.5);
  const SpectralNodes n = window_nodes(2, 81, P, QuadratureRule{});
  EXPECT_THROW(window_study(2, 9, 9, n, WindowConfig{}), std::invalid_argument);
}

TEST(Profiles, DifferenceIsZeroForIdenticalInput) {
  DerivativeProfile a;
  for (auto& v : a.axis) v = {1.0, -2.0, 3.0};
  a.mixed_axis = {0.5, 0.1, 0.0};
  a.mixed_diag = {0.2, -4.0, 0.0};
  for (int p = 0; p <= 2; ++p) EXPECT_EQ(profile_difference(a, a, p), 0.0);
  EXPECT_EQ(a.sup(2), 4.0);
  EXPECT_EQ(a.sup(0), 3.0);
  EXPECT_THROW(a.sup(3), std::invalid_argument);
}
