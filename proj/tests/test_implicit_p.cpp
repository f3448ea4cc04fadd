#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "vrmhd/implicit_p.hpp"

using namespace vrmhd;
using namespace testing_support;

namespace {

double sum(const Field& f) {
  double s = 0;
  for (double x : f.v) s += x;
  return s;
}

}  // namespace

TEST(PressureOperator, SymmetricAndPositive) {
  std::mt19937 rng(11);
  const Grid g = make_grid({5, 4, 3}, {{{0, 1}, {0, 1}, {0, 1}}});
  FaceField h = face_field(g);
  randomize(h, rng, 0.5, 3.0);
  const PressureSystemCtx c{h, 0.3, 0.6, 1.4};
  for (int t = 0; t < 4; ++t) {
    CellField x(g, Loc::Cell), y(g, Loc::Cell);
    randomize(x, rng);
    randomize(y, rng);
    const double a = dot(y, apply_pressure(c, x)), b = dot(x, apply_pressure(c, y));
    EXPECT_NEAR(a, b, 1e-12 * std::max(std::abs(a), 1.0));
    EXPECT_GE(dot(x, apply_pressure(c, x)), (1.0 / 0.4) * dot(x, x) * (1 - 1e-12));
  }
}

TEST(PressureOperator, FourierSymbol) {
  const int n = 12;
  const Grid g = make_grid({n, 1, 1}, {{{0, 1}, {0, 1}, {0, 1}}});
  const double hval = 2.5, dt = 0.05, th = 0.5, gam = 5.0 / 3.0, k = 2 * kPi * 2;
  const PressureSystemCtx c{face_field(g, hval, hval, hval), dt, th, gam};
  CellField p(g, Loc::Cell);
  p.fill([k](double x, double, double) { return std::sin(k * x); });
  const CellField y = apply_pressure(c, p);
  const double kh = 2 * std::sin(k * g.d[0] / 2) / g.d[0];
  const double sym = 1 / (gam - 1) + th * th * dt * dt * hval * kh * kh;
  for (std::size_t q = 0; q < p.v.size(); ++q) EXPECT_NEAR(y.v[q], sym * p.v[q], 1e-12);
}

TEST(PressureStage, UniformEquilibriumUnchanged) {
  const Grid g = make_grid({6, 5, 1}, {{{0, 1}, {0, 1}, {0, 1}}});
  Params pr;
  pr.theta_p = 0.6;
  const State s = uniform_state(g, pr, {1.2, {0.3, -0.1, 0.2}, 0.8, {1.0, 0.5, 0.0}});
  const Conserved Q = conserved_of(s);
  const auto r = solve_pressure(Q, s.p, s.mom, s.B_e, s.p, s.mom, pr, 0.7, 1e-12);
  EXPECT_LE(rel_diff(r.p, s.p), 1e-12);
  EXPECT_LE(rel_diff(r.Q.E, s.rhoE), 1e-13);
  for (int c = 0; c < 3; ++c) EXPECT_LE(rel_diff(r.Q.mom[c], s.mom[c]), 1e-12);
}

TEST(PressureStage, ConservesOnPeriodicBox) {
  std::mt19937 rng(12);
  const Grid g = make_grid({6, 5, 4}, {{{0, 1}, {0, 1}, {0, 1}}});
  Params pr;
  pr.theta_p = 0.5;
  State s = uniform_state(g, pr, {1.0, {0, 0, 0}, 1.0, {0, 0, 0}});
  randomize(s.mom, rng, -0.2, 0.2);
  randomize(s.p, rng, 0.8, 1.2);
  s.B_e = random_solenoidal(g, rng);
  s.rhoE = total_energy(s.rho, s.mom, s.p, s.B_e, pr.gamma);
  const Conserved Q = conserved_of(s);
  const auto r = solve_pressure(Q, s.p, s.mom, s.B_e, s.p, s.mom, pr, 0.1, 1e-12);
  EXPECT_EQ(r.Q.rho.v, Q.rho.v);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(sum(r.Q.mom[c]), sum(Q.mom[c]), 1e-12);
  EXPECT_NEAR(sum(r.Q.E), sum(Q.E), 1e-12 * sum(Q.E));
}

TEST(PressureStage, LargeStepDrivesFaceMomentumTowardsSolenoidal) {
  // theta = 1 with dt far beyond the acoustic limit: the pressure correction removes most of the
  // compressive part of the face momentum (low Mach behaviour).
  std::mt19937 rng(13);
  const Grid g = make_grid({16, 16, 1}, {{{0, 1}, {0, 1}, {0, 1}}});
  Params pr;
  pr.theta_p = 1.0;
  pr.picard_S = 2;
  const double tp = 2 * kPi;
  State s = detail::sample_state(
      g, pr,
      [=](double x, double y, double) {
        return Prim{1.0, {0.01 * std::sin(tp * x), 0.01 * std::cos(tp * y), 0}, 1.0, {0, 0, 0}};
      },
      [](double, double, double) { return Vec3{0, 0, 0}; });
  const Conserved Q = conserved_of(s);
  const double d0 = max_abs(div_f2c(face_momentum(Q.mom)));
  const auto r = solve_pressure(Q, s.p, s.mom, s.B_e, s.p, s.mom, pr, 10.0, 1e-12);
  const double d1 = max_abs(div_f2c(r.mom_f));
  EXPECT_LT(d1, 1e-3 * d0);
}

TEST(PressureStage, FaceEnthalpyRejectsNonPositivePressure) {
  const Grid g = make_grid({3, 1, 1}, {{{0, 1}, {0, 1}, {0, 1}}});
  CellField p(g, Loc::Cell, 1.0);
  p.v[1] = 0.0;
  EXPECT_THROW(face_enthalpy(p, CellField(g, Loc::Cell, 1.0), 1.4), PositivityFailure);
}
