#include <gtest/gtest.h>

#include <random>

#include "vrmhd/grid.hpp"

using namespace vrmhd;

namespace {

Grid unit_grid(int nx, int ny, int nz, Boundary bc = Boundary::Periodic) {
  return make_grid({nx, ny, nz}, {{{0, 1}, {0, 1}, {0, 1}}}, {bc, bc, bc});
}

Field random_field(const Grid& g, Loc l, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  Field f(g, l);
  for (double& x : f.v) x = u(rng);
  return f;
}

}  // namespace

TEST(Grid, SpacingFromExtents) {
  const Grid g = make_grid({10, 10, 10}, {{{-0.55, 0.55}, {-0.55, 0.55}, {-0.55, 0.55}}});
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(g.d[a], 0.11, 1e-15);
}

TEST(Grid, DegenerateAxes) {
  const Grid g = make_grid({1000, 1, 1}, {{{-0.5, 0.5}, {0, 1}, {0, 1}}},
                           {Boundary::Outflow, Boundary::Outflow, Boundary::Outflow});
  EXPECT_NEAR(g.d[0], 1e-3, 1e-18);
  EXPECT_TRUE(g.degenerate(1));
  EXPECT_TRUE(g.degenerate(2));
  EXPECT_TRUE(g.periodic(1));
  EXPECT_EQ(g.dims(), 1);
  const Grid cs = make_grid({5000, 1, 1}, {{{-50, 50}, {0, 1}, {0, 1}}});
  EXPECT_NEAR(cs.d[0], 0.02, 1e-15);
}

TEST(Grid, InvalidInputs) {
  EXPECT_THROW(make_grid({0, 1, 1}, {{{0, 1}, {0, 1}, {0, 1}}}), InvalidGrid);
  EXPECT_THROW(make_grid({4, 1, 1}, {{{1, 1}, {0, 1}, {0, 1}}}), InvalidGrid);
  EXPECT_THROW(make_grid({4, 1, 1}, {{{0, 1}, {2, 1}, {0, 1}}}), InvalidGrid);
}

TEST(Grid, SlotCounts) {
  const Grid p = unit_grid(4, 3, 2);
  for (Loc l : {Loc::Cell, Loc::FaceX, Loc::EdgeY, Loc::Node}) EXPECT_EQ(p.size(l), 24u);
  const Grid o = unit_grid(4, 3, 2, Boundary::Outflow);
  EXPECT_EQ(o.size(Loc::Cell), 24u);
  EXPECT_EQ(o.size(Loc::FaceX), 5u * 3 * 2);
  EXPECT_EQ(o.size(Loc::EdgeZ), 5u * 4 * 2);
  EXPECT_EQ(o.size(Loc::Node), 5u * 4 * 3);
}

TEST(Grid, IndexWrapAndClamp) {
  const Grid p = unit_grid(5, 1, 1);
  EXPECT_EQ(p.fix(Loc::Cell, 0, -1), 4);
  EXPECT_EQ(p.fix(Loc::Cell, 0, 5), 0);
  const Grid o = make_grid({5, 1, 1}, {{{0, 1}, {0, 1}, {0, 1}}}, {Boundary::Outflow, Boundary::Periodic, Boundary::Periodic});
  EXPECT_EQ(o.fix(Loc::Cell, 0, -1), 0);
  EXPECT_EQ(o.fix(Loc::Cell, 0, 5), 4);
  EXPECT_EQ(o.fix(Loc::FaceX, 0, 6), 5);
}

TEST(Grid, LocationShifts) {
  EXPECT_FALSE(is_shifted(Loc::Cell, 0));
  EXPECT_TRUE(is_shifted(Loc::FaceY, 1));
  EXPECT_FALSE(is_shifted(Loc::FaceY, 0));
  EXPECT_TRUE(is_shifted(Loc::EdgeX, 1));
  EXPECT_TRUE(is_shifted(Loc::EdgeX, 2));
  EXPECT_FALSE(is_shifted(Loc::EdgeX, 0));
  for (int a = 0; a < 3; ++a) EXPECT_TRUE(is_shifted(Loc::Node, a));
  for (int m = 0; m < 8; ++m)
    for (int a = 0; a < 3; ++a) {
      const Loc l = loc_from_mask(std::uint8_t(m));
      EXPECT_EQ(toggle(toggle(l, a), a), l);
    }
}

TEST(Avg, ConstantStaysConstant) {
  const Grid g = unit_grid(4, 3, 2);
  for (int a = 0; a < 3; ++a) {
    const Field r = avg(Field(g, Loc::EdgeX, 2.5), a);
    for (double x : r.v) EXPECT_EQ(x, 2.5);
  }
}

TEST(Avg, PeriodicCellToFace) {
  const Grid g = unit_grid(4, 1, 1);
  Field f(g, Loc::Cell);
  f.v = {1, 3, 5, 7};
  const Field r = avg(f, 0);
  EXPECT_EQ(r.loc, Loc::FaceX);
  // face i sits between cells i-1 and i; face 0 wraps to (7+1)/2
  EXPECT_EQ(r.v, (std::vector<double>{4, 2, 4, 6}));
  const Field back = avg(r, 0);
  EXPECT_EQ(back.loc, Loc::Cell);
  EXPECT_EQ(back.v, (std::vector<double>{3, 3, 5, 5}));
}

TEST(Avg, Commutes) {
  const Grid g = unit_grid(5, 4, 3);
  const Field f = random_field(g, Loc::Cell, 1);
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      const Field x = avg(avg(f, a), b), y = avg(avg(f, b), a);
      for (std::size_t q = 0; q < x.v.size(); ++q) EXPECT_NEAR(x.v[q], y.v[q], 1e-15);
    }
}

TEST(Avg, LinearAndPreservesSum) {
  const Grid g = unit_grid(6, 5, 4);
  const Field f = random_field(g, Loc::FaceY, 2), h = random_field(g, Loc::FaceY, 3);
  for (int a = 0; a < 3; ++a) {
    const Field lhs = avg(2.0 * f + (-3.0) * h, a);
    const Field rhs = 2.0 * avg(f, a) + (-3.0) * avg(h, a);
    for (std::size_t q = 0; q < lhs.v.size(); ++q) EXPECT_NEAR(lhs.v[q], rhs.v[q], 1e-14);
    double s0 = 0, s1 = 0;
    for (double x : f.v) s0 += x;
    for (double x : avg(f, a).v) s1 += x;
    EXPECT_NEAR(s0, s1, 1e-12);
  }
}

TEST(Avg, DegenerateAxisIsIdentity) {
  const Grid g = unit_grid(4, 1, 1);
  const Field f = random_field(g, Loc::Cell, 4);
  const Field r = avg(f, 1);
  EXPECT_EQ(r.loc, Loc::FaceY);
  EXPECT_EQ(r.v, f.v);
  for (double x : diff(f, 2).v) EXPECT_EQ(x, 0.0);
}

TEST(Diff, ExactOnLinearData) {
  const Grid g = make_grid({8, 8, 8}, {{{0, 1}, {0, 2}, {0, 3}}},
                           {Boundary::Outflow, Boundary::Outflow, Boundary::Outflow});
  Field f(g, Loc::Cell);
  f.fill([](double x, double y, double z) { return 2 * x - y + 0.5 * z; });
  const Field dx = diff(f, 0), dy = diff(f, 1), dz = diff(f, 2);
  // interior faces only; clamped boundary faces give zero
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 8; ++j)
      for (int i = 1; i < 8; ++i) {
        EXPECT_NEAR(dx.at(i, j, k), 2.0, 1e-12);
        EXPECT_NEAR(dy.at(j, i, k), -1.0, 1e-12);
        EXPECT_NEAR(dz.at(j, k, i), 0.5, 1e-12);
      }
  EXPECT_EQ(dx.at(0, 3, 3), 0.0);
  EXPECT_EQ(dx.at(8, 3, 3), 0.0);
}

TEST(Avg2Product, Constants) {
  const Grid g = unit_grid(3, 3, 3);
  const Field r = avg2_product(Field(g, Loc::EdgeZ, 2.0), Field(g, Loc::Cell, 3.0), Loc::FaceX);
  for (double x : r.v) EXPECT_NEAR(x, 6.0, 1e-15);
}

TEST(Avg2Product, TwoByTwoHandExpansion) {
  const Grid g = unit_grid(2, 2, 1);
  Field y(g, Loc::Cell);
  y.v = {1, 2, 3, 4};
  const Field r = avg2_product(Field(g, Loc::EdgeZ, 1.0), y, Loc::FaceX);
  const Field ref = avg(y, 0);
  for (std::size_t q = 0; q < r.v.size(); ++q) EXPECT_NEAR(r.v[q], ref.v[q], 1e-15);
}

TEST(Avg2Product, LinearDataMidpoints) {
  const Grid g = make_grid({6, 6, 1}, {{{0, 1}, {0, 1}, {0, 1}}},
                           {Boundary::Outflow, Boundary::Outflow, Boundary::Periodic});
  Field x(g, Loc::EdgeZ);
  x.fill([](double, double yy, double) { return 1.0 + 3.0 * yy; });
  const Field r = avg2_product(x, Field(g, Loc::Cell, 1.0), Loc::FaceX);
  // face-x (i, j) sits at y = (j + 1/2) dy; interior x-faces are unaffected by clamping along x
  for (int j = 0; j < 6; ++j)
    for (int i = 1; i < 6; ++i) EXPECT_NEAR(r.at(i, j, 0), 1.0 + 3.0 * (j + 0.5) / 6.0, 1e-14);
}

TEST(Avg2Product, MismatchThrows) {
  const Grid g = unit_grid(3, 3, 3);
  EXPECT_THROW(avg2_product(Field(g, Loc::EdgeX), Field(g, Loc::Cell), Loc::FaceX), StaggeringMismatch);
  EXPECT_THROW(avg2_product(Field(g, Loc::Cell), Field(g, Loc::Cell), Loc::FaceX), StaggeringMismatch);
  EXPECT_THROW(avg2_product(Field(g, Loc::EdgeZ), Field(g, Loc::FaceX), Loc::FaceX), StaggeringMismatch);
  EXPECT_THROW(avg2_product(Field(g, Loc::EdgeZ), Field(g, Loc::Cell), Loc::Node), StaggeringMismatch);
}
