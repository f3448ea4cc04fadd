#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "vrmhd/cases.hpp"

using namespace vrmhd;
using namespace testing_support;

namespace {

CaseOptions small(const std::string& name) {
  CaseOptions o;
  if (name == "blast_wave_3d" || name == "orszag_tang_vr_3d")
    o.n = std::array<int, 3>{6, 6, 6};
  else if (name == "current_sheet" || name.rfind("rp", 0) == 0)
    o.n = std::array<int, 3>{50, 1, 1};
  else
    o.n = std::array<int, 3>{12, 12, 1};
  return o;
}

}  // namespace

TEST(Cases, CatalogHasFourteenEntries) { EXPECT_EQ(case_catalog().size(), 14u); }

TEST(Cases, EveryCaseStartsDivergenceFreeAndAdmissible) {
  for (const auto& name : case_catalog()) {
    SCOPED_TRACE(name);
    const CaseInit ci = init_case(name, small(name));
    const State& s = ci.state;
    const double scale = std::max(max_abs(s.B_e), 1e-300) / s.g.min_spacing();
    EXPECT_LE(div_norms(s.B_e).Linf, 1e-12 * scale);
    EXPECT_TRUE(check_admissible(s).ok);
    EXPECT_GT(ci.spec.t_end, 0.0);
    EXPECT_NO_THROW(ci.spec.params.validate());
  }
}

TEST(Cases, UnknownNameListsCatalog) {
  try {
    init_case("no_such_case");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("no_such_case"), std::string::npos);
    EXPECT_NE(m.find("orszag_tang_vr_3d"), std::string::npos);
  }
}

TEST(Cases, Rp1States) {
  const CaseInit ci = init_case("rp1", small("rp1"));
  const State& s = ci.state;
  const double s4 = std::sqrt(kFourPi);
  EXPECT_DOUBLE_EQ(s.rho.v.front(), 1.0);
  EXPECT_DOUBLE_EQ(s.rho.v.back(), 0.125);
  EXPECT_NEAR(s.p.v.front(), 1.0, 1e-15);
  EXPECT_NEAR(s.p.v.back(), 0.1, 1e-15);
  EXPECT_NEAR(s.B_e[0].v.front(), 0.75 * s4, 1e-14);
  EXPECT_NEAR(s.B_e[1].v.front(), s4, 1e-14);
  EXPECT_NEAR(s.B_e[1].v.back(), -s4, 1e-14);
  EXPECT_EQ(ci.spec.params.theta_b, 0.55);
  EXPECT_EQ(ci.spec.t_end, 0.1);
  EXPECT_FALSE(s.g.periodic(0));
}

TEST(Cases, OrszagTangOrigin) {
  const CaseInit ci = init_case("orszag_tang", small("orszag_tang"));
  const double g = ci.spec.params.gamma;
  EXPECT_NEAR(ci.state.rho.v[0], g * g, 1e-14);
  EXPECT_NEAR(ci.state.p.v[0], g, 1e-13);
}

TEST(Cases, OverridesReplaceParameters) {
  CaseOptions o = small("rotor");
  Params p;
  p.cfl = 0.3;
  o.params = p;
  o.knobs["omega"] = 5.0;
  const CaseInit ci = init_case("rotor", o);
  EXPECT_EQ(ci.spec.params.cfl, 0.3);
  EXPECT_EQ(ci.spec.knobs.at("omega"), 5.0);
}

TEST(Reference, CurrentSheetProfile) {
  const auto w = reference("current_sheet", {1.0, 0, 0}, 100.0);
  ASSERT_TRUE(w.has_value());
  EXPECT_NEAR(w->B[1], -1e-3 * std::erf(0.5 / std::sqrt(0.1 * 100.0)), 1e-18);
  EXPECT_EQ(w->B[2], 1e4);
  EXPECT_EQ(w->p, 1e5);
}

TEST(Reference, AlfvenIsPeriodicInTime) {
  const double T = 2.0 / std::sqrt(5.0);
  for (double x : {0.1, 0.7, 1.3})
    for (double y : {0.2, 0.9}) {
      const auto a = reference("alfven_wave", {x, y, 0}, 0.0), b = reference("alfven_wave", {x, y, 0}, T);
      for (int c = 0; c < 3; ++c) {
        EXPECT_NEAR(a->B[c], b->B[c], 1e-12);
        EXPECT_NEAR(a->v[c], b->v[c], 1e-12);
      }
    }
  // |B| is constant and the field is aligned with n at a node of cos(phi)
  const auto w = reference("alfven_wave", {0.0, 0.0, 0}, 0.0);
  EXPECT_NEAR(w->B[2], 0.0, 1e-15);
}

TEST(Reference, NoneForShockProblems) { EXPECT_FALSE(reference("rp1", {0, 0, 0}, 0.1).has_value()); }
