#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "nomocou/errors.hpp"
#include "nomocou/rng.hpp"
#include "nomocou/units.hpp"

using namespace nomocou;

TEST(Scales, DefiningRelations) {
  const IonSpecies yb = IonSpecies::Yb171();
  const double w = 2 * constants::pi * 1e6;
  const ScaleSet s = make_scales(yb, w);
  // Coulomb energy at one l0 equals the spring energy scale.
  EXPECT_NEAR(constants::k_e * yb.charge * yb.charge / s.l0, s.E0, 1e-12 * s.E0);
  EXPECT_NEAR(s.hbar_omega0(), constants::hbar * w, 1e-12 * constants::hbar * w);
  EXPECT_NEAR(s.eps0, s.z0 / s.l0, 1e-15);
}

TEST(Scales, RoundTrip) {
  const ScaleSet s = make_scales(IonSpecies::Ca40(), 2 * constants::pi * 343e3);
  for (auto kind : {Dimension::Length, Dimension::Energy, Dimension::Time, Dimension::Frequency}) {
    EXPECT_DOUBLE_EQ(from_physical(to_physical(1.7, kind, s), kind, s), 1.7);
    EXPECT_EQ(parse_dimension(dimension_name(kind)), kind);
  }
}

TEST(Scales, RejectsBadInput) {
  EXPECT_THROW(make_scales(IonSpecies::Be9(), 0.0), InvalidInput);
  EXPECT_THROW(make_scales(IonSpecies::Be9(), NAN), InvalidInput);
  EXPECT_THROW(make_scales(IonSpecies::from_amu("X", 10, 0), 1.0), InvalidInput);
  EXPECT_THROW(parse_dimension("mass"), InvalidInput);
}

TEST(Species, BuiltinsAndFile) {
  EXPECT_EQ(species_by_name("Be9").name, "Be9");
  EXPECT_THROW(species_by_name("Xx"), InvalidInput);
  std::istringstream in("# comment\nSr88 87.9056 1\n\nMg25 24.9858 1  # trailing\n");
  const auto v = load_species(in);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[1].name, "Mg25");
  EXPECT_NEAR(v[0].mass, 87.9056 * constants::amu, 1e-35);
  std::istringstream bad("Sr88 87.9\n");
  EXPECT_THROW(load_species(bad), InvalidInput);
}

TEST(CounterRng, ReproducibleAndIndependent) {
  CounterRng a(42, 3), b(42, 3), c(42, 4);
  std::set<double> seen;
  for (int i = 0; i < 1000; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    seen.insert(x);
    EXPECT_NE(x, c.uniform());
  }
  EXPECT_EQ(seen.size(), 1000u);
}
