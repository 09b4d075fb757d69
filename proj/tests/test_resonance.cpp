#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "nomocou/errors.hpp"
#include "nomocou/resonance.hpp"

using namespace nomocou;

namespace {

constexpr double tp = 2 * constants::pi;

Equilibrium chain(int n, double fz) {
  TrapConfig t;
  t.variant = RfHarmonic{tp * 5e6, tp * 3e6, tp * fz};
  t.species = IonSpecies::Yb171();
  return find_equilibrium(t, n, 1);
}

}  // namespace

TEST(TwoLevel, ClosedForm) {
  EXPECT_NEAR(tl_population(0.2, 0.0, constants::pi / 0.4), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(tl_population(0.0, 1.0, 3.0), 0.0);
  // Detuned: maximum is C^2 / (C^2 + delta^2 / 4).
  const double c = 0.1, d = 0.3, w = std::hypot(c, d / 2);
  EXPECT_NEAR(tl_population(c, d, constants::pi / (2 * w)), c * c / (w * w), 1e-15);
}

TEST(TwoLevel, ReduceTriad) {
  ResonanceTriad t;
  t.kind = TriadKind::TwoMode;
  t.c_rwa = {0.3, 0.4};
  t.delta = 0.0;
  const ResonanceTriad r = tl_reduce(t, 0.01, 2.0);
  EXPECT_NEAR(r.c_tl, std::sqrt(2.0) * 0.01 * 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(r.s_tl, 1.0);
  EXPECT_NEAR(r.t_tl, constants::pi / r.c_tl, 1e-12);
  EXPECT_NEAR(r.t_tl_seconds, r.t_tl / 2.0, 1e-12);
}

TEST(Scan, ContractorPathMatchesFullTensorPath) {
  TrapConfig trap;
  trap.variant = RfHarmonic{tp * 2196e3, tp * 680e3, tp * 343e3};
  trap.species = IonSpecies::Ca40();
  const Equilibrium eq = find_equilibrium(trap, 15, 1);
  const ModeSpectrum s = normal_modes(eq);
  const CartesianTressian T = full_tressian(eq);
  const ScanThresholds th{2e-2, 1e-8, 0.0};
  const auto fast = scan_triads(s, T, eq.scales.eps0, th, eq.scales.omega0);
  std::vector<ResonanceTriad> full;
  // Roundoff-level blocks differ between the two paths; compare above a floor.
  for (const auto& t : rwa_coefficients(to_mode_basis(T, s), s, th.delta_cut))
    if (t.tensor_norm > th.tensor_min) full.push_back(t);
  ASSERT_FALSE(fast.empty());
  ASSERT_EQ(fast.size(), full.size());
  for (const auto& a : fast) {
    bool found = false;
    for (const auto& b : full)
      if (a.n == b.n && a.m == b.m && a.p == b.p) {
        found = true;
        EXPECT_NEAR(std::abs(a.c_rwa - b.c_rwa), 0.0, 1e-9 * (1 + std::abs(b.c_rwa)));
        EXPECT_NEAR(a.delta, b.delta, 1e-14);
      }
    EXPECT_TRUE(found);
  }
}

TEST(Scan, TwoIonResonantTriad) {
  const double wz = tp * 1.1604134e6;
  TrapConfig t;
  t.variant = RfHarmonic{tp * 10e6, std::sqrt(7.0) / 2 * wz, wz};
  t.species = IonSpecies::Yb171();
  const Equilibrium eq = find_equilibrium(t, 2, 1);
  const auto tr = scan_triads(normal_modes(eq), full_tressian(eq), eq.scales.eps0, {1e-2, 1e-3, 0.1}, wz);
  ASSERT_EQ(tr.size(), 1u);
  EXPECT_EQ(tr[0].kind, TriadKind::TwoMode);
  EXPECT_EQ(tr[0].triad_class(), TriadClass::RadialAxial);
  EXPECT_NEAR(tr[0].s_tl, 1.0, 1e-12);
  EXPECT_NEAR(tr[0].t_tl_seconds * 1e6, 202.83, 0.01);
}

TEST(Scan, RejectsNegativeThresholds) {
  const Equilibrium eq = chain(3, 0.5e6);
  EXPECT_THROW(scan_triads(normal_modes(eq), full_tressian(eq), eq.scales.eps0, {-1, 0, 0}, 0), InvalidInput);
}

TEST(Count, DeterministicAndScaling) {
  const auto a = expected_resonance_count(16, 2e-3, 50, 9), b = expected_resonance_count(16, 2e-3, 50, 9);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.trials, 50);
  const auto big = expected_resonance_count(32, 2e-3, 50, 9);
  EXPECT_GT(big.mean / a.mean, 6.0);
  EXPECT_LT(big.mean / a.mean, 10.0);
  EXPECT_THROW(expected_resonance_count(0, 1e-3, 10, 1), InvalidInput);
}

TEST(LineFit, ExactLine) {
  const LineFit f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.slope_stderr, 0.0, 1e-12);
}
