#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "nomocou/crystal.hpp"
#include "nomocou/errors.hpp"

using namespace nomocou;

namespace {

constexpr double tp = 2 * constants::pi;

TrapConfig rf(double fx, double fy, double fz, IonSpecies s = IonSpecies::Ca40()) {
  TrapConfig t;
  t.variant = RfHarmonic{tp * fx, tp * fy, tp * fz};
  t.species = s;
  return t;
}

}  // namespace

TEST(Equilibrium, TwoIonSeparation) {
  const Equilibrium eq = find_equilibrium(rf(5e6, 4e6, 1e6), 2, 1);
  // z^3 = 1/4 in units of l0 for each ion.
  EXPECT_NEAR(eq.positions[5], std::cbrt(0.25), 1e-12);
  EXPECT_NEAR(eq.positions[4], -std::cbrt(0.25), 1e-12);
  EXPECT_LT(eq.residual_gradient_norm, 1e-10);
  EXPECT_FALSE(eq.structure_mismatch);
}

TEST(Equilibrium, DeterministicForSeed) {
  const auto a = find_equilibrium(rf(2196e3, 680e3, 343e3), 12, 4);
  const auto b = find_equilibrium(rf(2196e3, 680e3, 343e3), 12, 4);
  EXPECT_EQ(a.positions, b.positions);
}

TEST(Potential, NormalizationsAgree) {
  const TrapConfig t = rf(3e6, 2e6, 1e6);
  const Equilibrium eq = find_equilibrium(t, 4, 2);
  EXPECT_NEAR(total_potential(eq.positions, t), 2 * potential_energy(eq.positions, eq.model), 1e-12);
}

TEST(Potential, DerivativesMatchFiniteDifferences) {
  const Equilibrium eq = find_equilibrium(rf(3e6, 2.5e6, 1e6), 4, 3);
  Eigen::VectorXd x = eq.positions;
  for (int i = 0; i < x.size(); ++i) x[i] += 0.05 * std::sin(1.3 * i);
  const Eigen::VectorXd g = potential_gradient(x, eq.model);
  const Eigen::MatrixXd H = potential_hessian(x, eq.model);
  const double h = 1e-5;
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(x.size());
    e[i] = h;
    const double fd = (potential_energy(x + e, eq.model) - potential_energy(x - e, eq.model)) / (2 * h);
    EXPECT_NEAR(fd, g[i], 1e-7);
    const Eigen::VectorXd col = (potential_gradient(x + e, eq.model) - potential_gradient(x - e, eq.model)) / (2 * h);
    EXPECT_LT((col - H.col(i)).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Potential, CoincidentIonsThrow) {
  const Equilibrium eq = find_equilibrium(rf(3e6, 2e6, 1e6), 2, 1);
  EXPECT_THROW(potential_energy(Eigen::VectorXd::Zero(6), eq.model), SingularConfiguration);
}

TEST(Trap, ValidationRejectsNonPositiveFrequencies) {
  EXPECT_THROW(validate(rf(3e6, -2e6, 1e6)), InvalidInput);
  EXPECT_THROW(find_equilibrium(rf(3e6, 2e6, 1e6), 0, 1), InvalidInput);
}

TEST(Procrustes, InvariantToRotationAndScale) {
  Eigen::MatrixXd A(5, 3);
  A << 0, 0, 0, 1, 0, 0, 0, 2, 0, 1, 1, 3, -1, 2, 0.5;
  Eigen::Matrix3d R = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
  const Eigen::MatrixXd B = 2.5 * A * R;
  EXPECT_LT(procrustes_residual(A, B), 1e-12);
  Eigen::MatrixXd C = B;
  C(2, 1) += 0.3;
  EXPECT_GT(procrustes_residual(A, C), 1e-3);
}

TEST(Penning, MatchedSpringRatiosEqualRf) {
  const RfHarmonic r{tp * 2196e3, tp * 680e3, tp * 343e3};
  const IonSpecies be = IonSpecies::Be9();
  const double wz = tp * 1.58e6;
  const Penning p = match_rf_anisotropy(r, wz, 4.4588, be);
  const Eigen::Vector2d planar = penning_planar_omega_sq(p, be) / (wz * wz);
  std::array<double, 2> pen{planar[0], planar[1]};
  std::array<double, 2> ref{std::pow(r.wy / r.wx, 2), std::pow(r.wz / r.wx, 2)};
  std::sort(pen.begin(), pen.end());
  std::sort(ref.begin(), ref.end());
  EXPECT_NEAR(pen[0], ref[0], 1e-12);
  EXPECT_NEAR(pen[1], ref[1], 1e-12);
  // Slower root: below half the cyclotron frequency.
  EXPECT_LT(p.w_rot, 0.5 * be.charge * p.B / be.mass);
}

TEST(Penning, MatchedEquilibriumIsRescaledRf) {
  const RfHarmonic r{tp * 2196e3, tp * 680e3, tp * 343e3};
  TrapConfig a;
  a.variant = r;
  a.species = IonSpecies::Ca40();
  TrapConfig b;
  b.species = IonSpecies::Be9();
  b.variant = match_rf_anisotropy(r, tp * 1.58e6, 4.4588, b.species);
  const auto ea = find_equilibrium(a, 7, 1), eb = find_equilibrium(b, 7, 1);
  EXPECT_LT(procrustes_residual(positions_as_rows(ea), positions_as_rows(eb)), 1e-8);
}
