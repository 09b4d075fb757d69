#include <gtest/gtest.h>

#include <cmath>

#include "nomocou/cubic.hpp"
#include "nomocou/errors.hpp"
#include "nomocou/runner.hpp"

using namespace nomocou;

namespace {

constexpr double tp = 2 * constants::pi;

Equilibrium two_ion_resonant() {
  const double wz = tp * 1.1604134e6;
  TrapConfig t;
  t.variant = RfHarmonic{tp * 10e6, std::sqrt(7.0) / 2 * wz, wz};
  t.species = IonSpecies::Yb171();
  return find_equilibrium(t, 2, 1);
}

Equilibrium planar(int n) {
  TrapConfig t;
  t.variant = RfHarmonic{tp * 2196e3, tp * 680e3, tp * 343e3};
  t.species = IonSpecies::Ca40();
  return find_equilibrium(t, n, 1);
}

Equilibrium penning(int n) {
  TrapConfig t;
  t.species = IonSpecies::Be9();
  t.variant = Penning{tp * 1.58e6, 4.4588, tp * 188.741e3, 3.574e-2};
  return find_equilibrium(t, n, 1);
}

}  // namespace

TEST(Modes, TwoIonFrequencies) {
  const ModeSpectrum s = normal_modes(two_ion_resonant());
  ASSERT_EQ(s.num_modes(), 6);
  EXPECT_NEAR(s.frequencies[0], std::sqrt(3.0) / 2, 1e-10);
  EXPECT_NEAR(s.frequencies[1], 1.0, 1e-10);
  EXPECT_NEAR(s.frequencies[3], std::sqrt(3.0), 1e-10);
  EXPECT_EQ(s.branches[1], Branch::Axial);
  EXPECT_EQ(s.branches[3], Branch::Axial);
  EXPECT_EQ(s.branches[0], Branch::RadialY);
}

TEST(Modes, SymplecticAndDiagonal) {
  for (const Equilibrium& eq : {planar(9), penning(9)}) {
    const ModeSpectrum s = normal_modes(eq);
    const int M = s.num_modes();
    const Eigen::MatrixXd J = symplectic_form(M);
    EXPECT_LT((s.S.transpose() * J * s.S - J).norm(), 1e-8);
    Eigen::VectorXd w2(2 * M);
    w2 << s.frequencies, s.frequencies;
    EXPECT_LT((s.S.transpose() * s.H * s.S - Eigen::MatrixXd(w2.asDiagonal())).norm(), 1e-8);
    for (int n = 1; n < M; ++n) EXPECT_LE(s.frequencies[n - 1], s.frequencies[n]);
  }
}

TEST(Modes, EnergiesSumToQuadraticEnergy) {
  const Equilibrium eq = planar(6);
  const ModeSpectrum s = normal_modes(eq);
  const int M = s.num_modes();
  Eigen::VectorXd X(2 * M);
  for (int i = 0; i < 2 * M; ++i) X[i] = 1e-3 * std::cos(0.7 * i + 0.2);
  const Eigen::VectorXd dR = X.head(M), V = X.tail(M);
  const double quad = 0.5 * dR.dot(stiffness_matrix(eq) * dR) + 0.5 * V.squaredNorm();
  EXPECT_NEAR(mode_energies(s, X).sum(), quad, 1e-12 * quad);
}

TEST(Modes, QuarterTurnStaysSymplectic) {
  const ModeSpectrum s = quarter_turn(normal_modes(two_ion_resonant()), 3);
  const Eigen::MatrixXd J = symplectic_form(6);
  EXPECT_LT((s.S.transpose() * J * s.S - J).norm(), 1e-12);
}

TEST(Tensor, SymmetricLookup) {
  const SymmetricTensor3 t = SymmetricTensor3::from_accumulator(4, {{2, 0, 1, 1.5}, {1, 2, 0, 0.5}, {3, 3, 3, 1e-20}}, 1e-14);
  EXPECT_DOUBLE_EQ(t(0, 1, 2), 2.0);
  EXPECT_DOUBLE_EQ(t(2, 1, 0), 2.0);
  EXPECT_DOUBLE_EQ(t(3, 3, 3), 0.0);
  EXPECT_EQ(t.nnz(), 1u);
}

TEST(Tressian, MatchesFiniteDifferences) {
  const Equilibrium eq = planar(4);
  const CartesianTressian T = full_tressian(eq);
  const int D = static_cast<int>(eq.positions.size());
  const double h = 2e-4;
  for (int a = 0; a < D; a += 2)
    for (int b = 0; b < D; b += 3)
      for (int c = 1; c < D; c += 4) {
        Eigen::VectorXd eb = Eigen::VectorXd::Zero(D), ec = Eigen::VectorXd::Zero(D);
        eb[b] = h;
        ec[c] = h;
        auto g = [&](const Eigen::VectorXd& x) { return potential_gradient(x, eq.model)[a]; };
        const Eigen::VectorXd& x = eq.positions;
        const double fd = (g(x + eb + ec) - g(x + eb - ec) - g(x - eb + ec) + g(x - eb - ec)) / (4 * h * h);
        EXPECT_NEAR(fd, T(a, b, c), 1e-5 * std::max(1.0, std::abs(T(a, b, c))));
      }
}

TEST(Tressian, CubicModelMatchesPotential) {
  const Equilibrium eq = planar(5);
  const Eigen::MatrixXd K = stiffness_matrix(eq);
  const CartesianTressian T = full_tressian(eq);
  Eigen::VectorXd d(eq.positions.size());
  for (int i = 0; i < d.size(); ++i) d[i] = std::sin(2.1 * i + 0.3);
  d *= 1e-2 / d.norm();
  const double exact = potential_energy(eq.positions + d, eq.model) - potential_energy(eq.positions, eq.model);
  const double harmonic = 0.5 * d.dot(K * d);
  // The remainder after the cubic term is fourth order in |d|.
  EXPECT_LT(std::abs(exact - cubic_model_energy(K, T, d)), 0.05 * std::abs(exact - harmonic));
}

TEST(CubicModes, TransformPreservesCubicForm) {
  const Equilibrium eq = penning(5);
  const ModeSpectrum s = normal_modes(eq);
  const CartesianTressian T = full_tressian(eq);
  const CubicModeTensor mt = to_mode_basis(T, s);
  Eigen::VectorXd Z(2 * s.num_modes());
  for (int i = 0; i < Z.size(); ++i) Z[i] = std::cos(1.7 * i);
  const Eigen::VectorXd R = s.position_map() * Z;
  EXPECT_NEAR(mt.tensor.cubic_form(Z), T.cubic_form(R), 1e-9 * std::abs(T.cubic_form(R)) + 1e-12);
}

TEST(CubicModes, ContractorMatchesFullTransform) {
  const Equilibrium eq = penning(6);
  const ModeSpectrum s = normal_modes(eq);
  const CartesianTressian T = full_tressian(eq);
  const CubicModeTensor mt = to_mode_basis(T, s);
  TriadContractor tc(T, s);
  const int M = s.num_modes();
  for (int p : {3, M / 2, M - 1}) {
    tc.select(p);
    for (int n = 0; n < M; n += 3)
      for (int m = n; m < M; m += 4) {
        const QuadratureBlock b = tc.block(n, m);
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y)
            for (int z = 0; z < 2; ++z)
              EXPECT_NEAR(b.v[x][y][z], mt.element(n, Quadrature(x), m, Quadrature(y), p, Quadrature(z)), 1e-10);
      }
  }
}

TEST(CubicModes, TwoIonCoefficientsInSeparationUnits) {
  const Equilibrium eq = two_ion_resonant();
  const ModeSpectrum s = normal_modes(eq);
  const CubicModeTensor mt = to_mode_basis(full_tressian(eq), quarter_turn(s, 3));
  const double d = eq.positions[5] - eq.positions[4];
  EXPECT_NEAR(d * mt.monomial(6 + 3, 0, 0), 1.861209718, 2e-9);
  EXPECT_NEAR(d * mt.monomial(9, 9, 9), -0.620403239, 1e-9);
  const TwoIonCoupling c = two_ion_coupling(eq.trap);
  EXPECT_NEAR(d * std::abs(c.c_rwa), 1.8612097182 / (2 * std::sqrt(2.0)), 1e-9);
}

TEST(CubicModes, PlanarSymmetryZeros) {
  // x is the stiff axis: the crystal lies in the y-z plane.
  const Equilibrium eq = planar(7);
  const CartesianTressian T = full_tressian(eq);
  const int N = eq.num_ions;
  for (const auto& e : T.entries()) {
    const int xs = (e.a < N) + (e.b < N) + (e.c < N);
    EXPECT_EQ(xs % 2, 0) << e.a << ' ' << e.b << ' ' << e.c;
  }
}
