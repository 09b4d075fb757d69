#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "nomocou/correspondence.hpp"
#include "nomocou/errors.hpp"
#include "nomocou/gate.hpp"
#include "nomocou/runner.hpp"

using namespace nomocou;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

TrapConfig two_ion_trap() {
  const double wz = 2 * M_PI * 1.1604134e6;
  TrapConfig t;
  t.variant = RfHarmonic{2 * M_PI * 10e6, std::sqrt(7.0) / 2 * wz, wz};
  t.species = IonSpecies::Yb171();
  return t;
}

}  // namespace

TEST(Fock, LadderElements) {
  const Eigen::MatrixXcd a = ladder_lower(6);
  for (int n = 1; n < 6; ++n) EXPECT_NEAR(a(n - 1, n).real(), std::sqrt(n), 1e-15);
  EXPECT_NEAR(std::abs(a.sum()), [] {
    double s = 0;
    for (int n = 1; n < 6; ++n) s += std::sqrt(n);
    return s;
  }(), 1e-12);
  const Eigen::MatrixXcd comm = a * a.adjoint() - a.adjoint() * a;
  for (int n = 0; n < 5; ++n) EXPECT_NEAR(comm(n, n).real(), 1.0, 1e-14);
  const Eigen::MatrixXcd x = quadrature_x(6), p = quadrature_p(6);
  EXPECT_LT(max_abs(x - (a + a.adjoint()) / std::sqrt(2.0)), 1e-15);
  EXPECT_LT(max_abs(p - cd(0, -1) * (a - a.adjoint()) / std::sqrt(2.0)), 1e-15);
}

TEST(Fock, LayoutAndEmbedding) {
  HilbertLayout h;
  h.spin_dim = 4;
  h.dims = {3, 5};
  EXPECT_EQ(h.total(), 60);
  EXPECT_EQ(h.stride(1), 1);
  EXPECT_EQ(h.stride(0), 5);
  const Eigen::VectorXcd v = fock_state(h, 2, {1, 4});
  const SparseOp n0 = number_op(h, 0), n1 = number_op(h, 1);
  EXPECT_NEAR(v.dot(n0 * v).real(), 1.0, 1e-15);
  EXPECT_NEAR(v.dot(n1 * v).real(), 4.0, 1e-15);
  long idx = 0;
  for (; idx < v.size(); ++idx)
    if (std::abs(v[idx]) > 0) break;
  EXPECT_EQ(h.spin(idx), 2);
  EXPECT_EQ(h.level(idx, 0), 1);
  EXPECT_EQ(h.level(idx, 1), 4);
}

TEST(Fock, CoherentStatePhase) {
  const cd alpha = std::polar(1.5, 0.7);
  const Eigen::VectorXcd c = coherent_amplitudes(40, alpha);
  EXPECT_NEAR(c.norm(), 1.0, 1e-12);
  const Eigen::MatrixXcd a = ladder_lower(40);
  const cd mean = c.dot(a * c);
  EXPECT_NEAR(std::abs(mean - alpha), 0.0, 1e-10);
  EXPECT_NEAR(c[0].real(), std::exp(-0.5 * std::norm(alpha)), 1e-14);
}

TEST(Evolve, ReachableSubspaceOfNumberConservingDynamics) {
  HilbertLayout h;
  h.dims = {6, 6};
  Hamiltonian H;
  H.add(SparseOp(lower_op(h, 0) * raise_op(h, 1)), constant_coeff(0.3));
  H.add(SparseOp(raise_op(h, 0) * lower_op(h, 1)), constant_coeff(0.3));
  // From |2, 0> the excitation number stays 2: levels (2,0), (1,1), (0,2).
  const auto sub = reachable_subspace(H, {fock_state(h, 0, {2, 0})});
  EXPECT_EQ(sub.size(), 3u);
  EvolveStats st;
  const auto out = evolve(fock_state(h, 0, {2, 0}), H, {0.0, 1.0, 5.0}, {}, &st);
  EXPECT_EQ(st.subspace_dim, 3);
  for (const auto& psi : out) EXPECT_NEAR(psi.norm(), 1.0, 1e-8);
  EXPECT_NEAR(out[1].dot(number_op(h, 0) * out[1]).real() + out[1].dot(number_op(h, 1) * out[1]).real(), 2.0, 1e-9);
}

TEST(Evolve, DensityMatchesPureState) {
  HilbertLayout h;
  h.dims = {5};
  Hamiltonian H;
  H.add(lower_op(h, 0), phase_coeff(0.2, 0.5));
  H.add(raise_op(h, 0), phase_coeff(0.2, -0.5));
  const Eigen::VectorXcd psi0 = fock_state(h, 0, {1});
  EvolveOptions o;
  o.tol = 1e-12;
  o.restrict_to_reachable = false;
  const auto psi = evolve(psi0, H, {3.0}, o);
  const auto rho = evolve_density(psi0 * psi0.adjoint(), H, {3.0}, o);
  EXPECT_LT(max_abs(rho[0] - psi[0] * psi[0].adjoint()), 1e-9);
}

TEST(Spin, FidelityAndEntropyLimits) {
  const Eigen::Vector4cd bell = bell_target(-M_PI / 2);
  const Eigen::Matrix4cd pure = bell * bell.adjoint();
  EXPECT_NEAR(bell_fidelity(pure), 1.0, 1e-15);
  EXPECT_NEAR(spin_entropy(pure), 0.0, 1e-12);
  const Eigen::Matrix4cd mixed = Eigen::Matrix4cd::Identity() / 4.0;
  EXPECT_NEAR(bell_fidelity(mixed), 0.25, 1e-15);
  EXPECT_NEAR(spin_entropy(mixed), 2.0, 1e-12);
  const Eigen::Vector4cd other = bell_target(M_PI / 2);
  EXPECT_NEAR(bell_fidelity(other * other.adjoint()), 0.0, 1e-15);
}

TEST(Thermal, MembersWeightsAndMean) {
  FockConfig c;
  c.qubits = false;
  c.weight_cutoff = 1e-6;
  c.modes = {{"a", 1.0, 80, 2.0}, {"b", 0.5, 3, 0.0}};
  const auto m = thermal_members(c);
  double sum = 0.0, mean = 0.0;
  for (const auto& e : m) {
    sum += e.weight;
    mean += e.weight * e.levels[0];
    EXPECT_EQ(e.levels[1], 0);
  }
  EXPECT_LT(1.0 - sum, 1e-6);
  EXPECT_GE(1.0 - sum, 0.0);
  EXPECT_NEAR(mean, 2.0, 1e-4);
  c.modes[0].cutoff = 10;
  EXPECT_THROW(thermal_members(c), ConfigError);
}

TEST(Gate, SingleLoopClosesInGroundState) {
  for (int k : {1, 3}) {
    FockConfig fc;
    fc.modes = {{"bus", 1.0, 14, 0.0}};
    GateConfig g;
    g.t_gate = 2 * M_PI * 200;
    g.loops = k;
    g.eta = 0.096;
    const auto r = thermal_ensemble_run(
        fc, [&](const HilbertLayout& h) { return build_ms_hamiltonian(h, g); }, {g.t_gate}, {});
    EXPECT_GT(r.fidelity.back(), 0.9999) << "loops " << k;
  }
}

TEST(Gate, TriadMatchesRwaCubicTerms) {
  const TwoIonCoupling c = two_ion_coupling(two_ion_trap());
  HilbertLayout h;
  h.dims = {4, 6};  // breathing, tilt
  Hamiltonian triad, cubic;
  add_triad_terms(triad, h, {{1, 1, 0, c.eps0 * c.c_rwa, c.w_breathing - 2 * c.w_tilt}});
  add_cubic_terms(cubic, h, c.poly, {1, 0}, {c.w_tilt, c.w_breathing}, c.eps0, true);
  for (double t : {0.0, 1.3, 7.9}) {
    const Eigen::MatrixXcd a = triad.dense(t), b = cubic.dense(t);
    EXPECT_LT(max_abs(a - b), 1e-12 * max_abs(a)) << "t = " << t;
  }
}

TEST(Gate, ThreeModeExchangePeriod) {
  ThreeModeModel m;
  m.t_tl = 2 * M_PI * 50;
  HilbertLayout h;
  h.dims = {3, 3, 3};
  Hamiltonian H;
  add_triad_terms(H, h, {{2, 1, 0, cd(m.g(), 0), m.detuning()}});
  const auto out = evolve(fock_state(h, 0, {1, 0, 0}), H, {m.t_tl / 2, m.t_tl});
  EXPECT_NEAR(std::norm(out[0].dot(fock_state(h, 0, {0, 1, 1}))), 1.0, 1e-7);
  EXPECT_NEAR(std::norm(out[1].dot(fock_state(h, 0, {1, 0, 0}))), 1.0, 1e-7);
}

TEST(Gate, ValidatesInputs) {
  FockConfig fc;
  fc.modes = {{"bus", 1.0, 4, 0.0}};
  GateConfig g;
  EXPECT_THROW(validate(g, fc), InvalidInput);
  g.t_gate = 1.0;
  g.loops = 0;
  EXPECT_THROW(validate(g, fc), InvalidInput);
}

TEST(Correspondence, ShortRunAgreesAtSmallEps) {
  CorrespondenceConfig c;
  c.eps0 = 0.05;
  c.periods = 3;
  c.samples = 60;
  const auto r = correspondence_study(c);
  EXPECT_LT(r.l2_distance, 0.05);
  EXPECT_EQ(r.times.size(), 61u);
  EXPECT_NEAR(r.classical_energy(0, 0), c.energy, 1e-12);
  EXPECT_THROW(relative_l2(Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(2)), InvalidInput);
}
