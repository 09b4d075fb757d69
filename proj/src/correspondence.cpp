#include "nomocou/correspondence.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "nomocou/errors.hpp"
#include "nomocou/gate.hpp"

namespace nomocou {

ReducedHamiltonian correspondence_hamiltonian(const CorrespondenceConfig& cfg) {
  ReducedHamiltonian h;
  h.num_modes = 2;
  const double w[2] = {cfg.w0, cfg.w1};
  for (int k = 0; k < 2; ++k)
    for (int q : {k, 2 + k}) {
      PolyTerm t{0.5 * w[k], std::vector<int>(4, 0)};
      t.powers[q] = 2;
      h.terms.push_back(t);
    }
  h.terms.push_back({cfg.coupling, {2, 0, 0, 1}});
  return h;
}

double relative_l2(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw InvalidInput("relative_l2: size mismatch");
  const double nb = b.norm();
  if (nb == 0.0) throw InvalidInput("relative_l2: reference curve is zero");
  return (a - b).norm() / nb;
}

namespace {

int auto_cutoff(double mean) { return static_cast<int>(std::ceil(mean + 8.0 * std::sqrt(mean) + 10.0)); }

}  // namespace

CorrespondenceResult correspondence_study(const CorrespondenceConfig& cfg) {
  if (!(cfg.eps0 > 0)) throw InvalidInput("correspondence: eps0 must be positive");
  if (!(cfg.energy > 0) || cfg.periods < 1 || cfg.samples < 1 || !(cfg.crm_dt > 0))
    throw InvalidInput("correspondence: invalid run settings");
  const double t_end = cfg.periods * 2 * M_PI / cfg.w0;
  const ReducedHamiltonian poly = correspondence_hamiltonian(cfg);
  const double Q0 = std::sqrt(2 * cfg.energy / cfg.w0);

  CorrespondenceResult r;
  r.times.resize(cfg.samples + 1);
  for (int i = 0; i <= cfg.samples; ++i) r.times[i] = t_end * i / cfg.samples;

  // Classical: reduced symplectic model sampled on the same grid.
  const double dt_sample = t_end / cfg.samples;
  const int sub = std::max(1, static_cast<int>(std::ceil(dt_sample / cfg.crm_dt)));
  CrmOptions co;
  co.dt = dt_sample / sub;
  co.steps = static_cast<long>(sub) * cfg.samples;
  co.stride = sub;
  co.order = 4;
  Eigen::VectorXd z0 = Eigen::VectorXd::Zero(4);
  z0[0] = Q0;
  const ReducedTrajectory ct = integrate_crm(poly, z0, co);
  const int ns = cfg.samples + 1;
  r.classical_energy.resize(ns, 2);
  r.classical_qp.resize(ns, 4);
  for (int i = 0; i < ns; ++i) {
    const Eigen::VectorXd& z = ct.states[i];
    r.classical_qp.row(i) << z[0], z[2], z[1], z[3];
    r.classical_energy(i, 0) = 0.5 * cfg.w0 * (z[0] * z[0] + z[2] * z[2]);
    r.classical_energy(i, 1) = 0.5 * cfg.w1 * (z[1] * z[1] + z[3] * z[3]);
  }

  // Quantum: layout ordered by descending frequency, mode 1 first.
  const double n0 = cfg.energy / (cfg.eps0 * cfg.eps0 * cfg.w0);
  r.cut0 = cfg.cut0 > 0 ? cfg.cut0 : auto_cutoff(n0);
  r.cut1 = cfg.cut1 > 0 ? cfg.cut1 : auto_cutoff(0.5 * n0);
  HilbertLayout h;
  h.spin_dim = 1;
  h.dims = {r.cut1, r.cut0};
  Hamiltonian H;
  add_cubic_terms(H, h, poly, {1, 0}, {cfg.w0, cfg.w1}, cfg.eps0, false);
  const cd alpha = Q0 / (cfg.eps0 * std::sqrt(2.0));
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(r.cut1);
  vac[0] = 1.0;
  const Eigen::VectorXcd psi0 = product_state(h, Eigen::Vector4cd::Zero(), {vac, coherent_amplitudes(r.cut0, alpha)});
  EvolveStats st;
  const auto states = evolve(psi0, H, r.times, cfg.evolve, &st);
  r.max_norm_error = st.max_norm_error;
  const SparseOp a1 = lower_op(h, 0), a0 = lower_op(h, 1);
  const SparseOp num1 = number_op(h, 0), num0 = number_op(h, 1);
  r.quantum_energy.resize(ns, 2);
  r.quantum_qp.resize(ns, 4);
  const double e2 = cfg.eps0 * cfg.eps0;
  for (int i = 0; i < ns; ++i) {
    const Eigen::VectorXcd& psi = states[i];
    const double t = r.times[i];
    r.quantum_energy(i, 0) = e2 * cfg.w0 * psi.dot(num0 * psi).real();
    r.quantum_energy(i, 1) = e2 * cfg.w1 * psi.dot(num1 * psi).real();
    // Interaction-picture <a> back to the lab frame; Q = eps0 sqrt2 Re a, P = eps0 sqrt2 Im a.
    const cd m0 = psi.dot(a0 * psi) * std::polar(1.0, -cfg.w0 * t);
    const cd m1 = psi.dot(a1 * psi) * std::polar(1.0, -cfg.w1 * t);
    const double s = cfg.eps0 * std::sqrt(2.0);
    r.quantum_qp.row(i) << s * m0.real(), s * m0.imag(), s * m1.real(), s * m1.imag();
  }
  r.l2_distance = relative_l2(r.quantum_energy.col(0), r.classical_energy.col(0));
  r.divergence_time = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ns; ++i)
    if (std::abs(r.quantum_energy(i, 0) - r.classical_energy(i, 0)) > 0.1 * cfg.energy) {
      r.divergence_time = r.times[i];
      break;
    }
  return r;
}

void write_correspondence_csv(std::ostream& out, const CorrespondenceResult& r) {
  out << "time,E0_classical,E1_classical,E0_quantum,E1_quantum,Q0_classical,P0_classical,Q1_classical,P1_classical,"
         "Q0_quantum,P0_quantum,Q1_quantum,P1_quantum\n";
  out.precision(12);
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    out << r.times[i];
    for (int k = 0; k < 2; ++k) out << ',' << r.classical_energy(i, k);
    for (int k = 0; k < 2; ++k) out << ',' << r.quantum_energy(i, k);
    for (int k = 0; k < 4; ++k) out << ',' << r.classical_qp(i, k);
    for (int k = 0; k < 4; ++k) out << ',' << r.quantum_qp(i, k);
    out << '\n';
  }
}

}  // namespace nomocou
