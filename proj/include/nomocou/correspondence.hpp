#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "nomocou/dynamics.hpp"
#include "nomocou/fock.hpp"

namespace nomocou {

// Two-mode testbed H = sum_k w_k (Q_k^2 + P_k^2) / 2 + coupling Q_0^2 P_1 with
// 2 w_0 = w_1, evolved classically (reduced symplectic model) and quantum
// mechanically (Fock space, no rotating-wave approximation).
struct CorrespondenceConfig {
  double eps0 = 0.01;
  double coupling = 1.0;
  double w0 = 1.0, w1 = 2.0;
  double energy = 1e-2;  // initial classical energy of mode 0, Q_0 = sqrt(2 E / w0), P_0 = 0
  int periods = 50;      // of mode 0
  int samples = 1000;
  double crm_dt = 0.005;
  int cut0 = 0, cut1 = 0;  // 0 picks cutoffs from the initial occupation
  // Hundreds of oscillation periods: a tighter step tolerance keeps the
  // accumulated norm drift under the 1e-8 limit.
  EvolveOptions evolve{.tol = 1e-11};
};

ReducedHamiltonian correspondence_hamiltonian(const CorrespondenceConfig& cfg);

struct CorrespondenceResult {
  std::vector<double> times;
  Eigen::MatrixXd classical_energy;  // samples x 2, units of E0
  Eigen::MatrixXd quantum_energy;    // eps0^2 w <n>, zero point excluded
  Eigen::MatrixXd classical_qp;      // samples x 4: Q0, P0, Q1, P1
  Eigen::MatrixXd quantum_qp;        // <Q>, <P> in the same units
  double l2_distance = 0.0;          // relative L2 distance of the mode-0 energy curves
  double divergence_time = 0.0;      // first time |dE_0| > 10% of the initial energy; inf if never
  int cut0 = 0, cut1 = 0;
  double max_norm_error = 0.0;
};

CorrespondenceResult correspondence_study(const CorrespondenceConfig& cfg);

// |a - b|_2 / |b|_2
double relative_l2(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

void write_correspondence_csv(std::ostream& out, const CorrespondenceResult& r);

}  // namespace nomocou
