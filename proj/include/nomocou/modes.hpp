#pragma once

#include <Eigen/Dense>
#include <string_view>
#include <vector>

#include "nomocou/crystal.hpp"

namespace nomocou {

enum class Branch { Axial, RadialX, RadialY, PlanarExB, PlanarCyclotron, Unclassified };

std::string_view branch_name(Branch b);
bool is_axial(Branch b);

// Phase-space coordinates Z = (Q_1..Q_M, P_1..P_M) with M = 3N modes, and
// X = (R, V) = (x_1..z_N, vx_1..vz_N). Quadratic energy is sum_n w_n (Q_n^2 + P_n^2) / 2.
struct ModeSpectrum {
  Eigen::VectorXd frequencies;  // units of omega0, ascending
  Eigen::MatrixXd S;            // (R, p) = S Z; S^T J S = J, S^T H S = diag(w, w)
  Eigen::MatrixXd T;            // (R, p) = T (R, V)
  Eigen::MatrixXd A;            // Z = A X, A = S^-1 T
  Eigen::MatrixXd H;            // phase-space Hamiltonian matrix in (R, p)
  std::vector<Branch> branches;
  double diag_residual = 0.0;
  double symplectic_residual = 0.0;
  bool penning = false;

  int num_modes() const { return static_cast<int>(frequencies.size()); }
  // Rows of A^-1 giving positions: R = W Z.
  Eigen::MatrixXd position_map() const { return S.topRows(num_modes()); }
};

Eigen::MatrixXd symplectic_form(int half_dim);

Eigen::MatrixXd stiffness_matrix(const Equilibrium& eq);

ModeSpectrum normal_modes(const Equilibrium& eq);

std::vector<Branch> classify_branches(const ModeSpectrum& spec, const Equilibrium& eq);

// Energies (w_n / 2)(Q_n^2 + P_n^2) of a phase-space displacement X = (dR, V).
Eigen::VectorXd mode_energies(const ModeSpectrum& spec, const Eigen::VectorXd& X);

}  // namespace nomocou
