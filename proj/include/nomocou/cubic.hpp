#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nomocou/crystal.hpp"
#include "nomocou/modes.hpp"

namespace nomocou {

struct TensorEntry {
  int a = 0, b = 0, c = 0;  // a <= b <= c
  double value = 0.0;
};

// Fully symmetric rank-3 tensor stored once per sorted index triple.
class SymmetricTensor3 {
 public:
  SymmetricTensor3() = default;
  explicit SymmetricTensor3(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  const std::vector<TensorEntry>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }

  // Looks up T_abc for the indices in any order; zero when absent.
  double operator()(int a, int b, int c) const;

  // Dense symmetric matrix sum_c T_abc w_c.
  Eigen::MatrixXd contract(const Eigen::VectorXd& w) const;
  // sum_abc T_abc x_a x_b x_c.
  double cubic_form(const Eigen::VectorXd& x) const;

  // Builds from unordered accumulations; entries below floor are dropped.
  static SymmetricTensor3 from_accumulator(int dim, std::vector<TensorEntry> raw, double floor);

 private:
  int dim_ = 0;
  std::vector<TensorEntry> entries_;  // sorted lexicographically by (a, b, c)
};

// Third derivatives of the E0-normalized potential in Cartesian coordinates.
using CartesianTressian = SymmetricTensor3;

inline constexpr double kTensorFloor = 1e-14;

CartesianTressian coulomb_tressian(const Equilibrium& eq);
// Only the quartic axial trap contributes: T_zzz at ion i is 6 kappa z_i.
CartesianTressian trap_tressian(const Equilibrium& eq);
// Coulomb plus trap.
CartesianTressian full_tressian(const Equilibrium& eq);

CartesianTressian add(const CartesianTressian& x, const CartesianTressian& y);

enum class Quadrature { Q, P };

// Tensor over phase-space indices 0..2M-1: index n is Q_n, index M + n is P_n.
// Stored values are tensor elements T, so the cubic energy is (1/6) sum T z z z.
struct CubicModeTensor {
  int num_modes = 0;
  SymmetricTensor3 tensor;

  int index(int mode, Quadrature q) const { return q == Quadrature::Q ? mode : num_modes + mode; }
  double element(int n, Quadrature x, int m, Quadrature y, int p, Quadrature z) const {
    return tensor(index(n, x), index(m, y), index(p, z));
  }
  // Coefficient of the monomial z_u z_v z_w in the energy: T times multiplicity / 6.
  double monomial(int u, int v, int w) const;
};

CubicModeTensor to_mode_basis(const CartesianTressian& cart, const ModeSpectrum& spec);

double multiplicity(int u, int v, int w);

// All eight quadrature elements T_{nX, mY, pZ} for one mode triple, computed from
// a precontracted matrix sum_k T_ijk W_k(p, Z) (see TriadContractor).
struct QuadratureBlock {
  double v[2][2][2] = {};  // [X][Y][Z], 0 = Q, 1 = P
  double norm() const;
};

// Per-mode cache for triad scans on large crystals, avoiding the full transform.
class TriadContractor {
 public:
  TriadContractor(const CartesianTressian& cart, const ModeSpectrum& spec);
  // Prepares the two matrices for output mode p (Q and P slots).
  void select(int p);
  QuadratureBlock block(int n, int m) const;
  bool has_momentum_columns() const { return has_p_; }

 private:
  const CartesianTressian& cart_;
  Eigen::MatrixXd W_;  // positions = W * Z, M x 2M
  int M_ = 0;
  int p_ = -1;
  bool has_p_ = false;
  Eigen::MatrixXd MQ_, MP_;
};

// Canonical quarter turn of one mode: new (Q', P') = (-P, Q), so an old Q
// monomial reads as P'. Keeps S symplectic.
ModeSpectrum quarter_turn(const ModeSpectrum& spec, int mode);

// Energy of a Cartesian displacement: (1/2) d^T K d + (1/6) T ddd.
double cubic_model_energy(const Eigen::MatrixXd& K, const CartesianTressian& cart, const Eigen::VectorXd& d);

void write_tensor_csv(std::ostream& out, const CubicModeTensor& t, const std::string& header_comment);
void write_cartesian_csv(std::ostream& out, const CartesianTressian& t, int num_ions);

}  // namespace nomocou
