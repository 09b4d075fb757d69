#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace nomocou {

using cd = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<cd, Eigen::RowMajor>;

// Product basis spin (x) mode_0 (x) mode_1 ...; the last mode varies fastest.
// spin_dim is 1 (no qubits) or 4 (two qubits, basis |00>, |01>, |10>, |11>).
struct HilbertLayout {
  int spin_dim = 1;
  std::vector<int> dims;  // Fock levels kept per mode

  long total() const;
  long motional() const;
  long stride(int mode) const;
  int level(long index, int mode) const;
  int spin(long index) const { return static_cast<int>(index / motional()); }
};

SparseOp identity_op(const HilbertLayout& h);
SparseOp lower_op(const HilbertLayout& h, int mode);
SparseOp raise_op(const HilbertLayout& h, int mode);
SparseOp number_op(const HilbertLayout& h, int mode);
// Embeds a dims[mode] x dims[mode] matrix acting on one mode.
SparseOp mode_op(const HilbertLayout& h, int mode, const Eigen::MatrixXcd& local);
SparseOp spin_op(const HilbertLayout& h, const Eigen::Matrix4cd& local);

// Truncated single-mode matrices.
Eigen::MatrixXcd ladder_lower(int dim);
Eigen::MatrixXcd quadrature_x(int dim);  // (a + a^dagger) / sqrt(2)
Eigen::MatrixXcd quadrature_p(int dim);  // -i (a - a^dagger) / sqrt(2)

Eigen::VectorXcd fock_state(const HilbertLayout& h, int spin, const std::vector<int>& levels);
Eigen::VectorXcd coherent_amplitudes(int dim, cd alpha);
// Product of a spin vector and per-mode vectors.
Eigen::VectorXcd product_state(const HilbertLayout& h, const Eigen::Vector4cd& spin,
                               const std::vector<Eigen::VectorXcd>& modes);

using Coefficient = std::function<cd(double)>;

Coefficient constant_coeff(cd c);
Coefficient phase_coeff(cd c, double frequency);  // c exp(i frequency t)

// One (constant operator, scalar function of time) pair.
struct Term {
  SparseOp op;
  Coefficient coeff;
  std::string label;
};

struct Hamiltonian {
  std::vector<Term> terms;

  void add(SparseOp op, Coefficient c, std::string label = {});
  // out = -i H(t) in
  void apply_generator(double t, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  Eigen::MatrixXcd dense(double t) const;
  long dim() const { return terms.empty() ? 0 : terms.front().op.rows(); }
};

// Smallest coordinate subspace containing the support of the start vectors and
// closed under every operator's sparsity pattern. Indices ascending.
std::vector<long> reachable_subspace(const Hamiltonian& h, const std::vector<Eigen::VectorXcd>& starts);
Hamiltonian restrict_hamiltonian(const Hamiltonian& h, const std::vector<long>& subspace);

struct EvolveOptions {
  double tol = 1e-9;
  double norm_tol = 1e-8;
  double min_step = 1e-10;
  long max_steps = 50'000'000;
  bool restrict_to_reachable = true;
};

struct EvolveStats {
  long steps = 0;
  long rejected = 0;
  double max_norm_error = 0.0;
  long subspace_dim = 0;
};

// Adaptive Dormand-Prince 5(4) integration of i psi' = H(t) psi. Returns the
// state at each requested time (ascending, starting at or after 0). The vector
// is never renormalized; a norm error beyond norm_tol throws NumericalFailure.
std::vector<Eigen::VectorXcd> evolve(const Eigen::VectorXcd& psi0, const Hamiltonian& h,
                                     const std::vector<double>& times, const EvolveOptions& opt = {},
                                     EvolveStats* stats = nullptr);

// Density-matrix propagation rho' = -i [H, rho] with the same integrator.
std::vector<Eigen::MatrixXcd> evolve_density(const Eigen::MatrixXcd& rho0, const Hamiltonian& h,
                                             const std::vector<double>& times, const EvolveOptions& opt = {});

}  // namespace nomocou
