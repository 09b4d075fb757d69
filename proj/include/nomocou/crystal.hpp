#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>

#include "nomocou/units.hpp"

namespace nomocou {

struct RfHarmonic {
  double wx = 0.0, wy = 0.0, wz = 0.0;  // rad/s
};

// Axial potential sum_i (a2 z_i^2 / 2 + a4 z_i^4 / 4), radial harmonic.
struct RfAnharmonicAxial {
  double wx = 0.0, wy = 0.0;  // rad/s
  double a2 = 0.0;            // J/m^2, either sign
  double a4 = 0.0;            // J/m^4, positive
};

// Rotating-frame description. wall_delta is the rotating-wall strength: the
// planar spring constants are w_rot (w_c - w_rot) - wz^2 (1/2 -+ delta).
struct Penning {
  double wz = 0.0;     // rad/s
  double B = 0.0;      // T
  double w_rot = 0.0;  // rad/s
  double wall_delta = 0.0;
};

using TrapVariant = std::variant<RfHarmonic, RfAnharmonicAxial, Penning>;

struct TrapConfig {
  TrapVariant variant;
  IonSpecies species;
  double omega0_override = 0.0;  // rad/s; 0 selects the natural reference frequency

  bool is_penning() const { return std::holds_alternative<Penning>(variant); }
};

void validate(const TrapConfig& trap);

// Default reference frequency: wz for RfHarmonic and Penning, sqrt(|a2|/m) for the quartic trap.
double reference_omega(const TrapConfig& trap);
ScaleSet trap_scales(const TrapConfig& trap);

// Rotating-frame planar angular frequencies squared, (x, y), in rad^2/s^2.
Eigen::Vector2d penning_planar_omega_sq(const Penning& p, const IonSpecies& s);

// Trap in units of (l0, E0, omega0). Energy per ion:
//   sum_a spring[a] * r_a^2 / 2 + quartic * z^4 / 4
// and in a Penning rotating frame the velocity-dependent force is
// cyclotron * (-v_y, v_x, 0).
struct TrapModel {
  Eigen::Vector3d spring = Eigen::Vector3d::Zero();
  double quartic = 0.0;
  double cyclotron = 0.0;
  bool penning = false;
};

// Penning trap (given wz and B) whose rotating-frame spring ratios equal those of
// a planar rf crystal, so both equilibria agree up to a rotation and a global
// scale. The stiffest rf axis maps onto z; the slower of the two rotation roots
// is used.
Penning match_rf_anisotropy(const RfHarmonic& rf, double wz, double B, const IonSpecies& species);

TrapModel dimensionless_model(const TrapConfig& trap);

// Layout of Cartesian vectors: x_1..x_N, y_1..y_N, z_1..z_N.
inline int coord_index(int axis, int ion, int n) { return axis * n + ion; }

// Energy in units of E0 / 2: the Coulomb part is sum_{i<j} 2 / r_ij.
double total_potential(const Eigen::VectorXd& pos, const TrapConfig& trap);

// Same potential in units of E0 (Coulomb sum_{i<j} 1 / r_ij). All derivatives
// below, and everything downstream, use this normalization.
double potential_energy(const Eigen::VectorXd& pos, const TrapModel& model);
Eigen::VectorXd potential_gradient(const Eigen::VectorXd& pos, const TrapModel& model);
Eigen::MatrixXd potential_hessian(const Eigen::VectorXd& pos, const TrapModel& model);

struct EquilibriumOptions {
  double gradient_tol = 1e-10;
  int max_iterations = 20000;
  double jitter = 1e-3;
};

struct Equilibrium {
  Eigen::VectorXd positions;  // dimensionless, layout as above
  ScaleSet scales;
  TrapConfig trap;
  TrapModel model;
  int num_ions = 0;
  double energy = 0.0;  // units of E0
  double residual_gradient_norm = 0.0;
  bool structure_mismatch = false;  // a line seed relaxed away from a line

  Eigen::Vector3d ion(int i) const {
    return {positions[i], positions[num_ions + i], positions[2 * num_ions + i]};
  }
};

Equilibrium find_equilibrium(const TrapConfig& trap, int num_ions, std::uint64_t seed,
                             const EquilibriumOptions& options = {});

// Builds an Equilibrium record from given positions (polished by Newton steps).
Equilibrium equilibrium_from_positions(const TrapConfig& trap, const Eigen::VectorXd& guess,
                                       const EquilibriumOptions& options = {});

// Orthogonal Procrustes with one global scale: min over R, s of |s A R - B|,
// returned relative to |B|. Points are rows.
double procrustes_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

Eigen::MatrixXd positions_as_rows(const Equilibrium& eq);

}  // namespace nomocou
