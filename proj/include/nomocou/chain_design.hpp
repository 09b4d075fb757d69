#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <iosfwd>
#include <utility>
#include <vector>

#include "nomocou/crystal.hpp"
#include "nomocou/units.hpp"

namespace nomocou {

// Axial potential shaping for an equally spaced chain. In units of the length
// l0 = (k_e q^2 / |a2|)^(1/3) the energy per ion is sgn(b) z^2 / 2 + z^4 / (4 |b|),
// with b = l0^-2 a2 / a4. Edge ions (n_aux per side) are left out of the
// spacing statistics.
struct ChainDesignOptions {
  int num_ions = 25;
  int n_aux = 2;
  double target_spacing = 4.4e-6;  // m, mean qubit-ion spacing after rescale
  IonSpecies species = IonSpecies::Yb171();
  double b_min = 1e-2, b_max = 1e3;  // |b| search range, both signs
  int grid = 81;                     // log-spaced samples per sign
  double log_tol = 1e-7;             // golden-section stop on ln|b|
};

struct ChainDesign {
  int num_ions = 0;
  int n_aux = 0;
  double b = 0.0;
  double s_z = 0.0;
  Eigen::VectorXd positions;  // dimensionless (old l0), ascending
  double l0 = 0.0;            // m, rescaled so the mean qubit spacing equals the target
  double a2 = 0.0;            // J/m^2
  double a4 = 0.0;            // J/m^4
  double omega0 = 0.0;        // sqrt(|a2| / m), rad/s
  Eigen::VectorXd axial_frequencies;  // units of omega0, ascending
  double harmonic_s_z = 0.0;          // same evaluator on the purely harmonic chain
  std::vector<std::pair<double, double>> samples;  // (b, s_z) grid
  IonSpecies species;

  double mean_qubit_spacing() const;  // dimensionless
  TrapConfig trap(double wx, double wy) const;
};

// Equilibrium of the 1-D chain above. quartic = 0 with spring_sign = +1 is the harmonic chain.
Eigen::VectorXd chain_equilibrium(int num_ions, double spring_sign, double quartic);
Eigen::MatrixXd chain_hessian(const Eigen::VectorXd& z, double spring_sign, double quartic);
inline Eigen::VectorXd chain_equilibrium_b(int num_ions, double b) {
  return chain_equilibrium(num_ions, b > 0 ? 1.0 : -1.0, 1.0 / std::abs(b));
}

// (1 / (N - 2 n_aux)) sum over qubit-ion gaps of (d_i / mean - 1)^2.
double spacing_variance(const Eigen::VectorXd& z, int n_aux);

ChainDesign optimize_spacing(const ChainDesignOptions& opt);

void write_design_json(std::ostream& out, const ChainDesign& d);

}  // namespace nomocou
