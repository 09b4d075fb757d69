#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nomocou/dynamics.hpp"
#include "nomocou/fock.hpp"

namespace nomocou {

// One motional mode of a Fock model. Frequencies in units of omega0.
struct FockMode {
  std::string name;
  double frequency = 0.0;
  int cutoff = 1;
  double nbar = 0.0;
};

struct FockConfig {
  std::vector<FockMode> modes;  // storage order: descending frequency
  bool qubits = true;
  double weight_cutoff = 1e-3;  // neglected thermal weight per thermal mode
  // When >= 0, a thermal mode's cutoff follows each member: n + adaptive_margin.
  int adaptive_margin = -1;
  int max_cutoff = 2000;
};

void validate(const FockConfig& cfg);
HilbertLayout layout_for(const FockConfig& cfg, const std::vector<int>& start_levels);

struct GateConfig {
  double t_gate = 0.0;  // units of 1/omega0
  int loops = 1;
  double eta = 0.1;
  int bus = 0;                   // index into FockConfig::modes
  double bell_phase = -M_PI / 2;  // target (|00> + e^{i phase} |11>) / sqrt(2)
  double omega0 = 0.0;           // rad/s, only for reporting seconds
  double bus_frequency = 1.0;    // units of omega0, defines T_bus

  double delta() const;    // 2 pi k / T_gate
  double omega_r() const;  // delta / (2 sqrt(k) eta)
  double t_bus() const { return 2 * M_PI / bus_frequency; }
  double t_gate_seconds() const { return omega0 > 0 ? t_gate / omega0 : 0.0; }
};

void validate(const GateConfig& g, const FockConfig& cfg);

// Lamb-Dicke parameter of a mode: dk * |b| sqrt(hbar / (2 m w)) with b the
// ion's participation in the mode, w in rad/s.
double lamb_dicke(double dk, double mass, double omega, double participation);

// Two-qubit operators in the basis |q1 q2>, index 2 q1 + q2, sigma_z |0> = |0>.
Eigen::Matrix4cd collective_spin_y();
Eigen::Vector4cd y_basis_state(int q1, int q2);  // |q1 q2>_y
Eigen::Vector4cd bell_target(double phase);

// -sqrt(2) eta Omega_r J_y [x cos(delta t) + p sin(delta t)] on the bus, in
// the interaction picture of the bus.
Hamiltonian build_ms_hamiltonian(const HilbertLayout& h, const GateConfig& g);

// eps0 C a_n a_m a_p^dagger e^{i delta t} + h.c. with layout mode indices.
struct TriadCoupling {
  int n = 0, m = 0, p = 0;
  std::complex<double> strength;  // eps0 * C, units of omega0
  double delta = 0.0;
};

void add_triad_terms(Hamiltonian& h, const HilbertLayout& layout, const std::vector<TriadCoupling>& triads);

// Quantized cubic monomials of a reduced classical Hamiltonian (E0 units) with
// Q = eps0 x, P = eps0 p, symmetric operator ordering, all oscillating phases of
// the interaction picture. mode_map[k] is the layout mode of reduced mode k and
// frequencies[k] its frequency. With rwa set, only terms with |total phase
// frequency| <= rwa_cut survive.
void add_cubic_terms(Hamiltonian& h, const HilbertLayout& layout, const ReducedHamiltonian& poly,
                     const std::vector<int>& mode_map, const std::vector<double>& frequencies, double eps0,
                     bool rwa, double rwa_cut = 1e-2);

// Thermal Fock members over modes with nbar > 0: p_n = nbar^n / (nbar + 1)^(n+1)
// truncated where the tail drops below the weight cutoff, then renormalized.
struct EnsembleMember {
  std::vector<int> levels;  // start level per mode
  double weight = 0.0;
};

std::vector<EnsembleMember> thermal_members(const FockConfig& cfg);

using HamiltonianBuilder = std::function<Hamiltonian(const HilbertLayout&)>;

struct ObservableSpec {
  int bus = -1;  // conditional quadratures of this mode (needs qubits)
  // Back-action correlator <c b> on the |11>_y branch; both -1 to skip.
  int spectator_b = -1, spectator_c = -1;
  double backaction_scale = 0.0;  // |g| / (eta Omega_r sqrt 2)
  double bell_phase = -M_PI / 2;
};

struct EnsembleResult {
  std::vector<double> times;
  std::vector<double> fidelity;
  std::vector<double> entropy;
  Eigen::MatrixXd mode_number;                 // times x modes, <a^dagger a>
  std::array<std::vector<double>, 2> cond_x;   // branches 00_y, 11_y
  std::array<std::vector<double>, 2> cond_p;
  std::array<std::vector<double>, 2> branch_population;
  std::vector<double> backaction;
  std::vector<Eigen::Matrix4cd> spin_rho;
  int members = 0;
  double weight_kept = 0.0;  // before renormalization
  double max_norm_error = 0.0;
  long max_subspace = 0;
};

// Pure-state ensemble: each member starts in |00> (x) |levels> and is evolved
// independently; observables are weighted sums at the output times.
EnsembleResult thermal_ensemble_run(const FockConfig& cfg, const HamiltonianBuilder& build,
                                    const std::vector<double>& times, const ObservableSpec& obs,
                                    const EvolveOptions& opt = {});

// Observables of a single state, accumulated with a weight (used by the ensemble
// and exposed for oracle tests).
struct StateMoments {
  Eigen::Matrix4cd spin_rho = Eigen::Matrix4cd::Zero();
  std::vector<double> number;
  std::array<double, 2> pop{}, x{}, p{};
  std::complex<double> cb11 = 0.0;
};

StateMoments state_moments(const HilbertLayout& h, const Eigen::VectorXcd& psi, const ObservableSpec& obs);
StateMoments density_moments(const HilbertLayout& h, const Eigen::MatrixXcd& rho, const ObservableSpec& obs);

Eigen::Matrix4cd reduced_spin(const HilbertLayout& h, const Eigen::VectorXcd& psi);
double bell_fidelity(const Eigen::Matrix4cd& spin_rho, double phase = -M_PI / 2);
double spin_entropy(const Eigen::Matrix4cd& spin_rho);

// Three-mode sum-frequency model (c + b ~ a, a the bus) with g set from the
// two-level period: the isolated exchange |1_a 0_b 0_c> <-> |0_a 1_b 1_c> has
// Rabi rate g and we take T_TL = pi / g, matching the triad scanner.
struct ThreeModeModel {
  double wa = 1.0, wb = 0.75, wc = 0.25;
  double t_tl = 0.0;  // units of 1/omega0
  int cut_a = 8, cut_b = 4, cut_c = 5;
  int margin_c = 3;  // adaptive thermal cutoff n_c + margin_c
  double nbar_c = 0.0;

  double g() const;
  double detuning() const { return wa - wb - wc; }
};

FockConfig three_mode_fock(const ThreeModeModel& m, double weight_cutoff, bool adaptive);
HamiltonianBuilder three_mode_builder(const ThreeModeModel& m, const GateConfig& gate);
EnsembleResult run_three_mode_gate(const ThreeModeModel& m, const GateConfig& gate, int samples,
                                   double weight_cutoff, bool adaptive, const EvolveOptions& opt = {});

// Two-ion gate on the breathing mode with the tilt as spectator. Frequencies in
// units of omega0; the motional coupling is either the single TTB triad (RWA)
// or every quantized cubic monomial of `poly` (reduced modes: 0 tilt, 1 breathing).
struct TwoIonGateModel {
  double w_tilt = 0.0, w_breathing = 0.0;
  double eps0 = 0.0;
  std::complex<double> c_rwa;  // TTB coefficient
  ReducedHamiltonian poly;     // only needed when rwa is false
  bool rwa = true;
  int cut_tilt = 22, cut_breathing = 10;
  double nbar_tilt = 0.0;
  double weight_cutoff = 1e-3;
};

struct GateSummary {
  double fidelity = 0.0;
  double entropy = 0.0;
  double spectator_energy = 0.0;  // <H> of the spectator over hbar omega0, zero point excluded
};

EnsembleResult run_two_ion_gate(const TwoIonGateModel& m, const GateConfig& gate, int samples,
                                const EvolveOptions& opt = {});
GateSummary summarize(const EnsembleResult& r, int spectator_mode, double spectator_frequency);

}  // namespace nomocou
