#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nomocou/cubic.hpp"
#include "nomocou/modes.hpp"

namespace nomocou {

enum class Frame { Lab, Rotating };

// Dimensionless state (lengths in l0, velocities in l0 omega0, time in 1/omega0).
struct PhaseSpaceState {
  Eigen::VectorXd positions;
  Eigen::VectorXd velocities;
  Frame frame = Frame::Lab;
  double time = 0.0;

  Eigen::VectorXd stacked() const;
};

struct ModeAmplitudes {
  Eigen::VectorXd energies;  // per mode, units of E0
  Eigen::VectorXd phases;    // radians; Q = r cos(phase), P = r sin(phase)
};

// Every mode at k_B T with phases uniform on [0, 2 pi).
ModeAmplitudes thermal_amplitudes(const ModeSpectrum& spec, const ScaleSet& scales, double kelvin, std::uint64_t seed);

// Equilibrium plus a superposition of modes. Mode velocities are those of the
// frame the spectrum was computed in (rotating for Penning).
PhaseSpaceState init_modes(const ModeSpectrum& spec, const Equilibrium& eq, const ModeAmplitudes& amps);

// Rotation rate of the frame in units of omega0 (0 outside Penning traps).
double frame_rotation(const Equilibrium& eq);
PhaseSpaceState to_lab(const PhaseSpaceState& s, double rotation);
PhaseSpaceState to_rotating(const PhaseSpaceState& s, double rotation);

struct MdOptions {
  double dt = 0.0;  // units of 1/omega0
  long steps = 0;
  int stride = 1;
  double blowup_fraction = 0.1;  // relative energy jump that aborts the run
  bool keep_states = true;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseSpaceState> states;
  Eigen::MatrixXd mode_energy;  // samples x modes, units of E0 (empty without a spectrum)
  std::vector<double> total_energy;
};

// Energy conserved by the integrator: kinetic plus effective potential.
double total_energy(const PhaseSpaceState& s, const TrapModel& model);

// Velocity Verlet for rf traps; for Penning traps a kick-rotate-kick splitting
// with the exact magnetic rotation. Integrates in the rotating frame.
Trajectory integrate_md(const PhaseSpaceState& start, const Equilibrium& eq, const MdOptions& opt,
                        const ModeSpectrum* spec = nullptr);

Eigen::MatrixXd mode_energies(const Trajectory& traj, const ModeSpectrum& spec, const Equilibrium& eq);

struct ModeEnergyStats {
  Eigen::VectorXd mean, stddev;  // units of E0
};
ModeEnergyStats mode_energy_stats(const Eigen::MatrixXd& energies);

// Polynomial in reduced coordinates z = (Q_0..Q_{K-1}, P_0..P_{K-1}).
struct PolyTerm {
  double coeff = 0.0;
  std::vector<int> powers;  // length 2K
};

struct ReducedHamiltonian {
  int num_modes = 0;
  std::vector<PolyTerm> terms;

  double value(const Eigen::VectorXd& z) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& z) const;
};

// Harmonic part plus every cubic monomial among the selected modes.
ReducedHamiltonian reduce_hamiltonian(const ModeSpectrum& spec, const CubicModeTensor& tensor,
                                      const std::vector<int>& modes);

enum class Mixing { None, Average };

struct CrmOptions {
  double dt = 0.0;
  long steps = 0;
  int stride = 1;
  int order = 2;  // 2 or 4
  Mixing mixing = Mixing::None;
  double blowup_fraction = 0.1;
};

struct ReducedTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;  // z samples
  std::vector<double> energy;
};

// Extended phase-space leapfrog for non-separable H: two copies (q, p) and
// (x, y) evolve under H(q, y) + H(x, p).
ReducedTrajectory integrate_crm(const ReducedHamiltonian& h, const Eigen::VectorXd& z0, const CrmOptions& opt);

// Index of the first local maximum that reaches floor_fraction of the series
// peak and after which the series falls by drop_fraction of its value.
std::optional<std::size_t> first_maximum(const std::vector<double>& series, double drop_fraction = 0.05,
                                         double floor_fraction = 0.2);

void write_mode_energy_summary(std::ostream& out, const ModeSpectrum& spec, const ModeEnergyStats& stats,
                               const ScaleSet& scales);
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const ScaleSet& scales, const std::string& header);

}  // namespace nomocou
