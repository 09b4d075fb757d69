#pragma once

#include "nomocou/io.hpp"
#include "nomocou/presets.hpp"

namespace nomocou {

// Executes the command named in cfg["command"], writing artifacts through out.
void run_command(const Config& cfg, ArtifactWriter& out);

// Breathing-mode TTB coefficient and frequencies of the two-ion crystal of a trap.
struct TwoIonCoupling {
  double w_tilt = 0.0, w_breathing = 0.0;  // units of omega0
  std::complex<double> c_rwa;
  ReducedHamiltonian poly;  // reduced modes: 0 tilt, 1 breathing
  double eps0 = 0.0;
  double omega0 = 0.0;  // rad/s
  double mass = 0.0;
};
TwoIonCoupling two_ion_coupling(const TrapConfig& trap);

}  // namespace nomocou
