#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nomocou/cubic.hpp"
#include "nomocou/modes.hpp"

namespace nomocou {

enum class TriadKind { TwoMode, ThreeMode };
enum class TriadClass { RadialRadial, RadialAxial, AxialAxial };

std::string_view triad_kind_name(TriadKind k);
std::string_view triad_class_name(TriadClass c);

struct ResonanceTriad {
  int n = 0, m = 0, p = 0;  // w_n <= w_m < w_p
  TriadKind kind = TriadKind::ThreeMode;
  double delta = 0.0;  // w_p - w_n - w_m, units of omega0
  double tensor_norm = 0.0;
  std::complex<double> c_rwa;
  double c_tl = 0.0;
  double omega_tl = 0.0;
  double s_tl = 0.0;
  double t_tl = 0.0;          // pi / omega_tl, units of 1/omega0
  double t_tl_seconds = 0.0;  // 0 when omega0 is unknown
  Branch branch_n = Branch::Unclassified, branch_m = Branch::Unclassified, branch_p = Branch::Unclassified;

  TriadClass triad_class() const;
};

struct ScanThresholds {
  double delta_cut = 1e-3;
  double tensor_min = 1e-3;
  double s_min = 0.1;
};

// Coefficient of a_n a_m a_p^dagger (times eps0) from the eight quadrature elements.
std::complex<double> rwa_coefficient(const QuadratureBlock& block, bool two_mode);

// Triad candidates with |delta| <= delta_cut and their RWA coefficients, from a
// full mode-basis tensor.
std::vector<ResonanceTriad> rwa_coefficients(const CubicModeTensor& tensor, const ModeSpectrum& spec, double delta_cut);

// Fills the two-level fields. omega0 (rad/s) converts the period to seconds; pass 0 to skip.
ResonanceTriad tl_reduce(ResonanceTriad triad, double eps0, double omega0 = 0.0);

// Exchange probability S sin^2(Omega t) of the two-level model.
double tl_population(double c_tl, double delta, double t);

// Enumerates candidates per output mode p with a sorted two-pointer search,
// filters on |delta| and tensor magnitude, then keeps s_tl >= s_min. Sorted by
// s_tl descending, ties by (n, m, p).
std::vector<ResonanceTriad> scan_triads(const ModeSpectrum& spec, const CartesianTressian& cart, double eps0,
                                        const ScanThresholds& thresholds, double omega0 = 0.0);

struct CountEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  int trials = 0;
};

// Monte-Carlo mean number of distinct triples n < m < p among 3N uniform
// frequencies on [0, 1] with |w_p - w_n - w_m| <= window.
CountEstimate expected_resonance_count(int num_ions, double window, int trials, std::uint64_t seed);

// Ordinary least squares y = intercept + slope x.
struct LineFit {
  double slope = 0.0, intercept = 0.0, slope_stderr = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

void write_triads_csv(std::ostream& out, const std::vector<ResonanceTriad>& triads);

}  // namespace nomocou
