#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nomocou {

// CODATA 2018.
namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double e = 1.602176634e-19;
inline constexpr double amu = 1.66053906660e-27;
inline constexpr double epsilon0 = 8.8541878128e-12;
inline constexpr double k_e = 1.0 / (4.0 * pi * epsilon0);
inline constexpr double k_B = 1.380649e-23;
}  // namespace constants

struct IonSpecies {
  std::string name;
  double mass = 0.0;    // kg
  double charge = 0.0;  // C

  static IonSpecies Be9();
  static IonSpecies Ca40();
  static IonSpecies Yb171();
  static IonSpecies from_amu(std::string name, double mass_amu, int charge_e = 1);
};

// Built-in presets by name ("Be9", "Ca40", "Yb171"); throws InvalidInput otherwise.
IonSpecies species_by_name(std::string_view name);

// One species per non-comment line: "<name> <mass in amu> <charge in e>".
std::vector<IonSpecies> load_species(std::istream& in);

struct ScaleSet {
  double omega0 = 0.0;  // rad/s
  double m0 = 0.0;      // kg
  double charge = 0.0;  // C
  double l0 = 0.0;      // m
  double E0 = 0.0;      // J
  double z0 = 0.0;      // m
  double eps0 = 0.0;

  double velocity() const { return l0 * omega0; }
  double hbar_omega0() const { return eps0 * eps0 * E0; }
};

ScaleSet make_scales(const IonSpecies& species, double omega0);

enum class Dimension { Length, Energy, Time, Frequency };

Dimension parse_dimension(std::string_view kind);
std::string_view dimension_name(Dimension d);

// Energies are in units of E0, frequencies in units of omega0 (result in rad/s).
double to_physical(double value, Dimension kind, const ScaleSet& scales);
double from_physical(double value, Dimension kind, const ScaleSet& scales);

}  // namespace nomocou
