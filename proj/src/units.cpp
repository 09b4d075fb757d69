#include "nomocou/units.hpp"

#include <cmath>
#include <istream>
#include <sstream>

#include "nomocou/errors.hpp"

namespace nomocou {

IonSpecies IonSpecies::from_amu(std::string name, double mass_amu, int charge_e) {
  if (!(mass_amu > 0.0)) throw InvalidInput("species mass must be positive");
  if (charge_e == 0) throw InvalidInput("species charge must be nonzero");
  return IonSpecies{std::move(name), mass_amu * constants::amu, charge_e * constants::e};
}

IonSpecies IonSpecies::Be9() { return from_amu("Be9", 9.0121822); }
IonSpecies IonSpecies::Ca40() { return from_amu("Ca40", 39.962590863); }
IonSpecies IonSpecies::Yb171() { return from_amu("Yb171", 170.9363315); }

IonSpecies species_by_name(std::string_view name) {
  if (name == "Be9") return IonSpecies::Be9();
  if (name == "Ca40") return IonSpecies::Ca40();
  if (name == "Yb171") return IonSpecies::Yb171();
  throw InvalidInput("unknown species '" + std::string(name) + "'");
}

std::vector<IonSpecies> load_species(std::istream& in) {
  std::vector<IonSpecies> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;
    double mass = 0.0;
    int charge = 0;
    if (!(ls >> mass >> charge))
      throw InvalidInput("species line " + std::to_string(lineno) + ": expected '<name> <mass_amu> <charge_e>'");
    std::string extra;
    if (ls >> extra) throw InvalidInput("species line " + std::to_string(lineno) + ": trailing field '" + extra + "'");
    out.push_back(IonSpecies::from_amu(name, mass, charge));
  }
  return out;
}

ScaleSet make_scales(const IonSpecies& species, double omega0) {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) throw InvalidInput("omega0 must be positive");
  if (!(species.mass > 0.0)) throw InvalidInput("species mass must be positive");
  if (species.charge == 0.0) throw InvalidInput("species charge must be nonzero");
  ScaleSet s;
  s.omega0 = omega0;
  s.m0 = species.mass;
  s.charge = species.charge;
  const double q2 = species.charge * species.charge;
  s.l0 = std::cbrt(constants::k_e * q2 / (s.m0 * omega0 * omega0));
  s.E0 = s.m0 * omega0 * omega0 * s.l0 * s.l0;
  s.z0 = std::sqrt(constants::hbar / (s.m0 * omega0));
  s.eps0 = s.z0 / s.l0;
  return s;
}

Dimension parse_dimension(std::string_view kind) {
  if (kind == "length") return Dimension::Length;
  if (kind == "energy") return Dimension::Energy;
  if (kind == "time") return Dimension::Time;
  if (kind == "frequency") return Dimension::Frequency;
  throw InvalidInput("unknown dimension kind '" + std::string(kind) + "'");
}

std::string_view dimension_name(Dimension d) {
  switch (d) {
    case Dimension::Length: return "length";
    case Dimension::Energy: return "energy";
    case Dimension::Time: return "time";
    case Dimension::Frequency: return "frequency";
  }
  return "?";
}

static double unit_of(Dimension kind, const ScaleSet& s) {
  switch (kind) {
    case Dimension::Length: return s.l0;
    case Dimension::Energy: return s.E0;
    case Dimension::Time: return 1.0 / s.omega0;
    case Dimension::Frequency: return s.omega0;
  }
  throw InvalidInput("unknown dimension kind");
}

double to_physical(double value, Dimension kind, const ScaleSet& scales) {
  return value * unit_of(kind, scales);
}

double from_physical(double value, Dimension kind, const ScaleSet& scales) {
  return value / unit_of(kind, scales);
}

}  // namespace nomocou
