#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "nomocou/crystal.hpp"
#include "nomocou/gate.hpp"
#include "nomocou/modes.hpp"

namespace nomocou {

// $NOMOCOU_OUTPUT_ROOT, or ./nomocou-out when unset.
std::filesystem::path output_root();

// Collects artifacts of one run and writes manifest.json at the end.
class ArtifactWriter {
 public:
  ArtifactWriter(std::filesystem::path dir, nlohmann::json config);

  const std::filesystem::path& dir() const { return dir_; }
  // Opens dir/name for writing and records it in the manifest.
  std::ofstream open(const std::string& name);
  void write_json(const std::string& name, const nlohmann::json& j);
  nlohmann::json& extra() { return extra_; }
  void finish(double wall_seconds);

 private:
  std::filesystem::path dir_;
  nlohmann::json config_;
  nlohmann::json extra_ = nlohmann::json::object();
  std::vector<std::string> files_;
};

// Fixed-format number for CSV bodies (%.12g; nan and inf spelled out).
std::string fmt(double v);

void write_spectrum_csv(std::ostream& out, const ModeSpectrum& spec, const ScaleSet& scales);
void write_positions_csv(std::ostream& out, const Equilibrium& eq);
void write_gate_series_csv(std::ostream& out, const EnsembleResult& r, const std::vector<std::string>& mode_names);

}  // namespace nomocou
