#include "nomocou/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <ostream>

#include "nomocou/errors.hpp"
#include "nomocou/parallel.hpp"

namespace nomocou {

std::filesystem::path output_root() {
  const char* env = std::getenv("NOMOCOU_OUTPUT_ROOT");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("nomocou-out");
}

ArtifactWriter::ArtifactWriter(std::filesystem::path dir, nlohmann::json config)
    : dir_(std::move(dir)), config_(std::move(config)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

std::ofstream ArtifactWriter::open(const std::string& name) {
  std::ofstream f(dir_ / name);
  if (!f) throw ConfigError("cannot write " + (dir_ / name).string());
  files_.push_back(name);
  return f;
}

void ArtifactWriter::write_json(const std::string& name, const nlohmann::json& j) {
  auto f = open(name);
  f << j.dump(2) << '\n';
}

void ArtifactWriter::finish(double wall_seconds) {
  nlohmann::json m;
  m["tool"] = "nomocou";
  m["version"] = "1.0.0";
  m["config"] = config_;
  m["seed"] = config_.value("seed", 0);
  m["jobs"] = effective_jobs();
  m["files"] = files_;
  m["wall_time_s"] = wall_seconds;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m["timestamp"] = stamp;
  for (auto it = extra_.begin(); it != extra_.end(); ++it) m[it.key()] = it.value();
  std::ofstream f(dir_ / "manifest.json");
  f << m.dump(2) << '\n';
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_spectrum_csv(std::ostream& out, const ModeSpectrum& spec, const ScaleSet& scales) {
  out << "mode,frequency_omega0,frequency_hz,branch\n";
  for (int n = 0; n < spec.num_modes(); ++n)
    out << n << ',' << fmt(spec.frequencies[n]) << ',' << fmt(spec.frequencies[n] * scales.omega0 / (2 * M_PI)) << ','
        << branch_name(spec.branches[n]) << '\n';
}

void write_positions_csv(std::ostream& out, const Equilibrium& eq) {
  out << "ion,x_l0,y_l0,z_l0,x_um,y_um,z_um\n";
  const double um = eq.scales.l0 * 1e6;
  for (int i = 0; i < eq.num_ions; ++i) {
    const Eigen::Vector3d r = eq.ion(i);
    out << i << ',' << fmt(r.x()) << ',' << fmt(r.y()) << ',' << fmt(r.z()) << ',' << fmt(r.x() * um) << ','
        << fmt(r.y() * um) << ',' << fmt(r.z() * um) << '\n';
  }
}

void write_gate_series_csv(std::ostream& out, const EnsembleResult& r, const std::vector<std::string>& mode_names) {
  out << "time_omega0,fidelity,entropy";
  for (const auto& n : mode_names) out << ",n_" << n;
  out << ",pop_00y,x_00y,p_00y,pop_11y,x_11y,p_11y,backaction_11y\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    out << fmt(r.times[i]) << ',' << fmt(r.fidelity[i]) << ',' << fmt(r.entropy[i]);
    for (int k = 0; k < r.mode_number.cols(); ++k) out << ',' << fmt(r.mode_number(i, k));
    for (int b = 0; b < 2; ++b) {
      const auto at = [&](const std::vector<double>& v) { return i < v.size() ? fmt(v[i]) : std::string("nan"); };
      out << ',' << at(r.branch_population[b]) << ',' << at(r.cond_x[b]) << ',' << at(r.cond_p[b]);
    }
    out << ',' << (i < r.backaction.size() ? fmt(r.backaction[i]) : std::string("nan")) << '\n';
  }
}

}  // namespace nomocou
