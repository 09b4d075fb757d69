#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nomocou/errors.hpp"
#include "nomocou/parallel.hpp"
#include "nomocou/runner.hpp"

using namespace nomocou;

namespace {

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3 };

struct Options {
  std::string preset, config_path, grid, out;
  int jobs = 0;
  std::int64_t seed = -1;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path + ": cannot open");
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

// --grid AxB sets the point counts of the command's two primary scan axes.
void apply_grid(Config& c, const std::string& grid) {
  int a = 0, b = 0;
  char x = 0;
  std::istringstream in(grid);
  if (!(in >> a >> x >> b) || (x != 'x' && x != 'X') || !in.eof()) throw ConfigError("--grid: expected AxB, e.g. 5x5");
  if (get_string(c, "command") != "gate") throw ConfigError("--grid: only the gate command has scan grids");
  const bool two_ion = get_string(c, "gate.model") == "two_ion";
  set_axis_count(c, two_ion ? "gate.n_period" : "gate.t_tl_bus", a);
  set_axis_count(c, two_ion ? "gate.detuning_khz" : "gate.t_gate_bus", b);
}

int run(const std::string& command, const Options& o) {
  Config cfg = o.preset.empty() ? default_config(command) : preset_config(o.preset);
  if (get_string(cfg, "command") != command)
    throw ConfigError("preset '" + o.preset + "' belongs to the '" + get_string(cfg, "command") + "' command");
  std::string label = o.preset.empty() ? command : o.preset;
  if (!o.config_path.empty()) {
    Config patch = parse_config_text(read_file(o.config_path), o.config_path);
    if (patch.contains("command") && patch["command"] != command)
      throw ConfigError(o.config_path + ": command does not match the subcommand");
    merge_config(cfg, patch);
    if (o.preset.empty()) label = std::filesystem::path(o.config_path).stem().string();
  }
  if (o.seed >= 0) cfg["seed"] = o.seed;
  if (!o.grid.empty()) apply_grid(cfg, o.grid);
  if (!o.out.empty()) label = o.out;
  job_limit().store(o.jobs);

  const auto t0 = std::chrono::steady_clock::now();
  ArtifactWriter writer(output_root() / label, cfg);
  run_command(cfg, writer);
  writer.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  std::cout << writer.dir().string() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear motional mode coupling toolkit for trapped-ion crystals"};
  app.require_subcommand(0, 1);
  bool list = false;
  app.add_flag("--list-presets", list, "Print preset names with their commands and exit");

  Options o;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  for (const auto& name : command_names()) {
    CLI::App* s = app.add_subcommand(name, "Run the " + name + " study");
    s->add_option("--preset", o.preset, "Named parameter set");
    s->add_option("--config", o.config_path, "JSON file overriding preset or default values");
    s->add_option("--jobs", o.jobs, "Worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
    s->add_option("--grid", o.grid, "Scan grid AxB for gate scans");
    s->add_option("--seed", o.seed, "Random seed")->check(CLI::NonNegativeNumber);
    s->add_option("--out", o.out, "Output directory name under the output root");
    subs.emplace_back(name, s);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  if (list) {
    for (const auto& p : preset_names()) std::cout << p << '\t' << get_string(preset_config(p), "command") << '\n';
    return kOk;
  }
  for (const auto& [name, s] : subs) {
    if (!s->parsed()) continue;
    try {
      return run(name, o);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kConfig;
    } catch (const InvalidInput& e) {
      std::cerr << "invalid input: " << e.what() << '\n';
      return kConfig;
    } catch (const std::exception& e) {
      std::cerr << "numerical failure (" << name << "): " << e.what() << '\n';
      return kNumerical;
    }
  }
  std::cerr << app.help();
  return kConfig;
}
