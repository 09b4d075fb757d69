#include "nomocou/presets.hpp"

#include <cmath>

#include "nomocou/chain_design.hpp"
#include "nomocou/errors.hpp"

namespace nomocou {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2 * constants::pi;

json common_section(std::string_view command) {
  return {
      {"command", std::string(command)},
      {"species", "Yb171"},
      {"num_ions", 2},
      {"seed", 1},
      {"trap",
       {{"kind", "rf"},
        {"wx_hz", 0.0},
        {"wy_hz", 0.0},
        {"wz_hz", 0.0},
        {"a2_J_per_m2", 0.0},
        {"a4_J_per_m4", 0.0},
        {"B_T", 0.0},
        {"f_rot_hz", 0.0},
        {"wall_delta", 0.0},
        {"match_rf_hz", json::array({0.0, 0.0, 0.0})},
        {"omega0_hz", 0.0}}},
  };
}

json design_section() {
  return {{"n_aux", 2}, {"target_spacing_um", 4.4}, {"b_min", 1e-2}, {"b_max", 1e3}, {"grid", 81}};
}

json md_section() {
  return {{"temperature_uK", 100.0}, {"duration_us", 50.0}, {"dt_ns", 1.0}, {"stride", 100},
          {"excite_modes", json::array()}, {"write_series", true}};
}

json axis(double lo, double hi, int count, bool log = false) {
  return {{"min", lo}, {"max", hi}, {"count", count}, {"log", log}};
}

// Rf trap used by the two-ion studies: breathing twice the tilt frequency.
json two_ion_trap() {
  const double fz = 1.1604134e6;
  return {{"kind", "rf"}, {"wx_hz", 10e6}, {"wy_hz", std::sqrt(7.0) / 2 * fz}, {"wz_hz", fz}};
}

json rf_2d_trap() { return {{"kind", "rf"}, {"wx_hz", 2196e3}, {"wy_hz", 680e3}, {"wz_hz", 343e3}}; }

}  // namespace

std::vector<std::string> command_names() {
  return {"modes", "tressian", "scan-triads", "md", "crm", "gate", "correspondence", "chain-design", "resonance-count"};
}

Config default_config(std::string_view command) {
  json c = common_section(command);
  if (command == "modes" || command == "tressian") {
    c["design"] = design_section();
  } else if (command == "scan-triads") {
    c["design"] = design_section();
    c["scan"] = {{"delta_cut", 1e-3}, {"tensor_min", 1e-3}, {"s_min", 0.1}};
    c["beta_scan"] = {{"beta", json::array()}};
  } else if (command == "md") {
    c["md"] = md_section();
  } else if (command == "crm") {
    c["md"] = md_section();
    c["crm"] = {{"modes", json::array({0, 3})}, {"order", 4}, {"dt_ns", 1.0}, {"compare_md", true}};
  } else if (command == "gate") {
    c["gate"] = {
        {"model", "two_ion"},
        {"samples", 50},
        {"eta", 0.0},
        {"wavelength_nm", 355.0},
        {"weight_cutoff", 1e-3},
        // two-ion scan
        {"n_period", 200.0},
        {"detuning_khz", 0.0},
        {"nbar_tilt", 0.0},
        {"loops", 1.0},
        {"rwa", true},
        {"cut_tilt", 22},
        {"cut_breathing", 10},
        // three-mode scan
        {"t_tl_bus", 50000.0},
        {"t_gate_bus", 1000.0},
        {"nbar", 0.0},
        {"delta_mot", 0.0},
        {"w_split", 0.25},
        {"cut_a", 8},
        {"cut_b", 4},
        {"cut_c", 5},
        {"margin_c", 3},
        {"adaptive", true},
        {"write_series", true},
    };
  } else if (command == "correspondence") {
    c["correspondence"] = {{"eps0", json::array({0.1, 0.01})}, {"coupling", 1.0}, {"energy", 1e-2}, {"periods", 50},
                           {"samples", 1000}, {"crm_dt", 0.005}, {"cut0", 0}, {"cut1", 0}};
  } else if (command == "chain-design") {
    c["num_ions"] = 25;
    c["design"] = design_section();
  } else if (command == "resonance-count") {
    c["resonance_count"] = {{"ions", json::array({8, 16, 32, 64})}, {"windows", json::array({1e-3, 2e-3, 4e-3})},
                            {"trials", 200}};
  } else {
    throw ConfigError("unknown command '" + std::string(command) + "'");
  }
  return c;
}

namespace {

struct Preset {
  std::string name;
  const char* command;
  json values;
};

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = [] {
    std::vector<Preset> p;
    const json fig1_md = {{"temperature_uK", 100.0}, {"duration_us", 10000.0}, {"dt_ns", 1.0}, {"stride", 100},
                          {"write_series", false}};
    p.push_back({"two-ion-resonant", "modes", {{"num_ions", 2}, {"trap", two_ion_trap()}}});
    p.push_back({"fig1a", "md",
                 {{"num_ions", 53},
                  {"trap", {{"kind", "rf"}, {"wx_hz", 5.0e6}, {"wy_hz", 4.85e6}, {"wz_hz", 170e3}}},
                  {"md", fig1_md}}});
    p.push_back({"fig1b", "md", {{"num_ions", 53}, {"trap", rf_2d_trap()}, {"md", fig1_md}}});
    p.push_back({"fig1c", "md",
                 {{"num_ions", 53},
                  {"species", "Be9"},
                  {"trap",
                   {{"kind", "penning"}, {"wz_hz", 1.58e6}, {"B_T", 4.4488}, {"f_rot_hz", 188.74e3},
                    {"wall_delta", 3.574e-2}}},
                  {"md", fig1_md}}});
    p.push_back({"fig3", "crm",
                 {{"num_ions", 2},
                  {"trap", two_ion_trap()},
                  {"md", {{"temperature_uK", 100.0}, {"duration_us", 600.0}, {"dt_ns", 1.0}, {"stride", 10},
                          {"excite_modes", json::array({0})}}},
                  {"crm", {{"modes", json::array({0, 3})}, {"order", 4}, {"dt_ns", 10.0}}}}});
    p.push_back({"fig4", "gate",
                 {{"trap", two_ion_trap()},
                  {"gate", {{"model", "two_ion"}, {"n_period", axis(50, 500, 51)}, {"detuning_khz", axis(-30, 30, 51)}}}}});
    p.push_back({"fig5", "gate",
                 {{"trap", two_ion_trap()},
                  {"gate",
                   {{"model", "two_ion"},
                    {"n_period", axis(50, 500, 25)},
                    {"detuning_khz", axis(-30, 30, 25)},
                    {"nbar_tilt", json::array({1.0, 2.0})}}}}});
    p.push_back({"fig6", "gate",
                 {{"gate",
                   {{"model", "three_mode"}, {"t_tl_bus", 50000.0}, {"t_gate_bus", 1000.0},
                    {"nbar", json::array({0.0, 20.0})}, {"cut_a", 8}, {"cut_b", 4}, {"margin_c", 3},
                    {"weight_cutoff", 1e-4}, {"samples", 200}, {"eta", 0.096}}}}});
    p.push_back({"fig6-tl-scan", "gate",
                 {{"gate",
                   {{"model", "three_mode"}, {"t_tl_bus", axis(500, 5000, 10)}, {"t_gate_bus", axis(50, 500, 10)},
                    {"nbar", 0.0}, {"cut_a", 11}, {"cut_b", 5}, {"cut_c", 5}, {"samples", 2}, {"eta", 0.096},
                    {"write_series", false}}}}});
    p.push_back({"fig6-detuning-scan", "gate",
                 {{"gate",
                   {{"model", "three_mode"}, {"t_tl_bus", 5000.0}, {"t_gate_bus", 200.0},
                    {"nbar", json::array({0.1, 1.0, 10.0})}, {"delta_mot", axis(-0.01, 0.01, 21)}, {"cut_a", 8},
                    {"cut_b", 3}, {"margin_c", 3}, {"weight_cutoff", 1e-4}, {"samples", 2}, {"eta", 0.096},
                    {"write_series", false}}}}});
    const json chain_trap = {{"kind", "designed"}, {"wx_hz", 3.1e6}, {"wy_hz", 3.0e6}};
    const json harmonic_trap = {{"kind", "designed_harmonic"}, {"wx_hz", 3.1e6}, {"wy_hz", 3.0e6}};
    const json chain_scan = {{"delta_cut", 1e-2}, {"tensor_min", 1e-2}, {"s_min", 0.1}};
    for (const auto& [suffix, spacing] : {std::pair{"a", 4.4}, std::pair{"b", 2.7}}) {
      const json design = {{"target_spacing_um", spacing}};
      p.push_back({"fig7" + std::string(suffix), "scan-triads",
                   {{"num_ions", 25}, {"trap", chain_trap}, {"design", design}, {"scan", chain_scan}}});
      p.push_back({"fig7" + std::string(suffix) + "-harmonic", "scan-triads",
                   {{"num_ions", 25}, {"trap", harmonic_trap}, {"design", design}, {"scan", chain_scan}}});
    }
    json betas = json::array();
    for (int i = 0; i < 50; ++i) betas.push_back(10.25 + 3.5 * i / 49.0);
    p.push_back({"fig8", "scan-triads",
                 {{"num_ions", 25},
                  {"trap", {{"kind", "rf"}, {"wx_hz", 5.0e6}, {"wy_hz", 3.0e6}, {"wz_hz", 3.0e6 / 12.0}}},
                  {"scan", chain_scan},
                  {"beta_scan", {{"beta", betas}}}}});
    p.push_back({"fig9", "gate",
                 {{"gate",
                   {{"model", "three_mode"}, {"t_tl_bus", 1000.0}, {"t_gate_bus", 500.0},
                    {"loops", json::array({1, 2, 3, 4, 5})}, {"nbar", json::array({0.1, 1.0, 10.0})}, {"cut_a", 8},
                    {"cut_b", 4}, {"margin_c", 3}, {"weight_cutoff", 1e-4}, {"samples", 200}, {"eta", 0.096},
                    {"write_series", false}}}}});
    const json planar_scan = {{"delta_cut", 1e-3}, {"tensor_min", 1e-3}, {"s_min", 0.1}};
    const json penning_matched = {{"kind", "penning_matched"}, {"wz_hz", 1.58e6}, {"B_T", 4.4588},
                                  {"match_rf_hz", json::array({2196e3, 680e3, 343e3})}};
    p.push_back({"fig10a", "modes", {{"num_ions", 91}, {"species", "Ca40"}, {"trap", rf_2d_trap()}}});
    p.push_back({"fig10b", "modes", {{"num_ions", 91}, {"species", "Be9"}, {"trap", penning_matched}}});
    p.push_back({"fig11a", "scan-triads",
                 {{"num_ions", 91}, {"species", "Be9"}, {"trap", penning_matched}, {"scan", planar_scan}}});
    p.push_back({"fig11b", "scan-triads",
                 {{"num_ions", 91}, {"species", "Ca40"}, {"trap", rf_2d_trap()}, {"scan", planar_scan}}});
    p.push_back({"correspondence", "correspondence", json::object()});
    p.push_back({"resonance-count", "resonance-count", json::object()});
    p.push_back({"chain-design", "chain-design", {{"num_ions", 25}, {"species", "Yb171"}}});
    return p;
  }();
  return list;
}

json::json_pointer pointer(const std::string& path) {
  std::string p = "/";
  for (char ch : path) p += ch == '.' ? '/' : ch;
  return json::json_pointer(p);
}

const json& at_path(const Config& c, const std::string& path) {
  const auto ptr = pointer(path);
  if (!c.contains(ptr)) throw ConfigError(path + ": missing");
  return c.at(ptr);
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : presets()) names.push_back(p.name);
  return names;
}

Config preset_config(std::string_view name) {
  for (const auto& p : presets())
    if (name == p.name) {
      Config c = default_config(p.command);
      merge_config(c, p.values);
      return c;
    }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

void merge_config(Config& base, const Config& patch, const std::string& path) {
  if (!patch.is_object()) throw ConfigError((path.empty() ? "config" : path) + ": expected an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError(key + ": unknown key");
    json& slot = base[it.key()];
    if (slot.is_object() && it.value().is_object() && !slot.contains("min")) {
      merge_config(slot, it.value(), key);
    } else {
      slot = it.value();
    }
  }
}

Config parse_config_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') ++line, col = 1;
      else ++col;
    }
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": syntax error");
  }
}

double get_number(const Config& c, const std::string& path) {
  const json& v = at_path(c, path);
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  return v.get<double>();
}

int get_int(const Config& c, const std::string& path) {
  const json& v = at_path(c, path);
  if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
  return v.get<int>();
}

bool get_bool(const Config& c, const std::string& path) {
  const json& v = at_path(c, path);
  if (!v.is_boolean()) throw ConfigError(path + ": expected true or false");
  return v.get<bool>();
}

std::string get_string(const Config& c, const std::string& path) {
  const json& v = at_path(c, path);
  if (!v.is_string()) throw ConfigError(path + ": expected a string");
  return v.get<std::string>();
}

std::vector<double> get_axis(const Config& c, const std::string& path) {
  const json& v = at_path(c, path);
  if (v.is_number()) return {v.get<double>()};
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(path + ": array entries must be numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it)
      if (it.key() != "min" && it.key() != "max" && it.key() != "count" && it.key() != "log")
        throw ConfigError(path + "." + it.key() + ": unknown key");
    const double lo = get_number(c, path + ".min"), hi = get_number(c, path + ".max");
    const int n = get_int(c, path + ".count");
    const bool log = v.contains("log") && get_bool(c, path + ".log");
    if (n < 1) throw ConfigError(path + ".count: must be at least 1");
    if (log && !(lo > 0 && hi > 0)) throw ConfigError(path + ": log axis needs positive bounds");
    for (int i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      out.push_back(log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
    }
    return out;
  }
  throw ConfigError(path + ": expected a number, a list, or a {min, max, count} range");
}

void set_axis_count(Config& c, const std::string& path, int count) {
  const auto ptr = pointer(path);
  if (!c.contains(ptr) || !c.at(ptr).is_object())
    throw ConfigError(path + ": --grid needs a {min, max, count} range here");
  if (count < 1) throw ConfigError("--grid: counts must be positive");
  c.at(ptr)["count"] = count;
}

TrapConfig trap_from_config(const Config& c) {
  TrapConfig t;
  t.species = species_by_name(get_string(c, "species"));
  const std::string kind = get_string(c, "trap.kind");
  const auto hz = [&](const char* key) { return kTwoPi * get_number(c, std::string("trap.") + key); };
  if (kind == "rf") {
    t.variant = RfHarmonic{hz("wx_hz"), hz("wy_hz"), hz("wz_hz")};
  } else if (kind == "rf_quartic") {
    t.variant = RfAnharmonicAxial{hz("wx_hz"), hz("wy_hz"), get_number(c, "trap.a2_J_per_m2"),
                                  get_number(c, "trap.a4_J_per_m4")};
  } else if (kind == "penning") {
    Penning p;
    p.wz = hz("wz_hz");
    p.B = get_number(c, "trap.B_T");
    p.w_rot = hz("f_rot_hz");
    p.wall_delta = get_number(c, "trap.wall_delta");
    t.variant = p;
  } else if (kind == "penning_matched") {
    const json& m = at_path(c, "trap.match_rf_hz");
    if (!m.is_array() || m.size() != 3) throw ConfigError("trap.match_rf_hz: expected [fx, fy, fz]");
    const RfHarmonic rf{kTwoPi * m[0].get<double>(), kTwoPi * m[1].get<double>(), kTwoPi * m[2].get<double>()};
    t.variant = match_rf_anisotropy(rf, hz("wz_hz"), get_number(c, "trap.B_T"), t.species);
  } else if (kind == "designed" || kind == "designed_harmonic") {
    ChainDesignOptions o;
    o.num_ions = get_int(c, "num_ions");
    o.n_aux = get_int(c, "design.n_aux");
    o.target_spacing = get_number(c, "design.target_spacing_um") * 1e-6;
    o.species = t.species;
    o.b_min = get_number(c, "design.b_min");
    o.b_max = get_number(c, "design.b_max");
    o.grid = get_int(c, "design.grid");
    const ChainDesign d = optimize_spacing(o);
    if (kind == "designed") {
      t = d.trap(hz("wx_hz"), hz("wy_hz"));
    } else {
      // Harmonic reference matched to the lowest axial mode of the designed chain.
      t.variant = RfHarmonic{hz("wx_hz"), hz("wy_hz"), d.axial_frequencies[0] * d.omega0};
    }
  } else {
    throw ConfigError("trap.kind: unknown kind '" + kind + "'");
  }
  const double w0 = get_number(c, "trap.omega0_hz");
  if (w0 < 0) throw ConfigError("trap.omega0_hz: must be non-negative");
  t.omega0_override = kTwoPi * w0;
  validate(t);
  return t;
}

}  // namespace nomocou
