#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nomocou/crystal.hpp"

namespace nomocou {

using Config = nlohmann::json;

std::vector<std::string> command_names();

// Full schema of a command with default values. Every accepted key appears here.
Config default_config(std::string_view command);

std::vector<std::string> preset_names();
// Defaults of the preset's command overlaid with the preset values.
Config preset_config(std::string_view name);

// Overlays patch onto base. Keys missing from base are errors naming the full
// path; objects recurse, anything else replaces the value.
void merge_config(Config& base, const Config& patch, const std::string& path = "");

// Parses a config document; syntax errors report line and column.
Config parse_config_text(const std::string& text, const std::string& source);

// Typed access with field-addressed errors.
double get_number(const Config& c, const std::string& path);
int get_int(const Config& c, const std::string& path);
bool get_bool(const Config& c, const std::string& path);
std::string get_string(const Config& c, const std::string& path);
// A scan axis: a number, an array of numbers, or {"min", "max", "count", "log"}.
std::vector<double> get_axis(const Config& c, const std::string& path);
// Sets the count of a range axis (used by --grid); a config error for fixed lists.
void set_axis_count(Config& c, const std::string& path, int count);

// Trap of the "trap" section (kinds: rf, rf_quartic, penning, penning_matched,
// designed, designed_harmonic). Designed traps run the chain optimizer.
TrapConfig trap_from_config(const Config& c);

}  // namespace nomocou
