#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "nomocou/errors.hpp"
#include "nomocou/io.hpp"
#include "nomocou/presets.hpp"
#include "nomocou/runner.hpp"

using namespace nomocou;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, EveryPresetMergesIntoItsSchema) {
  for (const auto& name : preset_names()) {
    const Config c = preset_config(name);
    const std::string cmd = get_string(c, "command");
    const auto cmds = command_names();
    EXPECT_NE(std::find(cmds.begin(), cmds.end(), cmd), cmds.end()) << name;
  }
  EXPECT_THROW(preset_config("no-such-preset"), ConfigError);
}

TEST(Config, UnknownKeyNamesItsPath) {
  Config c = default_config("gate");
  const std::string msg = error_of([&] { merge_config(c, {{"gate", {{"bogus", 1}}}}); });
  EXPECT_NE(msg.find("gate.bogus"), std::string::npos) << msg;
}

TEST(Config, SyntaxErrorReportsLineAndColumn) {
  const std::string msg = error_of([] { parse_config_text("{\n  \"num_ions\": 3,\n  \"seed\": ]\n}", "x.json"); });
  EXPECT_NE(msg.find("x.json:3:"), std::string::npos) << msg;
}

TEST(Config, CommentsAllowed) {
  const Config c = parse_config_text("// note\n{\"seed\": 4 /* inline */}", "c.json");
  EXPECT_EQ(c["seed"], 4);
}

TEST(Config, TypedGetters) {
  Config c = default_config("gate");
  merge_config(c, {{"gate", {{"loops", {1, 2, 3}}, {"t_tl_bus", {{"min", 10}, {"max", 1000}, {"count", 3}, {"log", true}}}}}});
  EXPECT_EQ(get_axis(c, "gate.loops").size(), 3u);
  const auto ax = get_axis(c, "gate.t_tl_bus");
  ASSERT_EQ(ax.size(), 3u);
  EXPECT_NEAR(ax[1], 100.0, 1e-9);
  set_axis_count(c, "gate.t_tl_bus", 5);
  EXPECT_EQ(get_axis(c, "gate.t_tl_bus").size(), 5u);
  EXPECT_THROW(set_axis_count(c, "gate.loops", 2), ConfigError);
  EXPECT_THROW(get_int(c, "gate.eta"), ConfigError);
  EXPECT_THROW(get_string(c, "gate.eta"), ConfigError);
  EXPECT_THROW(get_number(c, "gate.missing"), ConfigError);
}

TEST(Config, TrapKinds) {
  Config c = preset_config("fig11a");
  const TrapConfig t = trap_from_config(c);
  EXPECT_TRUE(t.is_penning());
  c["trap"]["kind"] = "paul";
  EXPECT_THROW(trap_from_config(c), ConfigError);
  Config neg = preset_config("two-ion-resonant");
  neg["trap"]["wy_hz"] = -1.0;
  EXPECT_THROW(trap_from_config(neg), InvalidInput);
}

TEST(Runner, ModesCommandWritesManifestAndFiles) {
  const fs::path dir = fs::temp_directory_path() / "nomocou-unit-modes";
  fs::remove_all(dir);
  const Config c = preset_config("two-ion-resonant");
  ArtifactWriter out(dir, c);
  run_command(c, out);
  out.finish(0.1);
  for (const char* f : {"positions.csv", "spectrum.csv", "summary.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  std::ifstream m(dir / "manifest.json");
  const auto j = nlohmann::json::parse(m);
  EXPECT_EQ(j["config"]["command"], "modes");
  EXPECT_EQ(j["files"].size(), 3u);
}

TEST(Format, CsvNumbers) {
  EXPECT_EQ(fmt(0.5), "0.5");
  EXPECT_EQ(fmt(NAN), "nan");
  EXPECT_EQ(fmt(-INFINITY), "-inf");
}
