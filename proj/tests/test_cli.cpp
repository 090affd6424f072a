#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "cli_args.hpp"
#include "figures.hpp"
#include "uhlmann_lab/errors.hpp"

using namespace uhl;
using nlohmann::json;

namespace {

struct Invocation {
  int status;
  std::string out;
  std::string err;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "uhlmann_lab_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream s(text);
  for (std::string l; std::getline(s, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("scalar expressions") {
  CHECK(cli::parse_scalar("0.25") == 0.25);
  CHECK(cli::parse_scalar("pi") == pi);
  CHECK(cli::parse_scalar("pi/2") == pi / 2);
  CHECK(cli::parse_scalar("3*pi/4") == doctest::Approx(3 * pi / 4));
  CHECK(cli::parse_scalar("-1e-3") == -1e-3);
  CHECK(cli::parse_scalar(" 2 * (pi - 1) ") == doctest::Approx(2 * (pi - 1)));
  CHECK_THROWS_AS(cli::parse_scalar("abc"), Error);
  CHECK_THROWS_AS(cli::parse_scalar("1/0"), Error);
  CHECK_THROWS_AS(cli::parse_scalar("(1"), Error);
  CHECK_THROWS_AS(cli::parse_scalar("2 pi"), Error);
}

TEST_CASE("axis ranges") {
  const Axis a = cli::parse_axis("0:2:5", 100);
  CHECK(a.min == 0.0);
  CHECK(a.max == 2.0);
  CHECK(a.count == 5);
  CHECK(a.at(2) == 1.0);
  CHECK(cli::parse_axis("0.1:2.0", 77).count == 77);
  CHECK(cli::parse_axis("0:pi:3", 5).max == pi);
  CHECK(cli::parse_axis("0.3", 5).count == 1);
  CHECK_THROWS_AS(cli::parse_axis("0:1:1", 5), Error);
  CHECK_THROWS_AS(cli::parse_axis("1:0:4", 5), Error);
  CHECK_THROWS_AS(cli::parse_axis("0:1:2:3", 5), Error);
  CHECK_THROWS_AS(cli::parse_axis("0:1:2.5", 5), Error);
}

TEST_CASE("transitions subcommand: undriven spin at T = 0.2") {
  const auto r = invoke({"transitions", "--subsystem", "B", "--T", "0.2", "--g", "0.1:2.0"});
  REQUIRE(r.status == cli::kExitOk);
  const auto j = json::parse(r.out);
  REQUIRE(j["roots"].size() == 2);
  CHECK(std::abs(j["roots"][0]["value"].get<double>() - 0.596) < 0.01);
  CHECK(std::abs(j["roots"][1]["value"].get<double>() - 1.12) < 0.01);
  CHECK(j["sweep"]["axis"] == "g");
}

TEST_CASE("transitions subcommand: needs exactly one range") {
  auto r = invoke({"transitions", "--g", "0.3", "--T", "0.2"});
  CHECK(r.status == cli::kExitUsage);
  r = invoke({"transitions", "--g", "0:1", "--T", "0.1:0.2"});
  CHECK(r.status == cli::kExitUsage);
  const auto err = json::parse(r.err);
  CHECK(err["error"]["code"] == "InvalidArgument");
  CHECK(err["error"]["command"] == "transitions");
}

TEST_CASE("phase-map: CSV layout") {
  const auto r = invoke({"phase-map", "--g", "0.2:0.6:3", "--theta", "pi/2", "--T", "0.1"});
  REQUIRE(r.status == cli::kExitOk);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 4);
  CHECK(ls[0] == "g,theta,T,phase,phase_over_pi,re_z,im_z,abs_z,trace_near_zero,dense_fallback");
  CHECK(r.out.find('\r') == std::string::npos);
  CHECK(ls[1].rfind("0.20000000000000001,1.5707963267948966,0.10000000000000001,", 0) == 0);
}

TEST_CASE("phase-map: identical specs give byte-identical files regardless of jobs") {
  const auto dir = scratch_dir();
  const std::vector<std::string> base{"phase-map", "--target", "composite", "--g", "0:2:17", "--theta", "0:pi:13",
                                      "--T", "0.05:0.5:3"};
  auto a = base, b = base, c = base;
  a.insert(a.end(), {"-o", (dir / "a.csv").string(), "--jobs", "1"});
  b.insert(b.end(), {"-o", (dir / "b.csv").string(), "--jobs", "3"});
  c.insert(c.end(), {"-o", (dir / "c.csv").string(), "--jobs", "1"});
  REQUIRE(invoke(a).status == 0);
  REQUIRE(invoke(b).status == 0);
  REQUIRE(invoke(c).status == 0);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a.csv") == slurp(dir / "c.csv"));
  const auto side = json::parse(slurp(dir / "a.csv.json"));
  CHECK(side["version"] == UHLMANN_LAB_VERSION);
  CHECK(side["spec"]["g"] == "0:2:17");
  CHECK(side.contains("wall_time_s"));
}

TEST_CASE("phase-map: berry comparison columns") {
  const auto r = invoke({"phase-map", "--compare-berry", "--g", "1", "--theta", "1", "--T", "0.01"});
  REQUIRE(r.status == 0);
  CHECK(lines(r.out)[0].find("berry_phase_over_pi,distance_to_berry") != std::string::npos);
  CHECK(invoke({"phase-map", "--compare-berry", "--subsystem", "A"}).status == cli::kExitUsage);
}

TEST_CASE("phase-map: invalid specifications") {
  auto r = invoke({"phase-map", "--T", "0"});
  CHECK(r.status == cli::kExitUsage);
  CHECK(json::parse(r.err)["error"]["code"] == "NonpositiveTemperature");
  CHECK(invoke({"phase-map", "--theta", "0:4:3"}).status == cli::kExitUsage);
  CHECK(invoke({"phase-map", "--method", "euler"}).status == cli::kExitUsage);
  CHECK(invoke({"phase-map", "--method", "ode", "--steps", "4"}).status == cli::kExitUsage);
  CHECK(invoke({"phase-map", "--target", "subsystem"}).status == cli::kExitUsage);
  CHECK(invoke({"no-such-command"}).status == cli::kExitUsage);
}

TEST_CASE("config file: keys mirror flags and the command line wins") {
  const auto dir = scratch_dir();
  const auto cfg = dir / "map.json";
  std::ofstream(cfg) << R"({"command": "phase-map", "g": "0:1:3", "theta": 1.0, "T": 0.3, "subsystem": "A"})";
  auto r = invoke({"phase-map", "--config", cfg.string(), "--T", "0.4"});
  REQUIRE(r.status == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 4);
  for (std::size_t k = 1; k < ls.size(); ++k) CHECK(ls[k].find(",1,0.40000000000000002,") != std::string::npos);
  // The subcommand itself may come from the file.
  r = invoke({"--config", cfg.string()});
  REQUIRE(r.status == 0);
  CHECK(lines(r.out)[1].find(",1,0.29999999999999999,") != std::string::npos);
  // Unknown keys are rejected like unknown flags.
  std::ofstream(dir / "bad.json") << R"({"colour": "red"})";
  CHECK(invoke({"phase-map", "--config", (dir / "bad.json").string()}).status == cli::kExitUsage);
  CHECK(invoke({"phase-map", "--config", (dir / "missing.json").string()}).status == cli::kExitUsage);
}

TEST_CASE("jobs fall back to the environment") {
  setenv("UHLMANN_LAB_JOBS", "2", 1);
  CHECK(invoke({"phase-map", "--g", "0:1:3", "--theta", "1"}).status == 0);
  setenv("UHLMANN_LAB_JOBS", "many", 1);
  CHECK(invoke({"phase-map", "--g", "0:1:3", "--theta", "1"}).status == cli::kExitUsage);
  // An explicit flag does not consult the environment.
  CHECK(invoke({"phase-map", "--g", "0:1:3", "--theta", "1", "--jobs", "1"}).status == 0);
  unsetenv("UHLMANN_LAB_JOBS");
}

TEST_CASE("other subcommands") {
  auto r = invoke({"constants"});
  REQUIRE(r.status == 0);
  CHECK(json::parse(r.out)["g_c"].get<double>() == doctest::Approx(2 / std::sqrt(3.0)));

  r = invoke({"argand", "--g", "0.6", "--T", "0.5", "--samples", "101"});
  REQUIRE(r.status == 0);
  auto ls = lines(r.out);
  CHECK(ls.size() == 102);
  CHECK(ls[0] == "theta,re_z,im_z,abs_z,phase_over_pi,winding");

  r = invoke({"bloch", "--subsystem", "A", "--theta", "0:pi:3", "--phi", "0:pi:4"});
  REQUIRE(r.status == 0);
  CHECK(lines(r.out).size() == 13);
  CHECK(invoke({"bloch"}).status == cli::kExitUsage);

  r = invoke({"heat-capacity", "--g", "0.1", "--T", "0.01:0.5:5"});
  REQUIRE(r.status == 0);
  CHECK(lines(r.out).size() == 6);

  r = invoke({"critical-curve", "--subsystem", "B", "--format", "json"});
  REQUIRE(r.status == 0);
  const auto j = json::parse(r.out);
  CHECK_FALSE(j["maximum"].is_null());

  r = invoke({"selftest"});
  CHECK(r.status == 0);
  CHECK(r.out.find("[FAIL]") == std::string::npos);
}

TEST_CASE("figure recipes") {
  const auto& all = cli::figure_recipes();
  for (const char* name : {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6a", "fig6b", "fig6c", "fig6d", "fig7", "fig8",
                           "fig9", "fig10"})
    CHECK(cli::select_recipes(name).size() == 1);
  CHECK(cli::select_recipes("fig6").size() == 4);
  CHECK(cli::select_recipes("fig1").front()->name == "fig1");
  CHECK(cli::select_recipes("fig99").empty());
  CHECK(all.size() == 13);

  const auto r = invoke({"figure", "--list"});
  CHECK(r.status == 0);
  CHECK(r.out.find("fig6a") != std::string::npos);
  CHECK(invoke({"figure", "nope"}).status == cli::kExitUsage);

  const auto dir = scratch_dir() / "figs";
  std::filesystem::remove_all(dir);
  const auto f = invoke({"figure", "fig6a", "--output-dir", dir.string(), "--resolution", "20"});
  REQUIRE(f.status == 0);
  const auto ls = lines(slurp(dir / "fig6a.csv"));
  CHECK(ls.size() == 21);
  CHECK(ls[0].find("C24_schottky") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "fig6a.csv.json"));
}
