#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using bboxlab::cli::run;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "bboxlab");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bboxlab_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

nlohmann::json manifest(const fs::path& dir, const std::string& command) {
  return nlohmann::json::parse(slurp(dir / (command + ".manifest.json")));
}

// Keeps BBOXLAB_SEED out of tests that assume the built-in default.
struct SeedEnvGuard {
  SeedEnvGuard() { unsetenv("BBOXLAB_SEED"); }
  ~SeedEnvGuard() { unsetenv("BBOXLAB_SEED"); }
};

}  // namespace

TEST_CASE("eval prints value and gradient") {
  const Result so = invoke({"eval", "--kind", "so", "0,0,2,2", "1,1,3,3"});
  CHECK(so.code == 0);
  CHECK(so.out ==
        "kind so\n"
        "value 1.333333333333\n"
        "grad -0.111111111111 -0.111111111111 -0.333333333333 -0.333333333333\n");

  const Result same = invoke({"eval", "--kind", "sca", "0,0,1,1", "0,0,1,1"});
  CHECK(same.code == 0);
  CHECK(same.out == "kind sca\nvalue 0\ngrad 0 0 0 0\n");

  const Result fallback = invoke({"eval", "0,0,2,2", "1,1,3,3"});
  CHECK(fallback.out.rfind("kind sca\nvalue 1.666666666667\n", 0) == 0);

  const Result negative = invoke({"eval", "--kind", "iou", "-2,-2,0,0", "-1,-1,1,1"});
  CHECK(negative.code == 0);
  CHECK(negative.out.find("value 0.857142857143") != std::string::npos);
}

TEST_CASE("eval rejects bad input with exit 2") {
  const Result malformed = invoke({"eval", "--kind", "iou", "0,0,1", "0,0,1,1"});
  CHECK(malformed.code == 2);
  CHECK(malformed.err.find("parse error") != std::string::npos);
  CHECK(invoke({"eval", "--kind", "l3", "0,0,1,1", "0,0,1,1"}).code == 2);
  CHECK(invoke({"eval", "--kind", "so", "0,0,0,1", "0,2,0,3"}).code == 2);
  CHECK(invoke({"eval", "0,0,1,1"}).code == 2);
}

TEST_CASE("eval exits 3 when a value overflows") {
  const Result r = invoke({"eval", "--kind", "sca", "--alpha", "1.7e308", "0,0,1,1", "2,2,3,3"});
  CHECK(r.code == 3);
  CHECK(r.err.find("non-finite") != std::string::npos);
}

TEST_CASE("help and usage errors") {
  const Result help = invoke({"--help"});
  CHECK(help.code == 0);
  for (const char* name : {"eval", "gradmag", "correlate", "simulate", "align", "gradcheck"}) {
    CHECK(help.out.find(name) != std::string::npos);
  }
  const Result sub = invoke({"simulate", "--help"});
  CHECK(sub.code == 0);
  for (const char* flag : {"--config", "--out", "--seed", "--threads", "--plot", "--eta",
                           "--iters", "--kinds", "--grid"}) {
    CHECK(sub.out.find(flag) != std::string::npos);
  }
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"simulate", "--bogus"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"--version"}).code == 0);
}

TEST_CASE("simulate writes kinds x (iters + 1) rows and a manifest") {
  SeedEnvGuard guard;
  const fs::path dir = scratch("simulate");
  const Result r = invoke({"simulate", "--grid", "3", "--iters", "15", "--threads", "1", "--out",
                           dir.string()});
  REQUIRE(r.code == 0);
  const std::string table = slurp(dir / "simulate.csv");
  CHECK(table.rfind("kind,iter,mean_iou,mean_corner_dist\n", 0) == 0);
  CHECK(lines(table) == 1 + 4 * 16);
  const auto m = manifest(dir, "simulate");
  CHECK(m["command"] == "simulate");
  CHECK(m["seed"] == 42);
  CHECK(m["config"]["iters"] == 15);
  CHECK(m["outputs"].size() == 2);
  CHECK(!m["tool_version"].get<std::string>().empty());
}

TEST_CASE("gradmag shape contract") {
  const fs::path dir = scratch("gradmag");
  const Result r = invoke({"gradmag", "--samples=100000", "--kinds=iou,so,sca", "--out",
                           dir.string()});
  REQUIRE(r.code == 0);
  CHECK(lines(slurp(dir / "gradmag.csv")) == 1 + 10 * 3);
}

TEST_CASE("gradcheck default passes") {
  const fs::path dir = scratch("gradcheck");
  const Result r = invoke({"gradcheck", "--out", dir.string()});
  CHECK(r.code == 0);
  std::istringstream table(slurp(dir / "gradcheck.csv"));
  std::string line;
  std::getline(table, line);
  CHECK(line == "kind,pairs,max_rel_error");
  int rows = 0;
  while (std::getline(table, line)) {
    ++rows;
    CHECK(std::stod(line.substr(line.rfind(',') + 1)) < 1e-5);
  }
  CHECK(rows == 9);
}

TEST_CASE("experiments exit 3 on non-finite results") {
  const fs::path dir = scratch("overflow");
  const Result r = invoke({"gradmag", "--alpha=1.7e308", "--kinds=sca", "--samples=200",
                           "--out", dir.string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("non-finite") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "gradmag.csv"));
}

TEST_CASE("manifest re-run reproduces the csv byte for byte") {
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs = {
      {"simulate", {"--grid", "4", "--iters", "20"}},
      {"align", {"--grid", "3", "--iters", "20"}},
      {"gradmag", {"--samples", "5000"}},
      {"correlate", {"--samples", "5000"}},
      {"gradcheck", {"--samples", "500"}},
  };
  for (const auto& [command, extra] : runs) {
    CAPTURE(command);
    const fs::path first = scratch(command + "_first");
    const fs::path again = scratch(command + "_again");
    std::vector<std::string> args{command, "--seed", "17", "--threads", "3", "--out",
                                  first.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    REQUIRE(invoke(args).code == 0);
    const std::string manifest_path = (first / (command + ".manifest.json")).string();
    REQUIRE(invoke({command, "--config", manifest_path, "--threads", "1", "--out",
                    again.string()})
                .code == 0);
    const std::string name = command == "correlate" ? "correlation.csv" : command + ".csv";
    CHECK(slurp(first / name) == slurp(again / name));
    CHECK(manifest(first, command)["config"] == manifest(again, command)["config"]);
  }
}

TEST_CASE("seed precedence: flag over config over environment over default") {
  SeedEnvGuard guard;
  const fs::path dir = scratch("seed");
  auto seed_of = [&](std::vector<std::string> extra) {
    std::vector<std::string> args{"correlate", "--out", dir.string()};
    args.insert(args.end(), extra.begin(), extra.end());
    REQUIRE(invoke(args).code == 0);
    return manifest(dir, "correlate")["seed"].get<std::uint64_t>();
  };
  CHECK(seed_of({"--samples", "300"}) == 42);
  const std::string by_default = slurp(dir / "correlation.csv");
  CHECK(seed_of({"--samples", "300", "--seed", "43"}) == 43);
  CHECK(slurp(dir / "correlation.csv") != by_default);

  setenv("BBOXLAB_SEED", "7", 1);
  CHECK(seed_of({"--samples", "300"}) == 7);
  const fs::path config = dir / "config.json";
  std::ofstream(config) << R"({"seed": 5, "samples": 400})";
  CHECK(seed_of({"--config", config.string()}) == 5);
  CHECK(manifest(dir, "correlate")["config"]["samples"] == 400);
  CHECK(seed_of({"--config", config.string(), "--seed", "9", "--samples", "300"}) == 9);
  CHECK(manifest(dir, "correlate")["config"]["samples"] == 300);

  setenv("BBOXLAB_SEED", "not-a-number", 1);
  CHECK(invoke({"correlate", "--samples", "300", "--out", dir.string()}).code == 2);
}

TEST_CASE("config errors exit 2") {
  const fs::path dir = scratch("config");
  const fs::path unknown = dir / "unknown.json";
  std::ofstream(unknown) << R"({"etaa": 0.1})";
  CHECK(invoke({"simulate", "--config", unknown.string(), "--out", dir.string()}).code == 2);
  const fs::path broken = dir / "broken.json";
  std::ofstream(broken) << "{ not json";
  CHECK(invoke({"simulate", "--config", broken.string(), "--out", dir.string()}).code == 2);
  CHECK(invoke({"simulate", "--config", (dir / "missing.json").string()}).code == 2);
  CHECK(invoke({"simulate", "--eta", "-1", "--out", dir.string()}).code == 2);
  CHECK(invoke({"simulate", "--kinds", "iou,l7", "--out", dir.string()}).code == 2);
  CHECK(invoke({"gradmag", "--samples", "0", "--out", dir.string()}).code == 2);
  CHECK(invoke({"gradmag", "--domain", "square", "--out", dir.string()}).code == 2);
}

TEST_CASE("config file values apply and ratios accept w:h strings") {
  const fs::path dir = scratch("ratios");
  const fs::path config = dir / "config.json";
  std::ofstream(config) << R"({"grid": 2, "iters": 5, "anchor_ratios": ["2:1", 1],
                               "anchor_scales": [3], "gt_ratios": ["1:4"], "kinds": ["sca"]})";
  REQUIRE(invoke({"simulate", "--config", config.string(), "--out", dir.string()}).code == 0);
  const auto m = manifest(dir, "simulate");
  CHECK(m["config"]["anchor_ratios"] == nlohmann::json({2.0, 1.0}));
  CHECK(m["config"]["gt_ratios"] == nlohmann::json({0.25}));
  CHECK(lines(slurp(dir / "simulate.csv")) == 1 + 6);
  // Flags win over the file.
  REQUIRE(invoke({"simulate", "--config", config.string(), "--iters", "8", "--out",
                  dir.string()})
              .code == 0);
  CHECK(lines(slurp(dir / "simulate.csv")) == 1 + 9);
}

TEST_CASE("plot flag writes an svg") {
  const fs::path dir = scratch("plot");
  REQUIRE(invoke({"align", "--grid", "2", "--iters", "10", "--plot", "--out", dir.string()})
              .code == 0);
  bool found = false;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".svg") {
      found = true;
      const std::string svg = slurp(entry.path());
      CHECK(svg.find("<svg") != std::string::npos);
      CHECK(svg.find("</svg>") != std::string::npos);
    }
  }
  CHECK(found);
}

TEST_CASE("format_eval_number") {
  using bboxlab::cli::format_eval_number;
  CHECK(format_eval_number(4.0 / 3) == "1.333333333333");
  CHECK(format_eval_number(0.0) == "0");
  CHECK(format_eval_number(-0.0) == "0");
  CHECK(format_eval_number(-1e-15) == "0");
  CHECK(format_eval_number(2.5) == "2.5");
  CHECK(format_eval_number(-0.5) == "-0.5");
}
