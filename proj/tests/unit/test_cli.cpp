#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "learning_oracles.hpp"
#include "tachyon/cli.hpp"

using namespace tachyon;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "tachyon");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Scratch {
 public:
  Scratch() : dir_(fs::temp_directory_path() / ("tachyon_cli_" + std::to_string(std::random_device{}()))) {
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

const char* kLight = R"(
clock x;
var presses: int = 0;
template Lamp() {
  init location Off;
  location Low { invariant x <= 5; }
  location Bright;
  edge Off -> Low { guard presses < 3; update x := 0, presses := presses + 1; }
  edge Low -> Bright { guard x >= 2; }
  edge Low -> Off { guard x >= 4; }
  edge Bright -> Off { guard presses < 3; }
}
system Lamp;
)";

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"check"}).code == kExitUsage);
  Result v = run({"--version"});
  CHECK(v.code == kExitOk);
  CHECK(v.out.find("0.1.0") != std::string::npos);
}

TEST_CASE("check exit codes") {
  Scratch s;
  const std::string model = s.write("light.tan", kLight);
  const std::string good = s.write("good.q", "E<> Lamp.Bright\nA[] presses <= 3\n");
  const std::string failing = s.write("failing.q", "E<> presses == 4\n");

  Result ok = run({"check", model, good});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("1. satisfied") != std::string::npos);

  CHECK(run({"check", model, failing}).code == kExitOk);
  CHECK(run({"check", model, failing, "--strict"}).code == kExitFailed);
  CHECK(run({"check", model, failing, "--cap-states", "2"}).code == kExitCap);

  Result js = run({"check", model, good, "--json"});
  REQUIRE(js.code == kExitOk);
  auto j = nlohmann::json::parse(js.out);
  CHECK(j["version"] == 1);
  CHECK(j["verdicts"].size() == 2);
  CHECK(j["verdicts"][0]["outcome"] == "satisfied");
}

TEST_CASE("queries are routed to the right engine") {
  Scratch s;
  const std::string model = s.write("light.tan", kLight);
  const std::string est = s.write("est.q", "E[time<=100; 3](max: presses)\n");
  Result r = run({"check", model, est});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("routing error") != std::string::npos);

  Result e = run({"estimate", model, est, "--json"});
  REQUIRE(e.code == kExitOk);
  auto j = nlohmann::json::parse(e.out);
  CHECK(j["estimates"][0]["runs"] == 3);
  CHECK(j["estimates"][0]["max"].get<double>() <= 3.0);

  const std::string reach = s.write("reach.q", "E<> true\n");
  CHECK(run({"estimate", model, reach}).code == kExitUsage);
}

TEST_CASE("input errors carry file positions") {
  Scratch s;
  const std::string bad = s.write("bad.tan", "clock x;\nvar v: int = ;\nsystem;\n");
  const std::string q = s.write("q.q", "E<> true\n");
  Result r = run({"check", bad, q});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("bad.tan:2:") != std::string::npos);

  CHECK(run({"check", s.path("missing.tan"), q}).code == kExitUsage);

  const std::string model = s.write("light.tan", kLight);
  const std::string badq = s.write("badq.q", "E<> (\n");
  Result rq = run({"check", model, badq});
  CHECK(rq.code == kExitUsage);
  CHECK(rq.err.find("badq.q:1:") != std::string::npos);
}

TEST_CASE("simulate is reproducible") {
  Scratch s;
  const std::string model = s.write("light.tan", kLight);
  Result a = run({"simulate", model, "--seed", "4", "--runs", "2", "--horizon-ms", "50"});
  Result b = run({"simulate", model, "--seed", "4", "--runs", "2", "--horizon-ms", "50"});
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.find("run 1:") != std::string::npos);

  Result js = run({"simulate", model, "--json", "--horizon-ms", "50"});
  CHECK(js.code == kExitOk);
  std::istringstream lines(js.out);
  std::string first;
  std::getline(lines, first);
  CHECK(nlohmann::json::parse(first)["kind"] == "init");
}

TEST_CASE("learn then evaluate") {
  Scratch s;
  const std::string model = s.write("game.tan", testing::toy_game_model({{{1, 9}, {3, 4}}}));
  const std::string learnq = s.write("learn.q", testing::toy_game_query() + "\n");
  const std::string evalq = s.write("eval.q", "E[time<=10; 4](max: F) under S\n");
  const std::string strat = s.path("S.json");

  Result l = run({"learn", model, learnq, "--episodes", "300", "-o", strat});
  REQUIRE(l.code == kExitOk);
  CHECK(fs::exists(strat));

  Result e = run({"evaluate", model, evalq, "--strategy", strat, "--json"});
  REQUIRE(e.code == kExitOk);
  auto j = nlohmann::json::parse(e.out);
  CHECK(j["estimates"][0]["mean"] == 1.0);

  CHECK(run({"evaluate", model, evalq}).code == kExitUsage);
  CHECK(run({"estimate", model, evalq}).code == kExitUsage);

  const std::string other = s.write("light.tan", kLight);
  Result mismatch = run({"evaluate", other, s.write("e2.q", "E[time<=10; 1](max: presses) under S\n"), "--strategy", strat});
  CHECK(mismatch.code == kExitUsage);
  CHECK(mismatch.err.find("model hash mismatch") != std::string::npos);

  Result none = run({"learn", other, s.write("l2.q", "strategy S = minE(presses)[<=10]{} -> {}: <> true\n")});
  CHECK(none.code == kExitUsage);
  CHECK(none.err.find("model has no decision points") != std::string::npos);
}

TEST_CASE("drive model commands") {
  Scratch s;
  const std::string one = s.write("one.q", "E<> Motor.On\n");
  Result t = run({"bdm-table1", "--queries", one, "-o", s.path("t.json")});
  CHECK(t.code == kExitUsage);

  const std::string capped = s.path("capped.json");
  Result c = run({"bdm-table1", "--cap-states", "5", "-o", capped});
  CHECK(c.code == kExitCap);
  auto j = nlohmann::json::parse(std::ifstream(capped));
  CHECK(j["bound_exceeded"] == true);

  const std::string dir = s.path("sff");
  Result f = run({"bdm-sff", "--horizon-ms", "24000000", "--episodes", "20", "--baseline-seeds", "2", "--runs", "2",
                  "--out-dir", dir, "--target", "1.01", "--strict"});
  CHECK(f.code == kExitFailed);
  CHECK(f.out.find("target missed") != std::string::npos);
  CHECK(fs::exists(fs::path(dir) / "sff_report.json"));
  CHECK(fs::exists(fs::path(dir) / "learning_curve.csv"));
  CHECK(fs::exists(fs::path(dir) / "detection_bars.csv"));

  Result lenient = run({"bdm-sff", "--horizon-ms", "24000000", "--episodes", "20", "--baseline-seeds", "2", "--runs",
                        "2", "--out-dir", dir, "--target", "1.01"});
  CHECK(lenient.code == kExitOk);
}
