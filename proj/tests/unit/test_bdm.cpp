#include <doctest.h>

#include <json.hpp>

#include <sstream>

#include "bdm_probes.hpp"
#include "tachyon/bdm.hpp"

using namespace tachyon;
using namespace tachyon::bdm;

namespace {

constexpr double kMin = 60000.0;

std::vector<Query> table_row(std::size_t row) {
  std::vector<Query> qs = table1_queries();
  REQUIRE(row < qs.size());
  return {qs[row]};
}

}  // namespace

TEST_CASE("safe failure fraction") {
  CHECK(sff({0, 185, 196}) == doctest::Approx(0.48556).epsilon(1e-4));
  CHECK(sff({0, 290, 29}) == doctest::Approx(0.90909).epsilon(1e-4));
  CHECK(sff({0, 7, 0}) == 1.0);
  CHECK(sff({3, 0, 1}) == 0.75);
  CHECK_THROWS_WITH_AS(sff({0, 0, 0}), "no failures recorded", std::domain_error);

  CHECK(sff_rational({0, 185, 196}) == std::pair<int64_t, int64_t>{185, 381});
  CHECK(sff_rational({0, 290, 29}) == std::pair<int64_t, int64_t>{10, 11});
  for (int64_t s = 0; s < 4; ++s)
    for (int64_t d = 0; d < 6; ++d)
      for (int64_t u = 0; u < 6; ++u) {
        if (s + d + u == 0) continue;
        auto [num, den] = sff_rational({s, d, u});
        CHECK(num * (s + d + u) == (s + d) * den);
        if (s == 0 && d + u > 0) CHECK(diagnostic_coverage({s, d, u}) == sff({s, d, u}));
      }
}

TEST_CASE("fitness increment") {
  CHECK(fitness_increment(48.5, 90, 1) == doctest::Approx(41.5));
  CHECK(fitness_increment(90, 90, 123) == 0.0);
  CHECK(fitness_increment(95, 90, 2) == 10.0);
  CHECK_THROWS_AS(fitness_increment(50, 90, -1), std::invalid_argument);
}

TEST_CASE("model cost equals host integration of the coverage gap") {
  TANetwork n = build_bdm_model(Variant::Learning);
  for (uint64_t run = 0; run < 5; ++run) {
    auto p = testing::probe_bdm_run(n, 600.5 * kMin, 31, run);
    CHECK_FALSE(p.error);
    CHECK(p.model_cost > 0);
    CHECK(static_cast<double>(p.model_cost) == doctest::Approx(p.host_cost).epsilon(1e-12));
  }
}

TEST_CASE("the learning variant does not deadlock") {
  TANetwork n = build_bdm_model(Variant::Learning);
  int deadlocks = 0;
  int errors = 0;
  for (uint64_t run = 0; run < 100; ++run) {
    auto p = testing::probe_bdm_run(n, 300 * kMin, 77, run);
    deadlocks += p.deadlock;
    errors += p.error;
  }
  CHECK(deadlocks == 0);
  CHECK(errors == 0);
}

TEST_CASE("motor stops between 10 and 28 ms after a detection") {
  for (auto v : {Variant::Verification, Variant::Learning}) {
    TANetwork n = build_bdm_model(v);
    std::size_t stops = 0;
    for (uint64_t run = 0; run < 20; ++run) {
      auto p = testing::probe_bdm_run(n, 99 * kMin, 5, run);
      for (double lat : p.stop_latencies) {
        CHECK(lat > 10.0);
        CHECK(lat <= 28.0 + 1e-9);
      }
      CHECK(p.motor_violations == 0);
      stops += p.stop_latencies.size();
    }
    CHECK(stops > 20);
  }
}

TEST_CASE("one fault per two inspections") {
  // Each inspection reaches one fault injector, which fails with probability
  // one half. Operator downtime thins the inspections but not this ratio.
  TANetwork n = build_bdm_model(Variant::Learning);
  uint64_t inspections = 0;
  int64_t faults = 0;
  for (uint64_t run = 0; run < 30; ++run) {
    auto p = testing::probe_bdm_run(n, 2000 * kMin, 13, run);
    inspections += p.inspections;
    faults += p.total_faults;
  }
  REQUIRE(inspections > 6000);
  CHECK(static_cast<double>(faults) / static_cast<double>(inspections) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("the verification variant halts") {
  TANetwork n = build_bdm_model(Variant::Verification);
  auto p = testing::probe_bdm_run(n, 400 * kMin, 1, 0);
  CHECK(p.deadlock);
}

TEST_CASE("table harness reports mismatches and caps") {
  TANetwork n = build_bdm_model(Variant::Verification);
  CHECK_THROWS_AS(run_table1(n, table_row(0)), std::invalid_argument);

  Table1Report ok = run_table1(n, table_row(3), {}, {true});
  REQUIRE(ok.rows.size() == 1);
  CHECK(ok.rows[0].status == "match");
  CHECK(ok.all_match);

  std::string text(model_text(Variant::Verification));
  const std::string stop = "edge Braking -> Off";
  auto at = text.find(stop);
  REQUIRE(at != std::string::npos);
  text.replace(at, stop.size(), "edge Braking -> Slowing");
  auto broken = parse_model(text);
  REQUIRE(broken.ok());
  Table1Report bad = run_table1(*broken, table_row(3), {}, {true});
  CHECK(bad.rows[0].status == "mismatch");
  CHECK_FALSE(bad.all_match);
  CHECK_FALSE(bad.bound_exceeded);

  CheckOptions tiny;
  tiny.cap_states = 10;
  Table1Report capped = run_table1(n, table_row(0), tiny, {true});
  CHECK(capped.rows[0].status == "bound exceeded");
  CHECK(capped.bound_exceeded);
  CHECK_FALSE(capped.all_match);

  auto j = nlohmann::json::parse(to_json(capped));
  CHECK(j["version"] == 1);
  CHECK(j["rows"][0]["status"] == "bound exceeded");
  CHECK(j["rows"][0]["expected"] == "valid");
}

TEST_CASE("no failures recorded at horizon zero") {
  TANetwork n = build_bdm_model(Variant::Learning);
  auto counts = sample_counts(n, 0.0, 1, 3);
  REQUIRE(counts.size() == 3);
  CHECK(counts[0].detected + counts[0].undetected == 0);
  CHECK_THROWS_WITH_AS(summarize_side(counts), "no failures recorded", std::domain_error);
}

TEST_CASE("sampling is reproducible across thread counts") {
  TANetwork n = build_bdm_model(Variant::Learning);
  auto one = sample_counts(n, 500 * kMin, 4, 4, nullptr, 1);
  auto two = sample_counts(n, 500 * kMin, 4, 4, nullptr, 2);
  REQUIRE(one.size() == two.size());
  for (std::size_t k = 0; k < one.size(); ++k) {
    CHECK(one[k].detected == two[k].detected);
    CHECK(one[k].undetected == two[k].undetected);
  }
}

TEST_CASE("a short experiment produces every report") {
  TANetwork n = build_bdm_model(Variant::Learning);
  SffConfig cfg;
  cfg.baseline_seeds = 3;
  cfg.eval_runs = 3;
  cfg.horizon_ms = 400 * kMin;
  cfg.learn.episodes = 30;
  SffReport r = run_sff_experiment(n, sff_queries(), cfg);
  CHECK(r.baseline.runs.size() == 3);
  CHECK(r.learned.runs.size() == 3);
  CHECK(r.curve.size() == 30);
  CHECK(r.baseline_seeds == std::vector<uint64_t>{1, 2, 3});
  CHECK(r.target_met == (r.learned.sff >= 0.90));

  auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["status"] == (r.target_met ? "ok" : "target missed"));
  CHECK(j["baseline"]["runs"].size() == 3);

  std::istringstream curve(learning_curve_csv(r));
  std::string line;
  std::getline(curve, line);
  CHECK(line == "episode,cost,rolling_mean_50");
  int rows = 0;
  while (std::getline(curve, line)) ++rows;
  CHECK(rows == 30);

  const std::string bars = detection_bars_csv(r);
  CHECK(bars.rfind("series,detected,undetected,total,sff\nbaseline,", 0) == 0);
  CHECK(bars.find("\nlearned,") != std::string::npos);
}
