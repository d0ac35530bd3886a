// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Writes the drive-model reports into --report-dir.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bdm_probes.hpp"
#include "dbm_oracle.hpp"
#include "learning_oracles.hpp"
#include "random_models.hpp"
#include "tachyon/bdm.hpp"

using namespace tachyon;
namespace fs = std::filesystem;

namespace {

// Tolerances and sample sizes.
constexpr double kMin = 60000.0;
constexpr double kLatencyLo = 10.0;            // exclusive
constexpr double kLatencyHi = 28.0;            // inclusive
constexpr double kClockSlack = 1e-6;
constexpr int kLatencyRuns = 100;
constexpr double kLatencyHorizon = 99 * kMin;  // stays below the verification halt
constexpr int kBaselineSeeds = 20;
constexpr double kBaselineLo = 0.45;
constexpr double kBaselineHi = 0.55;
constexpr int kLearnSeeds = 5;
constexpr int kLearnSeedsRequired = 4;
constexpr double kSffTarget = 0.90;
constexpr int kZoneNetworks = 200;
constexpr int kDbmCases = 10000;
constexpr uint64_t kChainUpdates = 100000;
constexpr double kChainTolerance = 1e-2;
constexpr int kRandomModels = 1000;
constexpr int kDualityModels = 50;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bdm::Table1Report g_table1;   // shared by criteria 1 and 2

Result table1(const fs::path& dir) {
  TANetwork n = bdm::build_bdm_model(bdm::Variant::Verification);
  g_table1 = bdm::run_table1(n, bdm::table1_queries());
  std::ofstream(dir / "table1_report.json") << bdm::to_json(g_table1);
  int matches = 0;
  std::string verdicts;
  for (const auto& row : g_table1.rows) {
    matches += row.status == "match";
    verdicts += row.verdict.satisfied() ? 'V' : 'I';
  }
  return {g_table1.all_match && g_table1.rows.size() == 12,
          std::to_string(matches) + "/12 rows match, verdicts " + verdicts};
}

Result timing() {
  bool rows = g_table1.rows.size() == 12 && g_table1.rows[10].status == "match" &&
              g_table1.rows[11].status == "match";
  TANetwork n = bdm::build_bdm_model(bdm::Variant::Verification);
  std::size_t stops = 0;
  std::size_t outside = 0;
  uint64_t motor = 0;
  double lo = 1e300, hi = -1e300;
  for (int run = 0; run < kLatencyRuns; ++run) {
    auto p = testing::probe_bdm_run(n, kLatencyHorizon, static_cast<uint64_t>(run), 0);
    motor += p.motor_violations;
    for (double lat : p.stop_latencies) {
      ++stops;
      lo = std::min(lo, lat);
      hi = std::max(hi, lat);
      if (!(lat > kLatencyLo && lat <= kLatencyHi + kClockSlack)) ++outside;
    }
  }
  std::string detail = std::string("rows 11-12 ") + (rows ? "match" : "differ") + "; " + std::to_string(stops) +
                       " stops in " + std::to_string(kLatencyRuns) + " runs, latency " + fmt("%.3f", lo) + ".." +
                       fmt("%.3f", hi) + " ms, " + std::to_string(outside) + " outside (10, 28]";
  return {rows && stops > 0 && outside == 0 && motor == 0, detail};
}

bdm::SffReport g_seed1;   // shared by criteria 3 and 4

Result baseline(const fs::path& dir) {
  TANetwork n = bdm::build_bdm_model(bdm::Variant::Learning);
  bdm::SffConfig cfg;
  cfg.seed = 1;
  cfg.baseline_seeds = kBaselineSeeds;
  g_seed1 = bdm::run_sff_experiment(n, bdm::sff_queries(), cfg);
  std::ofstream(dir / "sff_report.json") << bdm::to_json(g_seed1);
  std::ofstream(dir / "learning_curve.csv") << bdm::learning_curve_csv(g_seed1);
  std::ofstream(dir / "detection_bars.csv") << bdm::detection_bars_csv(g_seed1);
  const auto& b = g_seed1.baseline;
  std::string detail = "mean ratio " + fmt("%.4f", b.sff) + " +/- " + fmt("%.4f", b.sff_ci95) + " over " +
                       std::to_string(b.runs.size()) + " seeds (detected " + fmt("%.1f", b.detected_mean) +
                       ", undetected " + fmt("%.1f", b.undetected_mean) + ")";
  return {static_cast<int>(b.runs.size()) >= kBaselineSeeds && b.sff >= kBaselineLo && b.sff <= kBaselineHi, detail};
}

Result learned() {
  TANetwork n = bdm::build_bdm_model(bdm::Variant::Learning);
  std::vector<bdm::SffReport> reports = {g_seed1};
  for (int seed = 2; seed <= kLearnSeeds; ++seed) {
    bdm::SffConfig cfg;
    cfg.seed = static_cast<uint64_t>(seed);
    cfg.baseline_seeds = 1;
    reports.push_back(bdm::run_sff_experiment(n, bdm::sff_queries(), cfg));
  }
  int met = 0;
  int improved = 0;
  std::string per_seed;
  for (const auto& r : reports) {
    met += r.learned.sff >= kSffTarget;
    const std::size_t k = std::max<std::size_t>(r.curve.size() / 10, 1);
    double first = 0, last = 0;
    for (std::size_t i = 0; i < k; ++i) {
      first += r.curve[i];
      last += r.curve[r.curve.size() - 1 - i];
    }
    improved += last < first;
    per_seed += (per_seed.empty() ? "" : " ") + fmt("%.4f", r.learned.sff);
  }
  std::string detail = std::to_string(met) + "/" + std::to_string(kLearnSeeds) + " seeds reach " +
                       fmt("%.2f", kSffTarget) + " (" + per_seed + "); cost fell in " + std::to_string(improved) + "/" +
                       std::to_string(kLearnSeeds) + " learning curves; " + std::to_string(g_seed1.fallbacks) +
                       " fallbacks in " + std::to_string(g_seed1.decisions) + " decisions";
  return {met >= kLearnSeedsRequired, detail};
}

TANetwork compile(const std::string& text) {
  auto p = parse_model(text);
  if (!p.ok()) throw std::runtime_error("generated model failed to parse: " + p.diagnostics.front().message);
  return std::move(*p.value);
}

Result zones() {
  std::mt19937_64 rng(20240);
  int agree = 0;
  std::size_t states = 0;
  for (int k = 0; k < kZoneNetworks; ++k) {
    testing::GenNetwork g = testing::random_network(rng);
    auto oracle = testing::discrete_reachable(g);
    agree += oracle == testing::zone_reachable(compile(testing::to_text(g)));
    states += oracle.size();
  }
  return {agree == kZoneNetworks, std::to_string(agree) + "/" + std::to_string(kZoneNetworks) +
                                      " networks agree, mean " +
                                      fmt("%.1f", static_cast<double>(states) / kZoneNetworks) + " control states"};
}

Result dbm() {
  auto r = testing::run_dbm_properties(7, kDbmCases);
  std::string detail = std::to_string(r.cases) + " cases, " + std::to_string(r.failures()) + " failures";
  if (!r.first_failure.empty()) detail += " (" + r.first_failure + ")";
  return {r.cases >= static_cast<uint64_t>(kDbmCases) && r.failures() == 0, detail};
}

Result qlearning() {
  auto chain = testing::run_chain_mdp(1, kChainUpdates);
  const std::vector<testing::GameCosts> games = {
      {{{1, 9}, {3, 4}}}, {{{7, 5}, {6, 2}}}, {{{4, 8}, {9, 3}}}, {{{6, 2}, {1, 8}}}};
  int solved = 0;
  for (const auto& costs : games) {
    TANetwork n = compile(testing::toy_game_model(costs));
    auto q = parse_query(testing::toy_game_query());
    resolve_query(*q, n);
    LearnConfig cfg;
    cfg.episodes = 400;
    cfg.alpha = 0.2;
    cfg.gamma = 1.0;
    cfg.discount_time = 0.0;
    cfg.seed = 1;
    Strategy s = learn_strategy(n, *q, cfg);
    SimConfig sc;
    sc.horizon = 10;
    Simulator sim(n, sc);
    StrategyChooser chooser(n, s);
    Rng rng(1);
    Trace t = sim.run(rng, &chooser);
    const int64_t cost = t.final_state.env.slots[static_cast<std::size_t>(*n.find_slot("F"))];
    solved += cost == testing::enumerate_toy_game(costs).cost && chooser.fallbacks() == 0;
  }
  std::string detail = "chain max error " + fmt("%.2e", chain.max_error) + " after " + std::to_string(chain.updates) +
                       " updates; " + std::to_string(solved) + "/" + std::to_string(games.size()) +
                       " toy games at the enumerated optimum";
  return {chain.max_error <= kChainTolerance && solved == static_cast<int>(games.size()), detail};
}

bool round_trips(const std::string& text) {
  auto p = parse_model(text);
  if (!p.ok()) return false;
  auto again = parse_model(pretty_print(*p));
  return again.ok() && again->ast == p->ast;
}

Result parser() {
  int bundled = 0;
  for (auto v : {bdm::Variant::Verification, bdm::Variant::Learning})
    bundled += round_trips(std::string(bdm::model_text(v)));
  std::mt19937_64 rng(1000);
  int random = 0;
  for (int k = 0; k < kRandomModels; ++k) random += round_trips(testing::random_rich_model(rng));
  auto qs = parse_queries(bdm::table1_text());
  const std::size_t queries = qs.ok() && qs.diagnostics.empty() ? qs->size() : 0;
  return {bundled == 2 && random == kRandomModels && queries == 12,
          std::to_string(bundled) + "/2 bundled, " + std::to_string(random) + "/" + std::to_string(kRandomModels) +
              " random models round-trip; " + std::to_string(queries) + "/12 queries parse"};
}

Result duality() {
  std::mt19937_64 rng(5050);
  int agree = 0;
  int reachable = 0;
  for (int k = 0; k < kDualityModels; ++k) {
    testing::GenNetwork g = testing::random_network(rng);
    TANetwork n = compile(testing::to_text(g));
    const std::string phi = testing::random_predicate(rng, g);
    auto e = parse_query("E<> " + phi);
    auto a = parse_query("A[] not (" + phi + ")");
    if (!e.ok() || !a.ok()) continue;
    const bool reach = check_query(n, *e).satisfied();
    const bool inv = check_query(n, *a).satisfied();
    agree += reach == !inv;
    reachable += reach;
  }
  return {agree == kDualityModels, std::to_string(agree) + "/" + std::to_string(kDualityModels) + " agree (" +
                                       std::to_string(reachable) + " predicates reachable)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tachyon acceptance gate"};
  std::string report_dir = ".";
  std::vector<int> only;
  app.add_option("--report-dir", report_dir, "Where the drive-model reports are written");
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(report_dir);
  const fs::path dir(report_dir);

  const std::vector<std::pair<std::string, std::function<Result()>>> criteria = {
      {"drive model verdicts", [&] { return table1(dir); }},
      {"motor-off timing", timing},
      {"baseline detection ratio", [&] { return baseline(dir); }},
      {"learned detection ratio", learned},
      {"zone graph vs discrete oracle", zones},
      {"DBM properties", dbm},
      {"Q-learning oracles", qlearning},
      {"parser round-trip", parser},
      {"reachability/invariance duality", duality},
  };

  auto wanted = [&](int k) {
    if (only.empty()) return true;
    // Later criteria reuse results of earlier ones.
    for (int o : only)
      if (o == k || (o == 2 && k == 1) || (o == 4 && k == 3)) return true;
    return false;
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    if (!wanted(k)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Result o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << k << ". " << criteria[i].first << ": " << o.detail << " ["
              << fmt("%.1f", seconds_since(t0)) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
