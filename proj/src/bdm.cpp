#include "tachyon/bdm.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace tachyon::bdm {

namespace assets {
// Generated from models/ and queries/ at configure time.
extern const char* const bdm_verif;
extern const char* const bdm_learn;
extern const char* const table1;
extern const char* const sff;
}  // namespace assets

namespace {

using json = nlohmann::json;

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Query> load_queries(std::string_view text, const TANetwork& n) {
  auto parsed = parse_queries(text);
  if (!parsed.diagnostics.empty()) throw CompileError(parsed.diagnostics.front().span, parsed.diagnostics.front().message);
  for (auto& q : *parsed) resolve_query(q, n);
  return std::move(*parsed.value);
}

json side_json(const SffSide& s) {
  json runs = json::array();
  for (const auto& c : s.runs) runs.push_back({{"detected", c.detected}, {"undetected", c.undetected}});
  return {{"detected_mean", s.detected_mean},
          {"undetected_mean", s.undetected_mean},
          {"sff", s.sff},
          {"sff_ci95", s.sff_ci95},
          {"pooled_sff", s.pooled_sff},
          {"runs", runs}};
}

}  // namespace

double sff(const FailureCounts& c) {
  const int64_t total = c.safe + c.detected + c.undetected;
  if (total == 0) throw std::domain_error("no failures recorded");
  return static_cast<double>(c.safe + c.detected) / static_cast<double>(total);
}

std::pair<int64_t, int64_t> sff_rational(const FailureCounts& c) {
  const int64_t total = c.safe + c.detected + c.undetected;
  if (total == 0) throw std::domain_error("no failures recorded");
  const int64_t g = std::gcd(c.safe + c.detected, total);
  return {(c.safe + c.detected) / g, total / g};
}

double diagnostic_coverage(const FailureCounts& c) {
  const int64_t total = c.detected + c.undetected;
  if (total == 0) throw std::domain_error("no failures recorded");
  return static_cast<double>(c.detected) / static_cast<double>(total);
}

double fitness_increment(double sff_now, double sff_target, double dt) {
  if (dt < 0) throw std::invalid_argument("negative time step");
  return std::abs(sff_now - sff_target) * dt;
}

std::string_view model_text(Variant v) {
  return v == Variant::Verification ? assets::bdm_verif : assets::bdm_learn;
}
std::string_view table1_text() { return assets::table1; }
std::string_view sff_queries_text() { return assets::sff; }

TANetwork build_bdm_model(Variant v) {
  auto parsed = parse_model(model_text(v));
  if (!parsed.ok()) throw CompileError(parsed.diagnostics.front().span, parsed.diagnostics.front().message);
  return std::move(*parsed.value);
}

std::vector<Query> table1_queries() { return load_queries(table1_text(), build_bdm_model(Variant::Verification)); }
std::vector<Query> sff_queries() { return load_queries(sff_queries_text(), build_bdm_model(Variant::Learning)); }

FailureCounts counts_of(const TANetwork& n, const ConcreteState& s) {
  auto det = n.find_slot("detected");
  auto und = n.find_slot("undetected");
  if (!det || !und) throw std::invalid_argument("model lacks detected/undetected counters");
  FailureCounts c;
  c.detected = s.env.slots[*det];
  c.undetected = s.env.slots[*und];
  return c;
}

std::vector<bool> table1_expected() { return {true, true, true, true, true, false, false, false, false, false, true, true}; }

Table1Report run_table1(const TANetwork& n, const std::vector<Query>& qs, const CheckOptions& opts,
                        const std::vector<bool>& expected) {
  if (qs.size() != expected.size()) throw std::invalid_argument("query count does not match expected verdicts");
  const auto t0 = std::chrono::steady_clock::now();
  Table1Report r;
  r.all_match = true;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    Table1Row row;
    row.row = static_cast<int>(i) + 1;
    row.expected = expected[i];
    row.verdict = check_query(n, qs[i], opts);
    row.verdict.witness.clear();
    switch (row.verdict.outcome) {
      case Outcome::BoundExceeded:
        row.status = "bound exceeded";
        r.bound_exceeded = true;
        break;
      case Outcome::Error: row.status = "error"; break;
      default: row.status = row.verdict.satisfied() == row.expected ? "match" : "mismatch";
    }
    if (row.status != "match") r.all_match = false;
    r.rows.push_back(std::move(row));
  }
  r.millis = elapsed_ms(t0);
  return r;
}

std::string to_json(const Table1Report& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"row", row.row},
                    {"query", row.verdict.query},
                    {"expected", row.expected ? "valid" : "invalid"},
                    {"outcome", std::string(to_string(row.verdict.outcome))},
                    {"status", row.status},
                    {"states", row.verdict.stats.states},
                    {"millis", row.verdict.stats.millis},
                    {"zeno_warning", row.verdict.zeno_warning},
                    {"message", row.verdict.message}});
  }
  json j = {{"version", 1},
            {"all_match", r.all_match},
            {"bound_exceeded", r.bound_exceeded},
            {"millis", r.millis},
            {"rows", rows}};
  return j.dump(2) + "\n";
}

std::vector<FailureCounts> sample_counts(const TANetwork& n, double horizon_ms, uint64_t seed, int runs,
                                         const Strategy* strategy, int threads) {
  std::vector<FailureCounts> out(static_cast<std::size_t>(std::max(runs, 0)));
  std::vector<std::string> errors(out.size());
  const int workers = std::max(1, std::min(threads, runs));
  auto work = [&](int w) {
    SimConfig cfg;
    cfg.horizon = horizon_ms;
    if (strategy) cfg.default_rate = strategy->config.default_rate;
    Simulator sim(n, cfg);
    std::unique_ptr<StrategyChooser> chooser;
    if (strategy) chooser = std::make_unique<StrategyChooser>(n, *strategy);
    for (int k = w; k < runs; k += workers) {
      Rng rng = Rng::for_run(seed + static_cast<uint64_t>(k), 0);
      Trace t = sim.run(rng, chooser.get());
      if (t.reason == StopReason::Error) errors[k] = t.error;
      out[k] = counts_of(n, t.final_state);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error("simulation error: " + e);
  return out;
}

SffSide summarize_side(std::vector<FailureCounts> runs) {
  SffSide s;
  FailureCounts pooled;
  std::vector<double> ratios;
  for (const auto& c : runs) {
    pooled.safe += c.safe;
    pooled.detected += c.detected;
    pooled.undetected += c.undetected;
    if (c.safe + c.detected + c.undetected > 0) ratios.push_back(sff(c));
  }
  s.pooled_sff = sff(pooled);
  if (!runs.empty()) {
    s.detected_mean = static_cast<double>(pooled.detected) / static_cast<double>(runs.size());
    s.undetected_mean = static_cast<double>(pooled.undetected) / static_cast<double>(runs.size());
  }
  EstimateStats st = summarize(ratios);
  s.sff = st.mean;
  s.sff_ci95 = st.ci95;
  s.runs = std::move(runs);
  return s;
}

SffReport run_sff_experiment(const TANetwork& n, const std::vector<Query>& qs, const SffConfig& cfg,
                             Strategy* learned) {
  const auto t0 = std::chrono::steady_clock::now();
  const Query* sq = nullptr;
  for (const auto& q : qs)
    if (q.kind == Query::Kind::StrategyMin) sq = &q;
  if (!sq) throw std::invalid_argument("no strategy query");
  const double horizon = cfg.horizon_ms > 0 ? cfg.horizon_ms : static_cast<double>(sq->horizon);

  SffReport r;
  r.target = cfg.target;
  for (int k = 0; k < cfg.baseline_seeds; ++k) r.baseline_seeds.push_back(cfg.seed + static_cast<uint64_t>(k));
  r.baseline = summarize_side(sample_counts(n, horizon, cfg.seed, cfg.baseline_seeds, nullptr, cfg.threads));

  LearnConfig lc = cfg.learn;
  lc.seed = cfg.seed;
  r.learn_seed = lc.seed;
  Strategy strat = learn_strategy(n, *sq, lc);
  r.curve = strat.curve;

  // Evaluation blocks are disjoint from the baseline block and from the
  // blocks of other learning seeds.
  const uint64_t eval_seed = 1'000'000 + cfg.seed * 10'000;
  r.learned = summarize_side(sample_counts(n, horizon, eval_seed, cfg.eval_runs, &strat, cfg.threads));

  SimConfig sc;
  sc.horizon = horizon;
  sc.default_rate = strat.config.default_rate;
  Simulator sim(n, sc);
  StrategyChooser probe(n, strat);
  Rng rng = Rng::for_run(eval_seed, 0);
  sim.run(rng, &probe);
  r.decisions = probe.decisions();
  r.fallbacks = probe.fallbacks();

  r.target_met = r.learned.sff >= cfg.target;
  r.millis = elapsed_ms(t0);
  if (learned) *learned = std::move(strat);
  return r;
}

std::string to_json(const SffReport& r) {
  json j = {{"version", 1},
            {"target", r.target},
            {"target_met", r.target_met},
            {"status", r.target_met ? "ok" : "target missed"},
            {"learn_seed", r.learn_seed},
            {"baseline_seeds", r.baseline_seeds},
            {"baseline", side_json(r.baseline)},
            {"learned", side_json(r.learned)},
            {"decisions", r.decisions},
            {"fallbacks", r.fallbacks},
            {"episodes", r.curve.size()},
            {"millis", r.millis}};
  return j.dump(2) + "\n";
}

std::string learning_curve_csv(const SffReport& r) {
  std::ostringstream os;
  os << std::setprecision(10) << "episode,cost,rolling_mean_50\n";
  double window = 0.0;
  for (std::size_t i = 0; i < r.curve.size(); ++i) {
    window += r.curve[i];
    if (i >= 50) window -= r.curve[i - 50];
    const double denom = static_cast<double>(std::min<std::size_t>(i + 1, 50));
    os << i + 1 << ',' << r.curve[i] << ',' << window / denom << '\n';
  }
  return os.str();
}

std::string detection_bars_csv(const SffReport& r) {
  std::ostringstream os;
  os << "series,detected,undetected,total,sff\n";
  auto line = [&](const char* name, const SffSide& s) {
    os << name << ',' << s.detected_mean << ',' << s.undetected_mean << ',' << s.detected_mean + s.undetected_mean
       << ',' << s.pooled_sff << '\n';
  };
  line("baseline", r.baseline);
  line("learned", r.learned);
  return os.str();
}

}  // namespace tachyon::bdm
