#include "tachyon/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "tachyon/bdm.hpp"
#include "tachyon/checker.hpp"
#include "tachyon/learner.hpp"
#include "tachyon/sim.hpp"

#ifndef TACHYON_VERSION
#define TACHYON_VERSION "0.0.0"
#endif

namespace tachyon {

namespace {

using json = nlohmann::json;

struct Options {
  std::string model;
  std::string queries;
  std::string strategy;
  std::string output;
  std::string out_dir = ".";
  uint64_t seed = 1;
  uint64_t cap_states = 0;
  int runs = 0;
  double horizon_ms = 0.0;
  bool json = false;
  bool strict = false;
  int threads = 1;
  int episodes = 2000;
  int baseline_seeds = 20;
  double target = 0.90;
};

// Carries an exit code out of nested helpers.
struct Exit {
  int code;
};

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Runner {
 public:
  Runner(Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {}

  TANetwork model() {
    auto text = read_file(o_.model);
    if (!text) {
      err_ << o_.model << ": cannot read file\n";
      throw Exit{kExitUsage};
    }
    auto parsed = parse_model(*text);
    for (const auto& d : parsed.diagnostics) err_ << format_diagnostic(d, o_.model) << "\n";
    if (!parsed.ok()) throw Exit{kExitUsage};
    return std::move(*parsed.value);
  }

  std::vector<Query> queries(const TANetwork& n) {
    auto text = read_file(o_.queries);
    if (!text) {
      err_ << o_.queries << ": cannot read file\n";
      throw Exit{kExitUsage};
    }
    auto parsed = parse_queries(*text);
    bool bad = !parsed.diagnostics.empty();
    for (const auto& d : parsed.diagnostics) err_ << format_diagnostic(d, o_.queries) << "\n";
    if (parsed.ok()) {
      for (auto& q : *parsed) {
        try {
          resolve_query(q, n);
        } catch (const CompileError& e) {
          Diagnostic d = e.diagnostic();
          d.span.line = q.span.line;
          err_ << format_diagnostic(d, o_.queries) << "\n";
          bad = true;
        }
      }
    }
    if (bad || !parsed.ok()) throw Exit{kExitUsage};
    return std::move(*parsed.value);
  }

  CheckOptions check_options() const {
    CheckOptions c;
    if (o_.cap_states > 0) c.cap_states = o_.cap_states;
    return c;
  }

  int check() {
    TANetwork n = model();
    std::vector<Query> qs = queries(n);
    bool routed = true;
    for (const auto& q : qs) {
      if (q.kind == Query::Kind::StrategyMin || q.kind == Query::Kind::Estimate) {
        err_ << o_.queries << ":" << q.span.line << ": routing error: '" << q.text << "' needs `"
             << (q.kind == Query::Kind::StrategyMin ? "learn" : "estimate") << "`, not `check`\n";
        routed = false;
      }
    }
    if (!routed) return kExitUsage;
    std::vector<Verdict> vs = run_query_file(n, qs, check_options());
    int code = kExitOk;
    json arr = json::array();
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const Verdict& v = vs[i];
      if (v.outcome == Outcome::BoundExceeded) code = kExitCap;
      if (code != kExitCap && o_.strict && !v.satisfied()) code = kExitFailed;
      if (code == kExitOk && v.outcome == Outcome::Error) code = kExitFailed;
      if (o_.json) {
        arr.push_back({{"index", i + 1},
                       {"query", v.query},
                       {"outcome", std::string(to_string(v.outcome))},
                       {"states", v.stats.states},
                       {"millis", v.stats.millis},
                       {"zeno_warning", v.zeno_warning},
                       {"message", v.message},
                       {"trace", v.actions}});
      } else {
        out_ << i + 1 << ". " << to_string(v.outcome) << "  " << v.query << "  (" << v.stats.states << " states, "
             << static_cast<int64_t>(v.stats.millis) << " ms)";
        if (!v.message.empty()) out_ << "  " << v.message;
        out_ << "\n";
      }
    }
    if (o_.json) out_ << json{{"version", 1}, {"verdicts", arr}}.dump(2) << "\n";
    return code;
  }

  std::optional<Strategy> strategy(const TANetwork& n, bool required) {
    if (o_.strategy.empty()) {
      if (required) {
        err_ << "a strategy file is required (--strategy)\n";
        throw Exit{kExitUsage};
      }
      return std::nullopt;
    }
    auto text = read_file(o_.strategy);
    if (!text) {
      err_ << o_.strategy << ": cannot read file\n";
      throw Exit{kExitUsage};
    }
    try {
      return import_strategy(*text, model_hash(n));
    } catch (const std::exception& e) {
      err_ << o_.strategy << ": " << e.what() << "\n";
      throw Exit{kExitUsage};
    }
  }

  int simulate() {
    TANetwork n = model();
    std::optional<Strategy> strat = strategy(n, false);
    SimConfig cfg;
    cfg.horizon = o_.horizon_ms > 0 ? o_.horizon_ms : 60000.0;
    cfg.seed = o_.seed;
    cfg.record = o_.json;
    if (strat) cfg.default_rate = strat->config.default_rate;
    Simulator sim(n, cfg);
    std::unique_ptr<StrategyChooser> chooser;
    if (strat) chooser = std::make_unique<StrategyChooser>(n, *strat);
    const int runs = std::max(o_.runs, 1);
    int code = kExitOk;
    for (int r = 0; r < runs; ++r) {
      Rng rng = Rng::for_run(cfg.seed, static_cast<uint64_t>(r));
      Trace t = sim.run(rng, chooser.get());
      if (t.reason == StopReason::Error) code = kExitFailed;
      if (o_.json) {
        out_ << trace_jsonl(t);
        continue;
      }
      out_ << "run " << r << ": " << to_string(t.reason) << " at " << t.final_state.time << " ms after " << t.steps
           << " steps";
      if (!t.error.empty()) out_ << " (" << t.error << ")";
      out_ << "\n ";
      for (std::size_t i = 0; i < n.slots.size(); ++i) out_ << " " << n.slots[i].name << "=" << t.final_state.env.slots[i];
      out_ << "\n";
    }
    return code;
  }

  // Estimates every E[...] query; pairs `detected`/`undetected` estimates
  // into a detection ratio, since equal seeds replay identical runs.
  int estimate_queries(bool require_strategy) {
    TANetwork n = model();
    std::vector<Query> qs = queries(n);
    std::optional<Strategy> strat = strategy(n, require_strategy);
    std::vector<const Query*> est;
    for (const auto& q : qs) {
      if (q.kind == Query::Kind::Estimate) {
        est.push_back(&q);
        if (q.under && !strat) {
          err_ << o_.queries << ":" << q.span.line << ": query needs strategy '" << *q.under
               << "' (--strategy)\n";
          return kExitUsage;
        }
      }
    }
    if (est.empty()) {
      err_ << o_.queries << ": no estimation queries\n";
      return kExitUsage;
    }
    json arr = json::array();
    std::optional<EstimateStats> det, und;
    for (const Query* q : est) {
      SimConfig cfg;
      cfg.horizon = o_.horizon_ms > 0 ? o_.horizon_ms : static_cast<double>(q->horizon);
      cfg.runs = o_.runs > 0 ? o_.runs : static_cast<int>(q->runs);
      cfg.seed = o_.seed;
      cfg.threads = o_.threads;
      std::function<std::unique_ptr<Chooser>()> factory;
      if (q->under) {
        cfg.default_rate = strat->config.default_rate;
        factory = [&]() { return std::unique_ptr<Chooser>(std::make_unique<StrategyChooser>(n, *strat)); };
      }
      EstimateStats st = tachyon::estimate(n, q->value, cfg, factory);
      const std::string value = to_string(q->value);
      if (value == "detected") det = st;
      if (value == "undetected") und = st;
      if (o_.json) {
        arr.push_back({{"query", q->text},
                       {"runs", cfg.runs},
                       {"mean", st.mean},
                       {"ci95", st.ci95},
                       {"degenerate_ci", st.degenerate_ci},
                       {"min", st.min},
                       {"max", st.max},
                       {"deadlocks", st.deadlocks},
                       {"errors", st.errors}});
      } else {
        out_ << q->text << "\n  mean " << st.mean << " +/- " << st.ci95 << " (" << cfg.runs << " runs, min "
             << st.min << ", max " << st.max << ")";
        if (st.deadlocks) out_ << ", " << st.deadlocks << " deadlocked";
        if (st.errors) out_ << ", " << st.errors << " errors";
        out_ << "\n";
      }
    }
    int code = kExitOk;
    json ratio;
    if (det && und && det->values.size() == und->values.size()) {
      std::vector<bdm::FailureCounts> runs;
      for (std::size_t i = 0; i < det->values.size(); ++i)
        runs.push_back({0, static_cast<int64_t>(det->values[i]), static_cast<int64_t>(und->values[i])});
      try {
        bdm::SffSide side = bdm::summarize_side(runs);
        const bool met = side.sff >= o_.target;
        if (!met && o_.strict) code = kExitFailed;
        ratio = {{"sff", side.sff}, {"sff_ci95", side.sff_ci95}, {"target", o_.target}, {"target_met", met}};
        if (!o_.json)
          out_ << "SFF " << side.sff * 100.0 << "% +/- " << side.sff_ci95 * 100.0 << " (target "
               << o_.target * 100.0 << "%" << (met ? "" : ", target missed") << ")\n";
      } catch (const std::domain_error& e) {
        err_ << e.what() << "\n";
        code = kExitFailed;
      }
    }
    if (o_.json) {
      json j = {{"version", 1}, {"estimates", arr}};
      if (!ratio.is_null()) j["detection"] = ratio;
      out_ << j.dump(2) << "\n";
    }
    return code;
  }

  int learn() {
    TANetwork n = model();
    std::vector<Query> qs = queries(n);
    const Query* sq = nullptr;
    for (const auto& q : qs)
      if (q.kind == Query::Kind::StrategyMin && !sq) sq = &q;
    if (!sq) {
      err_ << o_.queries << ": no strategy query\n";
      return kExitUsage;
    }
    LearnConfig lc;
    lc.seed = o_.seed;
    lc.episodes = o_.episodes;
    Strategy s;
    try {
      s = learn_strategy(n, *sq, lc);
    } catch (const CompileError& e) {
      err_ << format_diagnostic(e.diagnostic(), o_.model) << "\n";
      return kExitUsage;
    }
    const std::string path = o_.output.empty() ? s.name + ".json" : o_.output;
    std::ofstream f(path);
    if (!f) {
      err_ << path << ": cannot write file\n";
      return kExitUsage;
    }
    f << export_strategy(s);
    const std::size_t k = std::max<std::size_t>(s.curve.size() / 10, 1);
    double first = 0, last = 0;
    for (std::size_t i = 0; i < k && i < s.curve.size(); ++i) {
      first += s.curve[i];
      last += s.curve[s.curve.size() - 1 - i];
    }
    first /= static_cast<double>(k);
    last /= static_cast<double>(k);
    if (o_.json) {
      out_ << json{{"version", 1}, {"strategy", path}, {"episodes", s.curve.size()}, {"entries", s.entries.size()},
                   {"cost_first_decile", first}, {"cost_last_decile", last}}
                  .dump(2)
           << "\n";
    } else {
      out_ << "learned " << s.name << " over " << s.curve.size() << " episodes: " << s.entries.size()
           << " states, mean cost " << first << " (first 10%) -> " << last << " (last 10%)\nwrote " << path << "\n";
    }
    return kExitOk;
  }

  int bdm_table1() {
    TANetwork n = o_.model.empty() ? bdm::build_bdm_model(bdm::Variant::Verification) : model();
    std::vector<Query> qs;
    if (o_.queries.empty()) {
      auto parsed = parse_queries(bdm::table1_text());
      qs = std::move(*parsed.value);
      for (auto& q : qs) resolve_query(q, n);
    } else {
      qs = queries(n);
    }
    bdm::Table1Report r;
    try {
      r = bdm::run_table1(n, qs, check_options());
    } catch (const std::invalid_argument& e) {
      err_ << e.what() << "\n";
      return kExitUsage;
    }
    const std::string path = o_.output.empty() ? "table1_report.json" : o_.output;
    const std::string report = bdm::to_json(r);
    std::ofstream(path) << report;
    if (o_.json) {
      out_ << report;
    } else {
      for (const auto& row : r.rows)
        out_ << "row " << row.row << ": expected " << (row.expected ? "valid" : "invalid") << ", got "
             << to_string(row.verdict.outcome) << "  [" << row.status << "]\n";
      out_ << (r.all_match ? "all rows match" : "rows differ") << "; wrote " << path << "\n";
    }
    if (r.bound_exceeded) return kExitCap;
    return r.all_match ? kExitOk : kExitFailed;
  }

  int bdm_sff() {
    TANetwork n = o_.model.empty() ? bdm::build_bdm_model(bdm::Variant::Learning) : model();
    std::vector<Query> qs;
    if (o_.queries.empty()) {
      auto parsed = parse_queries(bdm::sff_queries_text());
      qs = std::move(*parsed.value);
      for (auto& q : qs) resolve_query(q, n);
    } else {
      qs = queries(n);
    }
    bdm::SffConfig cfg;
    cfg.seed = o_.seed;
    cfg.baseline_seeds = o_.baseline_seeds;
    if (o_.runs > 0) cfg.eval_runs = o_.runs;
    cfg.threads = o_.threads;
    cfg.horizon_ms = o_.horizon_ms;
    cfg.target = o_.target;
    cfg.learn.episodes = o_.episodes;
    bdm::SffReport r;
    try {
      r = bdm::run_sff_experiment(n, qs, cfg);
    } catch (const std::domain_error& e) {
      err_ << e.what() << "\n";
      return kExitFailed;
    } catch (const std::invalid_argument& e) {
      err_ << e.what() << "\n";
      return kExitUsage;
    }
    namespace fs = std::filesystem;
    fs::create_directories(o_.out_dir);
    const std::string report = bdm::to_json(r);
    std::ofstream(fs::path(o_.out_dir) / "sff_report.json") << report;
    std::ofstream(fs::path(o_.out_dir) / "learning_curve.csv") << bdm::learning_curve_csv(r);
    std::ofstream(fs::path(o_.out_dir) / "detection_bars.csv") << bdm::detection_bars_csv(r);
    if (o_.json) {
      out_ << report;
    } else {
      out_ << "baseline: detected " << r.baseline.detected_mean << ", undetected " << r.baseline.undetected_mean
           << ", SFF " << r.baseline.sff * 100.0 << "% (" << r.baseline.runs.size() << " seeds)\n"
           << "learned:  detected " << r.learned.detected_mean << ", undetected " << r.learned.undetected_mean
           << ", SFF " << r.learned.sff * 100.0 << "% (" << r.learned.runs.size() << " runs)\n"
           << (r.target_met ? "target met" : "target missed") << "; reports in " << o_.out_dir << "\n";
    }
    return !r.target_met && o_.strict ? kExitFailed : kExitOk;
  }

 private:
  Options& o_;
  std::ostream& out_;
  std::ostream& err_;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"tachyon: timed automata verification, simulation and strategy learning", "tachyon"};
  app.set_version_flag("--version", std::string("tachyon ") + TACHYON_VERSION);
  app.require_subcommand(1);

  auto model_arg = [&](CLI::App* s) { s->add_option("model", o.model, "Model file (.tan)")->required(); };
  auto query_arg = [&](CLI::App* s) { s->add_option("queries", o.queries, "Query file (.q)")->required(); };
  auto seed = [&](CLI::App* s) { s->add_option("--seed", o.seed, "Random seed"); };
  auto threads = [&](CLI::App* s) { s->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber); };
  auto json_flag = [&](CLI::App* s) { s->add_flag("--json", o.json, "Machine-readable output"); };
  auto strict = [&](CLI::App* s) { s->add_flag("--strict", o.strict, "Exit 1 on failed properties or missed targets"); };
  auto cap = [&](CLI::App* s) { s->add_option("--cap-states", o.cap_states, "Symbolic state cap"); };
  auto runs = [&](CLI::App* s) { s->add_option("--runs", o.runs, "Simulation runs")->check(CLI::NonNegativeNumber); };
  auto horizon = [&](CLI::App* s) { s->add_option("--horizon-ms", o.horizon_ms, "Time horizon in ms"); };
  auto target = [&](CLI::App* s) { s->add_option("--target", o.target, "Detection ratio target"); };

  CLI::App* check = app.add_subcommand("check", "Verify E<>, A[] and leads-to queries");
  model_arg(check); query_arg(check); seed(check); cap(check); json_flag(check); strict(check); threads(check);

  CLI::App* simulate = app.add_subcommand("simulate", "Run seeded stochastic simulations");
  model_arg(simulate); seed(simulate); runs(simulate); horizon(simulate); json_flag(simulate); threads(simulate);
  simulate->add_option("--strategy", o.strategy, "Strategy file guiding controllable choices");

  CLI::App* estimate = app.add_subcommand("estimate", "Estimate E[...] queries by simulation");
  model_arg(estimate); query_arg(estimate); seed(estimate); runs(estimate); horizon(estimate); json_flag(estimate); threads(estimate); strict(estimate); target(estimate);
  estimate->add_option("--strategy", o.strategy, "Strategy file for queries with `under`");

  CLI::App* learn = app.add_subcommand("learn", "Learn a strategy for a minE query");
  model_arg(learn); query_arg(learn); seed(learn); json_flag(learn); threads(learn);
  learn->add_option("--episodes", o.episodes, "Training episodes")->check(CLI::PositiveNumber);
  learn->add_option("-o,--output", o.output, "Strategy output file");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Estimate queries under a learned strategy");
  model_arg(evaluate); query_arg(evaluate); seed(evaluate); runs(evaluate); horizon(evaluate); json_flag(evaluate); threads(evaluate); strict(evaluate); target(evaluate);
  evaluate->add_option("--strategy", o.strategy, "Strategy file")->required();

  CLI::App* table1 = app.add_subcommand("bdm-table1", "Check the bundled drive model against its verdict table");
  table1->add_option("--model", o.model, "Override the bundled verification model");
  table1->add_option("--queries", o.queries, "Override the bundled queries");
  table1->add_option("-o,--output", o.output, "Report file (default table1_report.json)");
  seed(table1); cap(table1); json_flag(table1); strict(table1); threads(table1);

  CLI::App* sff = app.add_subcommand("bdm-sff", "Baseline, learning and evaluation of the detection ratio");
  sff->add_option("--model", o.model, "Override the bundled learning model");
  sff->add_option("--queries", o.queries, "Override the bundled queries");
  sff->add_option("--out-dir", o.out_dir, "Directory for reports");
  sff->add_option("--episodes", o.episodes, "Training episodes")->check(CLI::PositiveNumber);
  sff->add_option("--baseline-seeds", o.baseline_seeds, "Unguided seeds")->check(CLI::PositiveNumber);
  seed(sff); runs(sff); horizon(sff); json_flag(sff); strict(sff); threads(sff); target(sff);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    if (e.get_exit_code() != 0) err << app.help();
    return kExitUsage;
  }

  Runner r(o, out, err);
  try {
    if (*check) return r.check();
    if (*simulate) return r.simulate();
    if (*estimate) return r.estimate_queries(false);
    if (*learn) return r.learn();
    if (*evaluate) return r.estimate_queries(true);
    if (*table1) return r.bdm_table1();
    if (*sff) return r.bdm_sff();
  } catch (const Exit& e) {
    return e.code;
  } catch (const CompileError& e) {
    err << format_diagnostic(e.diagnostic(), o.model) << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitUsage;
}

}  // namespace tachyon
