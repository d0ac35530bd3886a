#include <doctest.h>

#include "learning_oracles.hpp"
#include "tachyon/bdm.hpp"
#include "tachyon/learner.hpp"

using namespace tachyon;

namespace {

TANetwork compile(const std::string& text) {
  auto p = parse_model(text);
  INFO(text);
  REQUIRE(p.ok());
  return std::move(*p.value);
}

Query strategy_query(const TANetwork& n, const std::string& line) {
  auto q = parse_query(line);
  INFO(line);
  REQUIRE(q.ok());
  resolve_query(*q, n);
  return *q;
}

LearnConfig toy_config(uint64_t seed) {
  LearnConfig c;
  c.episodes = 400;
  c.alpha = 0.2;
  c.gamma = 1.0;
  c.discount_time = 0.0;
  c.seed = seed;
  return c;
}

// Plays the strategy once and returns the final cost.
int64_t play(const TANetwork& n, const Strategy& s, StrategyChooser& chooser) {
  SimConfig cfg;
  cfg.horizon = 10;
  Simulator sim(n, cfg);
  Rng rng(1);
  Trace t = sim.run(rng, &chooser);
  return t.final_state.env.slots.at(static_cast<std::size_t>(*n.find_slot(s.cost)));
}

}  // namespace

TEST_CASE("q update arithmetic") {
  QTable t;
  t.update("s", "a", 1.0, 0.0, 0.5, 1.0);
  CHECK(t.get("s", "a") == 0.5);
  t.update("s", "a", 1.0, 0.0, 0.0, 1.0);
  CHECK(t.get("s", "a") == 0.5);
  CHECK(t.get("s", "unseen") == 0.0);
  CHECK(t.best("s", {"a", "unseen"}) == 0.5);
  CHECK(t.best("s", {}) == 0.0);
  CHECK(t.rows().at("s").at("a").visits == 2);
}

TEST_CASE("q learning reaches the value iteration fixpoint on a chain") {
  auto r = testing::run_chain_mdp(3, 100000);
  CHECK(r.oracle[1][0] == doctest::Approx(1.0));
  CHECK(r.oracle[0][0] == doctest::Approx(0.9));
  CHECK(r.oracle[0][1] == doctest::Approx(0.81));
  CHECK(r.max_error <= 1e-2);
}

TEST_CASE("binning") {
  CHECK(bin_of(48.5, 1.0) == 48);
  CHECK(bin_of(90.9, 1.0) == 90);
  CHECK(bin_of(-0.5, 1.0) == -1);
  CHECK(bin_of(95.0, 10.0) == 9);
}

TEST_CASE("unobserved variables do not affect the key") {
  TANetwork n = compile(testing::toy_game_model({{{1, 2}, {3, 4}}}));
  Query q = strategy_query(n, testing::toy_game_query());
  Discretization d = discretization_for(n, q);
  CHECK(d.discrete == std::vector<std::string>{"a"});
  StateKeyer keyer(n, d);
  ConcreteState s = initial_concrete_state(n);
  ConcreteState other = s;
  other.env.slots[static_cast<std::size_t>(*n.find_slot("b"))] = 1;
  CHECK(keyer.key(s) == keyer.key(other));
  other.env.slots[static_cast<std::size_t>(*n.find_slot("a"))] = 1;
  CHECK(keyer.key(s) != keyer.key(other));

  auto bad = parse_query("strategy S = minE(F)[<=10]{nosuch} -> {}: <> done == 1");
  REQUIRE(bad.ok());
  CHECK_THROWS_AS(discretization_for(n, *bad), CompileError);
}

TEST_CASE("the toy game is solved to its enumerated optimum") {
  // Choosing a = 1 looks better when b is uniform, but a = 0, b = 0 is optimal.
  const testing::GameCosts cost = {{{1, 9}, {3, 4}}};
  const auto best = testing::enumerate_toy_game(cost);
  CHECK(best.a == 0);
  CHECK(best.cost == 1);

  TANetwork n = compile(testing::toy_game_model(cost));
  Query q = strategy_query(n, testing::toy_game_query());
  for (uint64_t seed = 1; seed <= 3; ++seed) {
    Strategy s = learn_strategy(n, q, toy_config(seed));
    CHECK(s.curve.size() == 400);
    StrategyChooser chooser(n, s);
    CHECK(play(n, s, chooser) == best.cost);
    CHECK(chooser.fallbacks() == 0);
    CHECK(chooser.decisions() == 2);
    for (const auto& [key, e] : s.entries) CHECK(e.permitted.size() == 1);
  }
}

TEST_CASE("scaling costs leaves the policy unchanged") {
  const testing::GameCosts cost = {{{2, 6}, {5, 3}}};
  testing::GameCosts scaled = cost;
  for (auto& row : scaled)
    for (auto& c : row) c *= 3;
  TANetwork a = compile(testing::toy_game_model(cost));
  TANetwork b = compile(testing::toy_game_model(scaled));
  Strategy sa = learn_strategy(a, strategy_query(a, testing::toy_game_query()), toy_config(5));
  Strategy sb = learn_strategy(b, strategy_query(b, testing::toy_game_query()), toy_config(5));
  REQUIRE(sa.entries.size() == sb.entries.size());
  for (const auto& [key, e] : sa.entries) {
    REQUIRE(sb.entries.count(key) == 1);
    CHECK(e.permitted == sb.entries.at(key).permitted);
  }
}

TEST_CASE("learning is deterministic for a seed") {
  TANetwork n = compile(testing::toy_game_model({{{1, 9}, {3, 4}}}));
  Query q = strategy_query(n, testing::toy_game_query());
  CHECK(export_strategy(learn_strategy(n, q, toy_config(8))) == export_strategy(learn_strategy(n, q, toy_config(8))));
}

TEST_CASE("a zero cost self loop is permitted") {
  TANetwork n = compile(R"(
clock x;
var F: int = 0;
template A() {
  init location L { invariant x <= 1; }
  edge L -> L { guard x >= 1; update x := 0; controllable; }
}
system A;
)");
  Query q = strategy_query(n, "strategy S = minE(F)[<=10]{} -> {}: <> F == 0");
  LearnConfig cfg = toy_config(1);
  cfg.episodes = 5;
  Strategy s = learn_strategy(n, q, cfg);
  REQUIRE(s.entries.size() == 1);
  const auto& e = s.entries.begin()->second;
  CHECK(e.permitted == e.actions);
  CHECK(e.actions.size() == 1);
}

TEST_CASE("models without decisions are rejected") {
  TANetwork n = compile("var F: int = 0;\ntemplate A() { init location L; }\nsystem A;");
  Query q = strategy_query(n, "strategy S = minE(F)[<=10]{} -> {}: <> F == 0");
  CHECK_THROWS_WITH_AS(learn_strategy(n, q, {}), "model has no decision points", CompileError);
}

TEST_CASE("strategy decisions intersect with the enabled actions") {
  Strategy s;
  Strategy::Entry e;
  e.actions = {"detect", "miss"};
  e.q = {-1.0, -5.0};
  e.visits = {10, 10};
  e.permitted = {"detect"};
  s.entries["k"] = e;
  CHECK(strategy_decide(s, "k", {"detect", "miss"}) == std::vector<std::string>{"detect"});
  CHECK(strategy_decide(s, "k", {"miss"}).empty());
  CHECK(strategy_decide(s, "unknown", {"detect", "miss"}).empty());

  QTable t;
  t.update("k", "x", 1.0, 0.0, 1.0, 1.0);
  t.update("k", "y", 1.0, 0.0, 1.0, 1.0);
  t.update("k", "z", 0.5, 0.0, 1.0, 1.0);
  Strategy ex = extract_strategy(t);
  CHECK(ex.entries.at("k").permitted == std::vector<std::string>{"x", "y"});
  CHECK(ex.entries.at("k").actions == std::vector<std::string>{"x", "y", "z"});
}

TEST_CASE("unknown states fall back to a uniform choice") {
  TANetwork n = compile(testing::toy_game_model({{{1, 9}, {3, 4}}}));
  Strategy empty;
  empty.cost = "F";
  empty.scheme.discrete = {"a"};
  StrategyChooser chooser(n, empty);
  play(n, empty, chooser);
  CHECK(chooser.decisions() == 2);
  CHECK(chooser.fallbacks() == 2);
}

TEST_CASE("strategy files round-trip") {
  TANetwork n = compile(testing::toy_game_model({{{1, 9}, {3, 4}}}));
  Query q = strategy_query(n, testing::toy_game_query());
  Strategy s = learn_strategy(n, q, toy_config(2));
  const std::string text = export_strategy(s);
  Strategy back = import_strategy(text, model_hash(n));
  CHECK(export_strategy(back) == text);
  CHECK(back.model_hash == s.model_hash);
  CHECK(back.scheme == s.scheme);
  CHECK(back.curve == s.curve);
  CHECK(back.entries.size() == s.entries.size());

  TANetwork other = bdm::build_bdm_model(bdm::Variant::Learning);
  CHECK(model_hash(other) != model_hash(n));
  CHECK_THROWS_WITH_AS(import_strategy(text, model_hash(other)), doctest::Contains("model hash mismatch"),
                       std::runtime_error);
  CHECK_THROWS_AS(import_strategy("{", 0), std::runtime_error);

  Strategy none;
  Strategy none_back = import_strategy(export_strategy(none));
  CHECK(none_back.entries.empty());
}
