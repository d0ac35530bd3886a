#include <doctest.h>

#include <cmath>

#include "tachyon/bdm.hpp"
#include "tachyon/sim.hpp"

using namespace tachyon;

namespace {

TANetwork compile(const std::string& text) {
  auto p = parse_model(text);
  INFO(text);
  REQUIRE(p.ok());
  return std::move(*p.value);
}

SimConfig config(double horizon, uint64_t seed = 1) {
  SimConfig c;
  c.horizon = horizon;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("urgent and committed locations forbid delay") {
  TANetwork n = compile(R"(
clock x;
template A() { init urgent location U; location L; edge U -> L; }
template B() { init committed location C; location L; edge C -> L; }
system A;
)");
  Simulator sim(n, config(100));
  Rng rng(3);
  for (int k = 0; k < 20; ++k) CHECK(sim.sample_delay(sim.initial(), rng) == 0.0);

  Trace t = sim.run(rng);
  CHECK(t.reason == StopReason::Horizon);
  CHECK(t.final_state.locations == std::vector<int>{1});
}

TEST_CASE("delays respect the active invariant") {
  TANetwork n = compile(R"(
clock x;
template A() {
  init location L { invariant x <= 7; }
  location M;
  edge L -> M { guard x >= 2; }
}
system A;
)");
  Simulator sim(n, config(100));
  CHECK(sim.max_delay(sim.initial()) == doctest::Approx(7.0));
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    double d = sim.sample_delay(sim.initial(), rng);
    CHECK(d >= 0.0);
    CHECK(d <= 7.0);
  }
  for (uint64_t seed = 0; seed < 50; ++seed) {
    Rng r = Rng::for_run(seed, 0);
    ConcreteState s = sim.initial();
    REQUIRE(sim.step(s, r, nullptr) == Simulator::Step::Fired);
    CHECK(s.time >= 2.0 - 1e-9);
    CHECK(s.time <= 7.0 + 1e-9);
  }
}

TEST_CASE("unbounded delays are exponential in the summed exit weights") {
  TANetwork n = compile(R"(
template A() { init location L { exit_weight 3; } }
template B() { init location L; }
system A, B;
)");
  SimConfig cfg = config(1e9);
  cfg.default_rate = 1e-3;
  Simulator sim(n, cfg);
  Rng rng(11);
  const int samples = 40000;
  double sum = 0.0;
  for (int k = 0; k < samples; ++k) sum += sim.sample_delay(sim.initial(), rng);
  // Rate 4e-3 per ms gives a mean of 250 ms; the standard error is about 1.25.
  CHECK(sum / samples == doctest::Approx(250.0).epsilon(0.02));
}

TEST_CASE("a guard window forces the switching delay") {
  TANetwork n = compile(R"(
clock x;
template Sw() {
  init location Open { invariant x <= 5; }
  location Closed;
  edge Open -> Closed { guard x >= 5; }
}
system Sw;
)");
  SimConfig cfg = config(100);
  cfg.record = true;
  Simulator sim(n, cfg);
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng = Rng::for_run(seed, 0);
    Trace t = sim.run(rng);
    REQUIRE(t.events.size() >= 2);
    CHECK(t.events[1].kind == "fire");
    CHECK(t.events[1].time == doctest::Approx(5.0));
    CHECK(t.final_state.locations == std::vector<int>{1});
  }
}

TEST_CASE("committed chains run before other components") {
  TANetwork n = compile(R"(
var v: int = 0;
template A() {
  init committed location C1;
  committed location C2;
  location D;
  edge C1 -> C2 { update v := v * 10 + 1; }
  edge C2 -> D { update v := v * 10 + 2; }
}
template B() { init location E; location F; edge E -> F { update v := v * 10 + 3; } }
system A, B;
)");
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    Simulator sim(n, config(1e7, seed));
    Rng rng = Rng::for_run(seed, 0);
    Trace t = sim.run(rng);
    CHECK(t.final_state.env.slots == std::vector<int64_t>{123});
  }
}

TEST_CASE("runs are reproducible from the seed") {
  TANetwork n = bdm::build_bdm_model(bdm::Variant::Learning);
  SimConfig cfg = config(200.0 * 60000);
  cfg.record = true;
  Simulator sim(n, cfg);
  Rng a = Rng::for_run(9, 4);
  Rng b = Rng::for_run(9, 4);
  Trace ta = sim.run(a);
  Trace tb = sim.run(b);
  CHECK(ta.steps == tb.steps);
  CHECK(ta.final_state.env.slots == tb.final_state.env.slots);
  CHECK(trace_jsonl(ta) == trace_jsonl(tb));

  Rng c = Rng::for_run(10, 4);
  CHECK(trace_jsonl(sim.run(c)) != trace_jsonl(ta));
}

TEST_CASE("a zero horizon yields the initial snapshot") {
  TANetwork n = bdm::build_bdm_model(bdm::Variant::Learning);
  SimConfig cfg = config(0.0);
  cfg.record = true;
  Simulator sim(n, cfg);
  Rng rng(1);
  Trace t = sim.run(rng);
  REQUIRE(t.events.size() == 1);
  CHECK(t.events[0].kind == "init");
  CHECK(t.steps == 0);
  CHECK(t.final_state.env.slots == sim.initial().env.slots);
}

TEST_CASE("branchpoint alternatives carry their weights") {
  TANetwork n = compile(R"(
var v: int = 0;
template A() {
  init branchpoint B;
  location L; location M;
  edge B -> L { weight 1; update v := 1; }
  edge B -> M { weight 1; update v := 2; }
}
system A;
)");
  Simulator sim(n, config(10));
  EnabledActions acts = sim.enabled_actions(sim.initial());
  CHECK(acts.controllable.empty());
  CHECK(acts.uncontrollable.size() == 2);
  CHECK(acts.uncontrollable_weights == std::vector<int64_t>{1, 1});

  int ones = 0;
  for (uint64_t r = 0; r < 2000; ++r) {
    Rng rng = Rng::for_run(2, r);
    ones += sim.run(rng).final_state.env.slots[0] == 1;
  }
  CHECK(ones > 900);
  CHECK(ones < 1100);
}

TEST_CASE("estimates summarize per-run maxima") {
  auto single = summarize({4.0});
  CHECK(single.degenerate_ci);
  CHECK(single.mean == 4.0);
  CHECK(single.ci95 == 0.0);

  auto pair = summarize({1.0, 3.0});
  CHECK_FALSE(pair.degenerate_ci);
  CHECK(pair.mean == 2.0);
  CHECK(pair.ci95 == doctest::Approx(1.96 * std::sqrt(2.0) / std::sqrt(2.0)));

  TANetwork n = compile(R"(
var v: int = 0;
template A() { init location L; location M; edge L -> M { update v := 7; } }
system A;
)");
  auto q = parse_query("E[time<=1000; 5] (max: v)");
  REQUIRE(q.ok());
  resolve_query(*q, n);
  SimConfig cfg = config(1e9);
  cfg.runs = 5;
  cfg.threads = 2;
  auto st = estimate(n, q->value, cfg);
  CHECK(st.values == std::vector<double>{7, 7, 7, 7, 7});
  CHECK(st.deadlocks == 0);
}

TEST_CASE("the verification model offers both diagnosis outcomes") {
  TANetwork n = bdm::build_bdm_model(bdm::Variant::Verification);
  const int db = *n.find_instance("DiagnosticBlock");
  const Instance& inst = n.instances[static_cast<std::size_t>(db)];
  int decide = -1;
  for (std::size_t l = 0; l < inst.locations.size(); ++l)
    if (inst.locations[l].name == "Decide") decide = static_cast<int>(l);
  REQUIRE(decide >= 0);

  Simulator sim(n, config(1e9));
  Rng rng(17);
  ConcreteState s = sim.initial();
  int steps = 0;
  while (s.locations[static_cast<std::size_t>(db)] != decide && steps < 100000) {
    REQUIRE(sim.step(s, rng, nullptr) == Simulator::Step::Fired);
    ++steps;
  }
  REQUIRE(s.locations[static_cast<std::size_t>(db)] == decide);
  EnabledActions acts = sim.enabled_actions(s);
  CHECK(acts.controllable.empty());
  REQUIRE(acts.uncontrollable.size() == 2);
  CHECK(acts.uncontrollable[0].find("{i=0}") != std::string::npos);
  CHECK(acts.uncontrollable[1].find("{i=1}") != std::string::npos);
}
