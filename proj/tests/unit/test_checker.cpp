#include <doctest.h>

#include "random_models.hpp"
#include "tachyon/bdm.hpp"
#include "tachyon/checker.hpp"

using namespace tachyon;

namespace {

TANetwork compile(const std::string& text) {
  auto p = parse_model(text);
  INFO(text);
  REQUIRE(p.ok());
  return std::move(*p.value);
}

Verdict check(const TANetwork& n, const std::string& line, CheckOptions opts = {}) {
  auto q = parse_query(line);
  INFO(line);
  REQUIRE(q.ok());
  return check_query(n, *q, opts);
}

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

TEST_CASE("reachability with witness") {
  TANetwork n = compile(kLight);
  Verdict v = check(n, "E<> Lamp.Bright and presses == 2");
  CHECK(v.outcome == Outcome::Satisfied);
  REQUIRE(v.witness.size() >= 2);
  CHECK(v.actions.size() + 1 == v.witness.size());
  CHECK(v.witness.front().locations == std::vector<int>{0});

  CHECK(check(n, "E<> true").satisfied());
  CHECK(check(n, "E<> true").witness.size() == 1);
  CHECK(check(n, "E<> Lamp.Low and x > 5").outcome == Outcome::Violated);
  CHECK(check(n, "E<> Lamp.Bright and x < 2").outcome == Outcome::Violated);
  CHECK(check(n, "E<> Lamp.Bright and x < 3").outcome == Outcome::Satisfied);
  CHECK(check(n, "E<> presses == 4").outcome == Outcome::Violated);
}

TEST_CASE("invariants") {
  TANetwork n = compile(kLight);
  CHECK(check(n, "A[] true").satisfied());
  CHECK(check(n, "A[] presses <= 3").satisfied());
  CHECK(check(n, "A[] Lamp.Low imply x <= 5").satisfied());
  Verdict v = check(n, "A[] not Lamp.Bright");
  CHECK(v.outcome == Outcome::Violated);
  CHECK_FALSE(v.witness.empty());
}

TEST_CASE("leads-to") {
  TANetwork n = compile(kLight);
  // Low always leaves within 5 time units, via Bright or Off.
  CHECK(check(n, "Lamp.Low --> Lamp.Off or Lamp.Bright").satisfied());
  // After the third press Bright is terminal.
  CHECK(check(n, "Lamp.Bright --> Lamp.Off").outcome == Outcome::Violated);
  // Off can idle forever.
  CHECK(check(n, "Lamp.Off --> Lamp.Low").outcome == Outcome::Violated);
  // Vacuous premise.
  CHECK(check(n, "presses == 9 --> false").satisfied());
  CHECK(check(n, "Lamp.Low --> Lamp.Off or Lamp.Bright").zeno_warning);
}

TEST_CASE("state cap is reported as bound exceeded") {
  TANetwork n = compile(kLight);
  CheckOptions opts;
  opts.cap_states = 2;
  CHECK(check(n, "E<> presses == 4", opts).outcome == Outcome::BoundExceeded);
}

TEST_CASE("engine routing") {
  TANetwork n = bdm::build_bdm_model(bdm::Variant::Learning);
  auto q = parse_query("strategy S = minE(F)[<=10000*MIN]{} -> {SFF}: <> t == 10000*MIN");
  REQUIRE(q.ok());
  Verdict v = check_query(n, *q);
  CHECK(v.outcome == Outcome::Error);
  CHECK(v.message == "query requires learning engine");

  q = parse_query("E[time<=10000*MIN; 1](max: detected)");
  REQUIRE(q.ok());
  CHECK(check_query(n, *q).message == "query requires simulation engine");

  CHECK(run_query_file(n, {}).empty());
}

TEST_CASE("duality of reachability and invariance on random models") {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 30; ++k) {
    testing::GenNetwork g = testing::random_network(rng);
    TANetwork n = compile(testing::to_text(g));
    const std::string phi = testing::random_predicate(rng, g);
    INFO(testing::to_text(g), phi);
    const bool reach = check(n, "E<> " + phi).satisfied();
    const bool inv = check(n, "A[] not (" + phi + ")").satisfied();
    CHECK(reach == !inv);
  }
}

TEST_CASE("drive model verdicts for selected rows") {
  TANetwork n = bdm::build_bdm_model(bdm::Variant::Verification);
  auto qs = parse_queries(bdm::table1_text());
  REQUIRE(qs.ok());
  REQUIRE(qs->size() == 12);
  SUBCASE("row 1") { CHECK(check_query(n, (*qs)[0]).outcome == Outcome::Satisfied); }
  SUBCASE("row 6") { CHECK(check_query(n, (*qs)[5]).outcome == Outcome::Violated); }
  SUBCASE("row 11") { CHECK(check_query(n, (*qs)[10]).outcome == Outcome::Satisfied); }
}
