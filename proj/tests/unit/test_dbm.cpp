#include <doctest.h>

#include "dbm_oracle.hpp"
#include "tachyon/dbm.hpp"

using namespace tachyon;

namespace {

// Clocks: 1 = x, 2 = y.
Dbm zone(std::initializer_list<Constraint> cs, int dim = 3) {
  Dbm d = Dbm::universe(dim);
  for (const auto& c : cs) d.set(c.i, c.j, std::min(d.at(c.i, c.j), c.bound));
  d.canonicalize();
  return d;
}

}  // namespace

TEST_CASE("bound encoding orders like the bounds") {
  CHECK(bound_lt(3) < bound_le(3));
  CHECK(bound_le(2) < bound_lt(3));
  CHECK(bound_add(bound_le(2), bound_lt(3)) == bound_lt(5));
  CHECK(bound_add(bound_le(2), bound_le(3)) == bound_le(5));
  CHECK(bound_add(kInfinity, bound_le(3)) == kInfinity);
  CHECK(bound_negate(bound_lt(3)) == bound_le(-3));
  CHECK(bound_negate(bound_le(3)) == bound_lt(-3));
}

TEST_CASE("canonicalize derives implied bounds") {
  Dbm d = zone({{1, 0, bound_le(3)}, {2, 1, bound_le(2)}});
  CHECK(d.at(2, 0) == bound_le(5));
  CHECK(dbm_canonicalize(d) == d);

  Dbm bad = zone({{1, 0, bound_le(1)}, {0, 1, bound_le(-2)}});
  CHECK(bad.empty());
}

TEST_CASE("diagonal entries are zero non-strict") {
  Dbm d = zone({{1, 2, bound_lt(1)}});
  for (int i = 0; i < d.dim(); ++i) CHECK(d.at(i, i) == kLeZero);
}

TEST_CASE("up releases upper bounds") {
  Dbm origin(3);
  Dbm u = dbm_up(origin);
  CHECK(u.at(1, 0) == kInfinity);
  CHECK(u.at(1, 2) == kLeZero);
  CHECK(u.at(2, 1) == kLeZero);

  Dbm box = zone({{1, 0, bound_le(2)}, {0, 1, bound_le(-1)}, {2, 0, bound_le(2)}, {0, 2, bound_le(-1)},
                  {1, 2, bound_le(0)}, {2, 1, bound_le(0)}});
  Dbm ub = dbm_up(box);
  CHECK(ub.at(0, 1) == bound_le(-1));
  CHECK(ub.at(1, 0) == kInfinity);
  CHECK(ub.at(1, 2) == kLeZero);

  Dbm empty = zone({{1, 0, bound_lt(0)}});
  CHECK(empty.empty());
  CHECK(dbm_up(empty).empty());
}

TEST_CASE("constrain intersects") {
  Dbm diag = dbm_up(Dbm(3));
  Dbm c = dbm_constrain(diag, {1, 0, bound_le(3)});
  CHECK(c.at(1, 0) == bound_le(3));
  CHECK(c.at(2, 0) == bound_le(3));
  CHECK(c.at(1, 2) == kLeZero);

  CHECK(dbm_constrain(diag, {0, 1, kLeZero}) == diag);

  Dbm small = zone({{1, 0, bound_le(1)}});
  CHECK(dbm_constrain(small, {0, 1, bound_lt(-10)}).empty());
}

TEST_CASE("reset pins a clock and keeps the others") {
  Dbm d = dbm_constrain(dbm_up(Dbm(3)), {1, 0, bound_le(5)});
  Dbm r = dbm_reset(d, 1, 0);
  CHECK(r.at(1, 0) == kLeZero);
  CHECK(r.at(0, 1) == kLeZero);
  CHECK(r.at(2, 0) == bound_le(5));
  CHECK(r.at(2, 1) == bound_le(5));

  Dbm pinned = dbm_reset(Dbm(3), 1, 0);
  CHECK(pinned == Dbm(3));

  Dbm three = dbm_reset(Dbm(3), 1, 3);
  CHECK(three.at(1, 0) == bound_le(3));
  CHECK(three.at(0, 1) == bound_le(-3));
  CHECK(three.at(2, 0) == kLeZero);
}

TEST_CASE("relation between zones") {
  Dbm a = zone({{1, 0, bound_le(1)}}, 2);
  Dbm b = zone({{1, 0, bound_le(2)}}, 2);
  CHECK(dbm_relation(a, b) == Relation::Subset);
  CHECK(dbm_relation(b, a) == Relation::Superset);
  CHECK(dbm_relation(a, a) == Relation::Equal);
  Dbm c = zone({{1, 0, bound_le(3)}, {0, 1, bound_le(-2)}}, 2);
  CHECK(dbm_relation(a, c) == Relation::Incomparable);
}

TEST_CASE("extrapolation widens beyond the max constant") {
  Dbm d = zone({{1, 0, bound_le(7)}}, 2);
  std::vector<int64_t> k = {0, 5};
  Dbm e = dbm_extrapolate(d, k);
  CHECK(e.at(1, 0) == kInfinity);

  Dbm small = zone({{1, 0, bound_le(4)}, {0, 1, bound_le(-1)}}, 2);
  CHECK(dbm_extrapolate(small, k) == small);
}

TEST_CASE("integer membership") {
  Dbm d = zone({{1, 0, bound_lt(3)}, {2, 1, bound_le(0)}});
  std::vector<int64_t> in = {2, 1};
  std::vector<int64_t> edge = {3, 0};
  std::vector<int64_t> out = {1, 2};
  CHECK(d.contains(std::span<const int64_t>(in)));
  CHECK_FALSE(d.contains(std::span<const int64_t>(edge)));
  CHECK_FALSE(d.contains(std::span<const int64_t>(out)));
}

TEST_CASE("random zone properties hold") {
  auto r = testing::run_dbm_properties(42, 500);
  INFO(r.first_failure);
  CHECK(r.cases == 500);
  CHECK(r.failures() == 0);
}
