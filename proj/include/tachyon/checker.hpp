#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tachyon/parser.hpp"
#include "tachyon/zone_graph.hpp"

namespace tachyon {

enum class Outcome { Satisfied, Violated, BoundExceeded, Error };

std::string_view to_string(Outcome o);

struct CheckStats {
  uint64_t states = 0;          // symbolic states stored
  uint64_t peak_frontier = 0;
  double millis = 0.0;
};

struct Verdict {
  Outcome outcome = Outcome::Error;
  std::string query;
  std::string message;
  /// Trace from the initial state: states[k+1] is a successor of states[k]
  /// via actions[k]. Present for satisfied E<>, violated A[] and violated
  /// leads-to.
  std::vector<SymState> witness;
  std::vector<std::string> actions;
  CheckStats stats;
  bool zeno_warning = false;

  bool satisfied() const { return outcome == Outcome::Satisfied; }
  bool decided() const { return outcome == Outcome::Satisfied || outcome == Outcome::Violated; }
};

enum class SearchOrder { BreadthFirst, DepthFirst };

/// Exploration cap, overridable through TACHYON_CAP_STATES.
uint64_t default_state_cap();

struct CheckOptions {
  uint64_t cap_states = default_state_cap();
  SearchOrder order = SearchOrder::BreadthFirst;
  bool slicing = true;
  bool witness = true;
};

/// Zones of `s` (each a subset of s.zone) on which `phi` holds, or fails when
/// `negated`. Data parts are evaluated on the state's valuation.
std::vector<Dbm> sat(const Expr& phi, const SymState& s, bool negated = false);

Verdict check_reachability(const TANetwork& n, const Expr& phi, const CheckOptions& opts = {});
Verdict check_invariant(const TANetwork& n, const Expr& phi, const CheckOptions& opts = {});
/// Assumes time-divergent runs; `zeno_warning` is always set.
Verdict check_leadsto(const TANetwork& n, const Expr& p, const Expr& q, const CheckOptions& opts = {});

/// Resolves and dispatches a verification query. Strategy and estimation
/// queries yield an Error verdict naming the engine they need.
Verdict check_query(const TANetwork& n, Query q, const CheckOptions& opts = {});
std::vector<Verdict> run_query_file(const TANetwork& n, const std::vector<Query>& qs, const CheckOptions& opts = {});

}  // namespace tachyon
