#include "tachyon/checker.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <functional>
#include <unordered_map>

namespace tachyon {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Satisfied: return "satisfied";
    case Outcome::Violated: return "violated";
    case Outcome::BoundExceeded: return "bound exceeded";
    case Outcome::Error: return "error";
  }
  return "?";
}

uint64_t default_state_cap() {
  if (const char* v = std::getenv("TACHYON_CAP_STATES")) {
    char* end = nullptr;
    unsigned long long n = std::strtoull(v, &end, 10);
    if (end && *end == '\0' && n > 0) return n;
  }
  return 5'000'000;
}

// ---------------------------------------------------------------------------
// Predicate satisfaction over zones

namespace {

void sat_rec(const Expr& e, const SymState& s, const Dbm& zone, bool neg, std::vector<Dbm>& out) {
  if (zone.empty()) return;
  if (!mentions_clock(e)) {
    EvalContext ctx{s.env.slots, {}, s.locations, {}};
    if (eval_bool(e, ctx) != neg) out.push_back(zone);
    return;
  }
  if (e.clock_atom) {
    for (const auto& alt : atom_constraints(decompose_atom(e), neg)) {
      Dbm z = zone;
      bool ok = true;
      for (const auto& c : alt)
        if (!z.constrain(c)) {
          ok = false;
          break;
        }
      if (ok) out.push_back(std::move(z));
    }
    return;
  }
  if (e.kind == Expr::Kind::Unary && e.uop == UnaryOp::Not) {
    sat_rec(e.args[0], s, zone, !neg, out);
    return;
  }
  if (e.kind != Expr::Kind::Binary) throw EvalError("unsupported clock predicate");
  auto conj = [&](const Expr& l, bool nl, const Expr& r, bool nr) {
    std::vector<Dbm> left;
    sat_rec(l, s, zone, nl, left);
    for (const auto& z : left) sat_rec(r, s, z, nr, out);
  };
  auto disj = [&](const Expr& l, bool nl, const Expr& r, bool nr) {
    sat_rec(l, s, zone, nl, out);
    sat_rec(r, s, zone, nr, out);
  };
  switch (e.bop) {
    case BinaryOp::And:
      if (neg) disj(e.args[0], true, e.args[1], true);
      else conj(e.args[0], false, e.args[1], false);
      return;
    case BinaryOp::Or:
      if (neg) conj(e.args[0], true, e.args[1], true);
      else disj(e.args[0], false, e.args[1], false);
      return;
    case BinaryOp::Imply:
      if (neg) conj(e.args[0], false, e.args[1], true);
      else disj(e.args[0], true, e.args[1], false);
      return;
    default: throw EvalError("unsupported clock predicate");
  }
}

}  // namespace

std::vector<Dbm> sat(const Expr& phi, const SymState& s, bool negated) {
  std::vector<Dbm> out;
  sat_rec(phi, s, s.zone, negated, out);
  return out;
}

// ---------------------------------------------------------------------------
// Passed/waiting store with zone inclusion

namespace {

using Key = std::vector<int64_t>;

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    uint64_t h = 1469598103934665603ull;
    for (int64_t v : k) h = (h ^ static_cast<uint64_t>(v)) * 1099511628211ull;
    return static_cast<std::size_t>(h);
  }
};

Key key_of(const SymState& s) {
  Key k;
  k.reserve(s.locations.size() + s.env.slots.size());
  for (int l : s.locations) k.push_back(l);
  k.insert(k.end(), s.env.slots.begin(), s.env.slots.end());
  return k;
}

class Store {
 public:
  /// Returns the new index, or -1 when an existing zone already covers `s`.
  int add(SymState s, int parent) {
    auto& bucket = index_[key_of(s)];
    for (int i : bucket)
      if (states[static_cast<std::size_t>(i)].zone.includes(s.zone)) return -1;
    std::size_t w = 0;
    for (int i : bucket) {
      if (s.zone.includes(states[static_cast<std::size_t>(i)].zone)) covered[static_cast<std::size_t>(i)] = 1;
      else bucket[w++] = i;
    }
    bucket.resize(w);
    int id = static_cast<int>(states.size());
    bucket.push_back(id);
    states.push_back(std::move(s));
    parents.push_back(parent);
    covered.push_back(0);
    return id;
  }

  std::vector<SymState> states;
  std::vector<int> parents;
  std::vector<char> covered;

 private:
  std::unordered_map<Key, std::vector<int>, KeyHash> index_;
};

/// Zones keyed by discrete part, with inclusion lookup.
class ZoneSet {
 public:
  bool covers(const Key& k, const Dbm& z) const {
    auto it = map_.find(k);
    if (it == map_.end()) return false;
    for (const auto& d : it->second)
      if (d.includes(z)) return true;
    return false;
  }
  void insert(const Key& k, const Dbm& z) { map_[k].push_back(z); }
  void erase_last(const Key& k) {
    auto it = map_.find(k);
    if (it == map_.end()) return;
    it->second.pop_back();
    if (it->second.empty()) map_.erase(it);
  }

 private:
  std::unordered_map<Key, std::vector<Dbm>, KeyHash> map_;
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
};

enum class Explore { Exhausted, Stopped, Capped };

/// Explores the zone graph; `visit` is called on each newly stored state and
/// stops the search by returning true.
Explore explore(ZoneGraph& g, Store& store, const CheckOptions& opts, CheckStats& stats,
                const std::function<bool(int)>& visit) {
  SymState init = g.initial();
  if (init.zone.empty()) return Explore::Exhausted;
  int root = store.add(std::move(init), -1);
  if (visit(root)) return Explore::Stopped;
  std::deque<int> waiting{root};
  std::vector<SymState> succ;
  while (!waiting.empty()) {
    stats.peak_frontier = std::max<uint64_t>(stats.peak_frontier, waiting.size());
    int cur;
    if (opts.order == SearchOrder::BreadthFirst) {
      cur = waiting.front();
      waiting.pop_front();
    } else {
      cur = waiting.back();
      waiting.pop_back();
    }
    if (store.covered[static_cast<std::size_t>(cur)]) continue;
    succ.clear();
    g.successors(store.states[static_cast<std::size_t>(cur)], succ);
    for (auto& s : succ) {
      int id = store.add(std::move(s), cur);
      if (id < 0) continue;
      stats.states = store.states.size();
      if (store.states.size() > opts.cap_states) return Explore::Capped;
      if (visit(id)) return Explore::Stopped;
      waiting.push_back(id);
    }
  }
  stats.states = store.states.size();
  return Explore::Exhausted;
}

void build_witness(ZoneGraph& g, const std::vector<SymState>& path, Verdict& v) {
  v.witness = path;
  v.actions.clear();
  std::vector<SymState> succ;
  std::vector<std::string> labels;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    succ.clear();
    labels.clear();
    g.successors(path[k], succ, &labels);
    std::string label = "?";
    for (std::size_t i = 0; i < succ.size(); ++i) {
      if (succ[i].locations == path[k + 1].locations && succ[i].env == path[k + 1].env &&
          succ[i].zone.includes(path[k + 1].zone)) {
        label = labels[i];
        break;
      }
    }
    v.actions.push_back(label);
  }
}

std::vector<SymState> path_to(const Store& store, int id) {
  std::vector<SymState> path;
  for (int i = id; i >= 0; i = store.parents[static_cast<std::size_t>(i)]) path.push_back(store.states[static_cast<std::size_t>(i)]);
  std::reverse(path.begin(), path.end());
  return path;
}

Verdict search(const TANetwork& n, const Expr& phi, bool negated, const CheckOptions& opts) {
  Verdict v;
  Timer timer;
  ZoneGraph g(n, {opts.slicing, {&phi}});
  Store store;
  int found = -1;
  try {
    Explore r = explore(g, store, opts, v.stats, [&](int id) {
      if (sat(phi, store.states[static_cast<std::size_t>(id)], negated).empty()) return false;
      found = id;
      return true;
    });
    if (r == Explore::Capped) {
      v.outcome = Outcome::BoundExceeded;
      v.message = "exploration cap of " + std::to_string(opts.cap_states) + " states exceeded";
    } else if (found >= 0) {
      v.outcome = Outcome::Satisfied;
      if (opts.witness) build_witness(g, path_to(store, found), v);
    } else {
      v.outcome = Outcome::Violated;
    }
  } catch (const EvalError& e) {
    v.outcome = Outcome::Error;
    v.message = e.what();
  }
  v.stats.states = store.states.size();
  v.stats.millis = timer.ms();
  return v;
}

bool time_diverges(const ZoneGraph& g, const Transitions& t, const SymState& s) {
  (void)g;
  if (t.delay_blocked(s.locations)) return false;
  for (int i = 1; i < s.zone.dim(); ++i)
    if (s.zone.at(i, 0) != kInfinity) return false;
  return true;
}

}  // namespace

Verdict check_reachability(const TANetwork& n, const Expr& phi, const CheckOptions& opts) {
  return search(n, phi, false, opts);
}

Verdict check_invariant(const TANetwork& n, const Expr& phi, const CheckOptions& opts) {
  Verdict v = search(n, phi, true, opts);
  if (v.outcome == Outcome::Satisfied) v.outcome = Outcome::Violated;
  else if (v.outcome == Outcome::Violated) v.outcome = Outcome::Satisfied;
  return v;
}

Verdict check_leadsto(const TANetwork& n, const Expr& p, const Expr& q, const CheckOptions& opts) {
  Verdict v;
  v.zeno_warning = true;
  Timer timer;
  ZoneGraph g(n, {opts.slicing, {&p, &q}});
  Transitions trans(n);
  Store store;
  try {
    if (explore(g, store, opts, v.stats, [](int) { return false; }) == Explore::Capped) {
      v.outcome = Outcome::BoundExceeded;
      v.message = "exploration cap of " + std::to_string(opts.cap_states) + " states exceeded";
      v.stats.millis = timer.ms();
      return v;
    }

    struct Frame {
      SymState state;
      Key key;
      std::vector<SymState> next;
      std::size_t pos = 0;
    };
    ZoneSet good;
    ZoneSet on_stack;
    std::vector<Frame> stack;
    std::vector<SymState> succ;
    uint64_t nested = 0;

    // Returns false when a q-avoiding maximal path exists from `start`.
    auto expand = [&](Frame& f) -> bool {
      succ.clear();
      g.successors(f.state, succ);
      if (succ.empty() || time_diverges(g, trans, f.state)) return false;
      for (const auto& s : succ)
        for (auto& z : sat(q, s, true)) f.next.push_back(SymState{s.locations, s.env, std::move(z)});
      return true;
    };
    auto push = [&](SymState s) -> bool {
      Frame f;
      f.key = key_of(s);
      f.state = std::move(s);
      if (!expand(f)) {
        stack.push_back(std::move(f));
        return false;
      }
      on_stack.insert(f.key, f.state.zone);
      stack.push_back(std::move(f));
      return true;
    };

    for (std::size_t id = 0; id < store.states.size(); ++id) {
      if (store.covered[id]) continue;
      const SymState& s = store.states[id];
      for (auto& zp : sat(p, s)) {
        SymState ps{s.locations, s.env, std::move(zp)};
        for (auto& z : sat(q, ps, true)) {
          SymState start{s.locations, s.env, std::move(z)};
          Key k = key_of(start);
          if (good.covers(k, start.zone)) continue;
          bool ok = push(std::move(start));
          while (ok && !stack.empty()) {
            Frame& top = stack.back();
            if (top.pos == top.next.size()) {
              good.insert(top.key, top.state.zone);
              on_stack.erase_last(top.key);
              stack.pop_back();
              continue;
            }
            SymState nx = std::move(top.next[top.pos++]);
            Key nk = key_of(nx);
            if (on_stack.covers(nk, nx.zone)) {
              stack.push_back(Frame{std::move(nx), nk, {}, 0});
              ok = false;
              break;
            }
            if (good.covers(nk, nx.zone)) continue;
            if (++nested > opts.cap_states) {
              v.outcome = Outcome::BoundExceeded;
              v.message = "exploration cap of " + std::to_string(opts.cap_states) + " states exceeded";
              v.stats.millis = timer.ms();
              return v;
            }
            ok = push(std::move(nx));
          }
          if (!ok) {
            v.outcome = Outcome::Violated;
            v.message = stack.empty() ? "" : "q-avoiding path ends in " + g.describe(stack.back().state);
            if (opts.witness) {
              std::vector<SymState> path = path_to(store, static_cast<int>(id));
              path.pop_back();
              for (auto& f : stack) path.push_back(std::move(f.state));
              build_witness(g, path, v);
            }
            v.stats.millis = timer.ms();
            return v;
          }
        }
      }
    }
    v.outcome = Outcome::Satisfied;
  } catch (const EvalError& e) {
    v.outcome = Outcome::Error;
    v.message = e.what();
  }
  v.stats.millis = timer.ms();
  return v;
}

Verdict check_query(const TANetwork& n, Query q, const CheckOptions& opts) {
  Verdict v;
  v.query = q.text.empty() ? to_string(q) : q.text;
  if (q.kind == Query::Kind::StrategyMin) {
    v.message = "query requires learning engine";
    return v;
  }
  if (q.kind == Query::Kind::Estimate) {
    v.message = "query requires simulation engine";
    return v;
  }
  try {
    resolve_query(q, n);
  } catch (const CompileError& e) {
    v.message = e.what();
    return v;
  }
  Verdict r;
  switch (q.kind) {
    case Query::Kind::Reach: r = check_reachability(n, q.phi, opts); break;
    case Query::Kind::Invariant: r = check_invariant(n, q.phi, opts); break;
    case Query::Kind::LeadsTo: r = check_leadsto(n, q.phi, q.psi, opts); break;
    default: break;
  }
  r.query = v.query;
  return r;
}

std::vector<Verdict> run_query_file(const TANetwork& n, const std::vector<Query>& qs, const CheckOptions& opts) {
  std::vector<Verdict> out;
  out.reserve(qs.size());
  for (const auto& q : qs) out.push_back(check_query(n, q, opts));
  return out;
}

}  // namespace tachyon
