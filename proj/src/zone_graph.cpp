#include "tachyon/zone_graph.hpp"

#include <sstream>

namespace tachyon {

namespace {

void mark_vars(const Expr& e, std::vector<char>& rel, bool& changed) {
  if ((e.kind == Expr::Kind::Name || e.kind == Expr::Kind::Index || e.kind == Expr::Kind::Member) &&
      e.ref.kind == RefKind::Var) {
    int64_t n = e.ref.length > 0 ? e.ref.length : 1;
    for (int64_t k = 0; k < n; ++k) {
      auto idx = static_cast<std::size_t>(e.ref.index + k);
      if (!rel[idx]) {
        rel[idx] = 1;
        changed = true;
      }
    }
  }
  for (const auto& a : e.args) mark_vars(a, rel, changed);
}

bool target_relevant(const Expr& t, const std::vector<char>& rel) {
  return rel[static_cast<std::size_t>(t.ref.index)] != 0;
}

bool writes_relevant(const Update& u, const std::vector<char>& rel, const std::vector<Update>& macros);

bool stmt_writes_relevant(const Stmt& s, const std::vector<char>& rel, const std::vector<Update>& macros) {
  switch (s.kind) {
    case Stmt::Kind::Assign: return s.clock_reset || target_relevant(s.target, rel);
    case Stmt::Kind::If: return writes_relevant(s.then_body, rel, macros) || writes_relevant(s.else_body, rel, macros);
    case Stmt::Kind::Call: return writes_relevant(macros[static_cast<std::size_t>(s.macro)], rel, macros);
  }
  return false;
}

bool writes_relevant(const Update& u, const std::vector<char>& rel, const std::vector<Update>& macros) {
  for (const auto& s : u)
    if (stmt_writes_relevant(s, rel, macros)) return true;
  return false;
}

void propagate(const Update& u, std::vector<char>& rel, const std::vector<Update>& macros, bool& changed) {
  for (const auto& s : u) {
    switch (s.kind) {
      case Stmt::Kind::Assign:
        if (!s.clock_reset && target_relevant(s.target, rel)) {
          mark_vars(s.value, rel, changed);
          if (s.target.kind == Expr::Kind::Index) mark_vars(s.target.args[0], rel, changed);
        }
        break;
      case Stmt::Kind::If:
        if (stmt_writes_relevant(s, rel, macros)) mark_vars(s.cond, rel, changed);
        propagate(s.then_body, rel, macros, changed);
        propagate(s.else_body, rel, macros, changed);
        break;
      case Stmt::Kind::Call: break;
    }
  }
}

}  // namespace

std::vector<char> relevant_slots(const TANetwork& n, const std::vector<const Expr*>& observed) {
  std::vector<char> rel(n.slots.size(), 0);
  bool changed = false;
  for (const Expr* e : observed) mark_vars(*e, rel, changed);
  for (const auto& inst : n.instances) {
    for (const auto& e : inst.edges) {
      mark_vars(e.data_guard, rel, changed);
      mark_vars(e.channel_index, rel, changed);
    }
  }
  do {
    changed = false;
    for (const auto& m : n.macros) propagate(m, rel, n.macros, changed);
    for (const auto& inst : n.instances)
      for (const auto& e : inst.edges) propagate(e.update, rel, n.macros, changed);
  } while (changed);
  return rel;
}

ZoneGraph::ZoneGraph(const TANetwork& n, ZoneGraphOptions opts)
    : net_(n), trans_(n), k_(n.max_constants), slicing_(opts.slicing) {
  k_.resize(static_cast<std::size_t>(n.clock_count()), 0);
  for (const Expr* e : opts.observed) observe_constants(*e);
  if (slicing_) relevant_ = relevant_slots(n, opts.observed);
}

void ZoneGraph::observe_constants(const Expr& e) {
  if (e.clock_atom) {
    AtomForm f = decompose_atom(e);
    int64_t c = f.c < 0 ? -f.c : f.c;
    if (f.i) k_[static_cast<std::size_t>(f.i)] = std::max(k_[static_cast<std::size_t>(f.i)], c);
    if (f.j) k_[static_cast<std::size_t>(f.j)] = std::max(k_[static_cast<std::size_t>(f.j)], c);
    return;
  }
  for (const auto& a : e.args) observe_constants(a);
}

bool ZoneGraph::finish(SymState& s, bool delay) const {
  if (delay) s.zone.up();
  for (std::size_t i = 0; i < s.locations.size(); ++i) {
    const Location& loc = net_.instances[i].locations[static_cast<std::size_t>(s.locations[i])];
    for (const auto& c : loc.invariant)
      if (!s.zone.constrain(c)) return false;
  }
  s.zone.extrapolate(k_);
  return !s.zone.empty();
}

SymState ZoneGraph::initial() {
  ConcreteState c = initial_concrete_state(net_);
  SymState s{c.locations, c.env, Dbm::zero(dim())};
  if (!finish(s, !trans_.delay_blocked(s.locations))) s.zone.mark_empty();
  return s;
}

void ZoneGraph::successors(const SymState& s, std::vector<SymState>& out, std::vector<std::string>* labels) {
  firings_.clear();
  trans_.enumerate(s.locations, s.env, firings_);
  for (const Firing& f : firings_.firings) {
    Dbm zone = s.zone;
    bool ok = true;
    for (const Participant& p : firings_.participants(f)) {
      const Edge& e = net_.instances[static_cast<std::size_t>(p.instance)].edges[static_cast<std::size_t>(p.edge)];
      for (const auto& c : e.clock_guard) {
        if (!zone.constrain(c)) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (!ok) continue;
    SymState next{s.locations, s.env, std::move(zone)};
    resets_.clear();
    trans_.apply(firings_, f, next.locations, next.env, &resets_, slicing_ ? &relevant_ : nullptr);
    for (const auto& r : resets_) next.zone.reset(r.clock, r.value);
    if (!finish(next, !trans_.delay_blocked(next.locations))) continue;
    out.push_back(std::move(next));
    if (labels) labels->push_back(trans_.describe(firings_, f));
  }
}

std::string ZoneGraph::describe(const SymState& s) const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < s.locations.size(); ++i) {
    const Instance& inst = net_.instances[i];
    os << (i ? ", " : "") << inst.name << '.' << inst.locations[static_cast<std::size_t>(s.locations[i])].name;
  }
  os << ") [";
  bool first = true;
  for (std::size_t v = 0; v < s.env.slots.size(); ++v) {
    if (slicing_ && !relevant_[v]) continue;
    os << (first ? "" : ", ") << net_.slots[v].name << '=' << s.env.slots[v];
    first = false;
  }
  os << "] " << s.zone.to_string(net_.clock_names);
  return os.str();
}

std::vector<SymState> symbolic_successors(const SymState& s, const TANetwork& n) {
  ZoneGraph g(n, {false, {}});
  std::vector<SymState> out;
  g.successors(s, out);
  return out;
}

}  // namespace tachyon
