#include "tachyon/model.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

namespace tachyon {

std::string instance_name(const std::string& templ, const std::vector<int64_t>& args) {
  if (args.empty()) return templ;
  std::string s = templ + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(args[i]);
  }
  return s + ")";
}

namespace {

void subst_opt(std::optional<Expr>& e, const std::string& name, int64_t v) {
  if (e) substitute(*e, name, v);
}

void subst_template(TemplateDecl& t, const std::string& name, int64_t v) {
  for (auto& c : t.locals.consts) substitute(c.value, name, v);
  for (auto& d : t.locals.vars) {
    subst_opt(d.size, name, v);
    subst_opt(d.init, name, v);
  }
  for (auto& l : t.locations) {
    subst_opt(l.invariant, name, v);
    subst_opt(l.exit_weight, name, v);
  }
  for (auto& e : t.edges) {
    for (auto& s : e.selects) {
      substitute(s.lo, name, v);
      substitute(s.hi, name, v);
    }
    subst_opt(e.guard, name, v);
    if (e.sync) subst_opt(e.sync->index, name, v);
    substitute(e.update, name, v);
    subst_opt(e.weight, name, v);
  }
}

}  // namespace

AutomatonInstance instantiate(const TemplateDecl& t, const std::vector<int64_t>& args, const std::string& name) {
  if (args.size() != t.params.size())
    throw CompileError(t.span, "arity mismatch: template '" + t.name + "' expects " +
                                   std::to_string(t.params.size()) + " argument(s), got " +
                                   std::to_string(args.size()));
  AutomatonInstance inst;
  inst.name = name;
  inst.template_name = t.name;
  inst.args = args;
  inst.body = t;
  for (std::size_t i = 0; i < args.size(); ++i) subst_template(inst.body, t.params[i].name, args[i]);
  return inst;
}

// ---------------------------------------------------------------------------
// Clock atoms

namespace {

std::optional<std::pair<int, int>> clock_part(const Expr& e) {
  if ((e.kind == Expr::Kind::Name || e.kind == Expr::Kind::Member) && e.ref.kind == RefKind::Clock)
    return std::make_pair(e.ref.index, 0);
  if (e.kind == Expr::Kind::Binary && e.bop == BinaryOp::Sub) {
    auto l = clock_part(e.args[0]);
    auto r = clock_part(e.args[1]);
    if (l && r && l->second == 0 && r->second == 0) return std::make_pair(l->first, r->first);
  }
  return std::nullopt;
}

BinaryOp flip(BinaryOp op) {
  switch (op) {
    case BinaryOp::Lt: return BinaryOp::Gt;
    case BinaryOp::Le: return BinaryOp::Ge;
    case BinaryOp::Gt: return BinaryOp::Lt;
    case BinaryOp::Ge: return BinaryOp::Le;
    default: return op;
  }
}

BinaryOp negate(BinaryOp op) {
  switch (op) {
    case BinaryOp::Lt: return BinaryOp::Ge;
    case BinaryOp::Le: return BinaryOp::Gt;
    case BinaryOp::Gt: return BinaryOp::Le;
    case BinaryOp::Ge: return BinaryOp::Lt;
    case BinaryOp::Eq: return BinaryOp::Ne;
    case BinaryOp::Ne: return BinaryOp::Eq;
    default: return op;
  }
}

}  // namespace

AtomForm decompose_atom(const Expr& atom) {
  if (atom.kind != Expr::Kind::Binary || !is_comparison(atom.bop))
    throw CompileError(atom.span, "malformed clock constraint");
  auto l = clock_part(atom.args[0]);
  auto r = clock_part(atom.args[1]);
  AtomForm f;
  if (l && r) {
    if (l->second != 0 || r->second != 0) throw CompileError(atom.span, "malformed clock constraint");
    f.i = l->first;
    f.j = r->first;
    f.op = atom.bop;
    f.c = 0;
    return f;
  }
  const Expr* bound = nullptr;
  if (l) {
    f.i = l->first;
    f.j = l->second;
    f.op = atom.bop;
    bound = &atom.args[1];
  } else if (r) {
    f.i = r->first;
    f.j = r->second;
    f.op = flip(atom.bop);
    bound = &atom.args[0];
  } else {
    throw CompileError(atom.span, "malformed clock constraint");
  }
  auto c = constant_value(*bound);
  if (!c) throw CompileError(bound->span, "clock bound must be a constant");
  f.c = *c;
  return f;
}

std::vector<std::vector<Constraint>> atom_constraints(const AtomForm& a, bool negated) {
  BinaryOp op = negated ? negate(a.op) : a.op;
  switch (op) {
    case BinaryOp::Le: return {{{a.i, a.j, bound_le(a.c)}}};
    case BinaryOp::Lt: return {{{a.i, a.j, bound_lt(a.c)}}};
    case BinaryOp::Ge: return {{{a.j, a.i, bound_le(-a.c)}}};
    case BinaryOp::Gt: return {{{a.j, a.i, bound_lt(-a.c)}}};
    case BinaryOp::Eq: return {{{a.i, a.j, bound_le(a.c)}, {a.j, a.i, bound_le(-a.c)}}};
    case BinaryOp::Ne: return {{{a.i, a.j, bound_lt(a.c)}}, {{a.j, a.i, bound_lt(-a.c)}}};
    default: return {};
  }
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

void flatten_and(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind == Expr::Kind::Binary && e.bop == BinaryOp::And && !e.clock_atom) {
    flatten_and(e.args[0], out);
    flatten_and(e.args[1], out);
  } else {
    out.push_back(&e);
  }
}

Expr conjunction(const std::vector<const Expr*>& parts) {
  if (parts.empty()) return Expr::bool_lit(true);
  Expr acc = *parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) {
    Expr next = Expr::binary(BinaryOp::And, std::move(acc), *parts[i], parts[i]->span);
    next.ref.type = Type::Bool;
    acc = std::move(next);
  }
  return acc;
}

class Compiler {
 public:
  explicit Compiler(const ModelAst& ast) { net_.ast = ast; }

  Parsed<TANetwork> run() {
    net_.clock_names.push_back("0");
    globals_.set_member_resolver([this](const Expr& e) { return resolve_member(e); });
    compile_globals();
    declare_instances();
    for (std::size_t i = 0; i < pending_.size(); ++i) compile_edges(i);
    finish();
    Parsed<TANetwork> out;
    out.diagnostics = std::move(diags_);
    if (out.diagnostics.empty()) out.value = std::move(net_);
    return out;
  }

 private:
  struct Pending {
    AutomatonInstance inst;
    std::unique_ptr<Scope> scope;
    std::unordered_map<std::string, int> location_index;
    std::vector<std::size_t> loc_decl;
  };

  template <class F>
  void attempt(F&& f) {
    try {
      f();
    } catch (const CompileError& e) {
      diags_.push_back(e.diagnostic());
    }
  }

  int64_t const_int(Expr& e, const Scope& scope, const char* what) {
    Type t = typecheck_or_throw(e, scope);
    (void)t;
    auto v = constant_value(e);
    if (!v) throw CompileError(e.span, std::string(what) + " must be a constant expression");
    return *v;
  }

  void define_unique(Scope& scope, const std::string& name, const Symbol& s, const SourceSpan& span,
                     std::vector<std::pair<std::string, Symbol>>* record) {
    if (scope.defines(name) || (&scope == &globals_ && channel_index_.count(name)))
      throw CompileError(span, "duplicate declaration of '" + name + "'");
    scope.define(name, s);
    if (record) record->emplace_back(name, s);
  }

  void declare_data(Declarations& d, Scope& scope, const std::string& prefix,
                    std::vector<std::pair<std::string, Symbol>>* record) {
    for (auto& c : d.consts) {
      attempt([&] {
        Symbol s;
        s.kind = RefKind::Const;
        s.value = const_int(c.value, scope, "constant initializer");
        define_unique(scope, c.name, s, c.span, record);
      });
    }
    for (auto& c : d.clocks) {
      attempt([&] {
        Symbol s;
        s.kind = RefKind::Clock;
        s.type = Type::Clock;
        s.index = static_cast<int>(net_.clock_names.size());
        define_unique(scope, c.name, s, c.span, record);
        net_.clock_names.push_back(prefix + c.name);
      });
    }
    for (auto& v : d.vars) {
      attempt([&] {
        Symbol s;
        s.kind = RefKind::Var;
        s.type = v.type;
        if (v.size) {
          s.length = const_int(*v.size, scope, "array size");
          if (s.length <= 0) throw CompileError(v.size->span, "array size must be positive");
        }
        int64_t init = 0;
        if (v.init) {
          Type it = typecheck_or_throw(*v.init, scope);
          if (it != v.type) throw CompileError(v.init->span, "type mismatch: initializer of '" + v.name + "'");
          auto c = constant_value(*v.init);
          if (!c) throw CompileError(v.init->span, "initializer must be a constant expression");
          init = *c;
        }
        s.index = static_cast<int>(net_.slots.size());
        define_unique(scope, v.name, s, v.span, record);
        if (s.length == 0) {
          net_.slots.push_back({prefix + v.name, v.type, init});
        } else {
          for (int64_t k = 0; k < s.length; ++k)
            net_.slots.push_back({prefix + v.name + "[" + std::to_string(k) + "]", v.type, init});
        }
      });
    }
  }

  void compile_globals() {
    Declarations g = net_.ast.globals;
    declare_data(g, globals_, "", &net_.global_symbols);
    for (auto& c : g.chans) {
      attempt([&] {
        if (globals_.defines(c.name) || channel_index_.count(c.name))
          throw CompileError(c.span, "duplicate declaration of '" + c.name + "'");
        Channel ch;
        ch.name = c.name;
        ch.broadcast = c.broadcast;
        ch.base = net_.channel_ids;
        if (c.size) {
          ch.length = const_int(*c.size, globals_, "channel array size");
          if (ch.length <= 0) throw CompileError(c.size->span, "array size must be positive");
        }
        net_.channel_ids += static_cast<int>(std::max<int64_t>(1, ch.length));
        channel_index_[c.name] = static_cast<int>(net_.channels.size());
        net_.channels.push_back(ch);
      });
    }
    for (auto& m : g.macros) {
      attempt([&] {
        if (globals_.find_macro(m.name)) throw CompileError(m.span, "duplicate macro '" + m.name + "'");
        check_macro_calls(m.body, m.name);
        typecheck_update(m.body, globals_);
      });
      globals_.define_macro(m.name, static_cast<int>(net_.macros.size()));
      net_.macro_names.push_back(m.name);
      net_.macros.push_back(m.body);
    }
  }

  void check_macro_calls(const Update& u, const std::string& self) {
    for (const auto& s : u) {
      if (s.kind == Stmt::Kind::Call && s.callee == self)
        throw CompileError(s.span, "recursive macro '" + self + "'");
      if (s.kind == Stmt::Kind::If) {
        check_macro_calls(s.then_body, self);
        check_macro_calls(s.else_body, self);
      }
    }
  }

  void declare_instances() {
    std::map<std::string, const TemplateDecl*> templates;
    for (const auto& t : net_.ast.templates) {
      if (!templates.emplace(t.name, &t).second)
        diags_.push_back({t.span, "duplicate template '" + t.name + "'", Severity::Error});
    }
    std::set<std::string> names;
    for (const auto& sd : net_.ast.system) {
      attempt([&] {
        auto it = templates.find(sd.template_name);
        if (it == templates.end()) throw CompileError(sd.span, "unknown template '" + sd.template_name + "'");
        std::vector<int64_t> args;
        for (Expr a : sd.args) args.push_back(const_int(a, globals_, "template argument"));
        std::string name = instance_name(sd.template_name, args);
        if (!names.insert(name).second) throw CompileError(sd.span, "duplicate instance '" + name + "'");
        AutomatonInstance ai;
        try {
          ai = instantiate(*it->second, args, name);
        } catch (const CompileError& e) {
          throw CompileError(sd.span, e.what());
        }
        declare_instance(std::move(ai));
      });
    }
  }

  void declare_instance(AutomatonInstance ai) {
    Pending p;
    p.scope = std::make_unique<Scope>(&globals_);
    net_.local_symbols.emplace_back();
    for (const auto& prm : ai.body.params) {
      if (globals_.defines(prm.name) || channel_index_.count(prm.name))
        diags_.push_back({prm.span, "parameter '" + prm.name + "' shadows a global declaration", Severity::Error});
    }
    declare_data(ai.body.locals, *p.scope, ai.name + ".", &net_.local_symbols.back());

    Instance inst;
    inst.name = ai.name;
    inst.template_name = ai.template_name;
    inst.args = ai.args;
    int initial = -1;
    for (std::size_t li = 0; li < ai.body.locations.size(); ++li) {
      const LocationDecl& l = ai.body.locations[li];
      if (p.location_index.count(l.name)) {
        diags_.push_back({l.span, "duplicate location '" + l.name + "'", Severity::Error});
        continue;
      }
      if (l.initial) {
        if (initial >= 0)
          diags_.push_back({l.span, "duplicate initial location in template '" + ai.template_name + "'",
                            Severity::Error});
        else
          initial = static_cast<int>(inst.locations.size());
      }
      p.location_index[l.name] = static_cast<int>(inst.locations.size());
      p.loc_decl.push_back(li);
      Location loc;
      loc.name = l.name;
      loc.kind = l.kind;
      loc.branchpoint = l.branchpoint;
      loc.invariant_expr = Expr::bool_lit(true);
      inst.locations.push_back(std::move(loc));
    }
    if (initial < 0) {
      diags_.push_back({ai.body.span, "missing initial location in template '" + ai.template_name + "'",
                        Severity::Error});
      initial = 0;
    }
    inst.initial = initial;
    net_.instances.push_back(std::move(inst));
    p.inst = std::move(ai);
    pending_.push_back(std::move(p));
  }

  std::optional<Symbol> resolve_member(const Expr& e) const {
    std::string name = instance_name(e.name, e.proc_args);
    for (std::size_t i = 0; i < net_.instances.size(); ++i) {
      const Instance& inst = net_.instances[i];
      if (inst.name != name) continue;
      for (std::size_t l = 0; l < inst.locations.size(); ++l) {
        if (inst.locations[l].name == e.member) {
          Symbol s;
          s.kind = RefKind::Location;
          s.type = Type::Bool;
          s.index = static_cast<int>(i);
          s.length = static_cast<int64_t>(l);
          return s;
        }
      }
      if (i < net_.local_symbols.size()) {
        for (const auto& [n, s] : net_.local_symbols[i])
          if (n == e.member) return s;
      }
      return std::nullopt;
    }
    return std::nullopt;
  }

  void compile_invariant(const LocationDecl& ld, Location& loc, Scope& scope) {
    if (!ld.invariant) return;
    if (loc.branchpoint || loc.kind == LocationKind::Committed)
      throw CompileError(ld.span, "committed location must have empty invariant");
    if (loc.kind == LocationKind::Urgent) throw CompileError(ld.span, "urgent location must have empty invariant");
    Expr inv = *ld.invariant;
    typecheck_or_throw(inv, scope);
    std::vector<const Expr*> parts;
    flatten_and(inv, parts);
    for (const Expr* p : parts) {
      if (!p->clock_atom) throw CompileError(p->span, "invariant must be a conjunction of clock upper bounds");
      AtomForm f = decompose_atom(*p);
      if (f.j != 0) throw CompileError(p->span, "diagonal constraints are not allowed in invariants");
      if (f.op == BinaryOp::Eq) throw CompileError(p->span, "equality is not allowed in invariants");
      if (f.op != BinaryOp::Le && f.op != BinaryOp::Lt)
        throw CompileError(p->span, "invariant must be a conjunction of clock upper bounds");
      auto alts = atom_constraints(f, false);
      for (const auto& c : alts[0]) loc.invariant.push_back(c);
      note_constant(f);
    }
    loc.invariant_expr = std::move(inv);
  }

  void note_constant(const AtomForm& f) {
    int64_t c = f.c < 0 ? -f.c : f.c;
    if (f.i) bump(f.i, c);
    if (f.j) bump(f.j, c);
  }

  void bump(int clock, int64_t c) {
    if (net_.max_constants.size() < net_.clock_names.size()) net_.max_constants.resize(net_.clock_names.size(), 0);
    auto& k = net_.max_constants[static_cast<std::size_t>(clock)];
    k = std::max(k, c);
  }

  void note_resets(const Update& u) {
    for (const auto& s : u) {
      if (s.kind == Stmt::Kind::Assign && s.clock_reset) {
        if (auto v = constant_value(s.value)) bump(s.target.ref.index, *v);
      } else if (s.kind == Stmt::Kind::If) {
        note_resets(s.then_body);
        note_resets(s.else_body);
      }
    }
  }

  void compile_edges(std::size_t idx) {
    Pending& p = pending_[idx];
    Instance& inst = net_.instances[idx];
    for (std::size_t l = 0; l < inst.locations.size(); ++l) {
      const LocationDecl& ld = p.inst.body.locations[p.loc_decl[l]];
      Location& loc = inst.locations[l];
      attempt([&] { compile_invariant(ld, loc, *p.scope); });
      attempt([&] {
        if (ld.exit_weight) {
          Expr w = *ld.exit_weight;
          loc.exit_weight = const_int(w, *p.scope, "exit weight");
          if (loc.exit_weight <= 0) throw CompileError(w.span, "exit weight must be positive");
        }
      });
    }
    int n = 0;
    for (const auto& ed : p.inst.body.edges) {
      int k = n++;
      attempt([&] {
        Edge e = compile_edge(ed, p, inst, k);
        int id = static_cast<int>(inst.edges.size());
        inst.locations[static_cast<std::size_t>(e.source)].out.push_back(id);
        inst.edges.push_back(std::move(e));
      });
    }
  }

  Edge compile_edge(const EdgeDecl& ed, Pending& p, Instance& inst, int ordinal) {
    Edge e;
    auto src = p.location_index.find(ed.source);
    if (src == p.location_index.end()) throw CompileError(ed.span, "unknown location '" + ed.source + "'");
    auto tgt = p.location_index.find(ed.target);
    if (tgt == p.location_index.end()) throw CompileError(ed.span, "unknown location '" + ed.target + "'");
    e.source = src->second;
    e.target = tgt->second;
    e.label = ed.source + "->" + ed.target + "#" + std::to_string(ordinal);
    const Location& from = inst.locations[static_cast<std::size_t>(e.source)];

    Scope scope(p.scope.get());
    for (const auto& sd : ed.selects) {
      Select s;
      s.name = sd.name;
      Expr lo = sd.lo, hi = sd.hi;
      s.lo = const_int(lo, *p.scope, "select bound");
      s.hi = const_int(hi, *p.scope, "select bound");
      if (s.lo > s.hi) throw CompileError(sd.span, "empty select range");
      if (s.hi - s.lo > 1'000'000) throw CompileError(sd.span, "select range too large");
      if (scope.defines(sd.name)) throw CompileError(sd.span, "duplicate declaration of '" + sd.name + "'");
      Symbol sym;
      sym.kind = RefKind::Select;
      sym.index = static_cast<int>(e.selects.size());
      scope.define(sd.name, sym);
      e.selects.push_back(std::move(s));
    }

    e.data_guard = Expr::bool_lit(true);
    e.clock_guard_expr = Expr::bool_lit(true);
    if (ed.guard) {
      Expr g = *ed.guard;
      Type t = typecheck_or_throw(g, scope);
      if (t != Type::Bool) throw CompileError(g.span, "type mismatch: guard must be bool");
      std::vector<const Expr*> parts, data, clocks;
      flatten_and(g, parts);
      for (const Expr* c : parts) {
        if (c->clock_atom) {
          AtomForm f = decompose_atom(*c);
          if (f.op == BinaryOp::Ne) throw CompileError(c->span, "'!=' is not allowed in clock guards");
          auto alts = atom_constraints(f, false);
          for (const auto& k : alts[0]) e.clock_guard.push_back(k);
          note_constant(f);
          clocks.push_back(c);
        } else if (mentions_clock(*c)) {
          throw CompileError(c->span, "clock guard must be a conjunction of clock constraints");
        } else {
          data.push_back(c);
        }
      }
      e.has_data_guard = !data.empty();
      e.data_guard = conjunction(data);
      e.clock_guard_expr = conjunction(clocks);
    }

    e.channel_index = Expr::int_lit(0);
    if (ed.sync) {
      const SyncDecl& sd = *ed.sync;
      if (from.branchpoint) throw CompileError(sd.span, "branchpoint edges cannot synchronize");
      auto it = channel_index_.find(sd.channel);
      if (it == channel_index_.end()) throw CompileError(sd.span, "unknown channel '" + sd.channel + "'");
      const Channel& ch = net_.channels[static_cast<std::size_t>(it->second)];
      e.sync = sd.kind;
      e.channel = it->second;
      if (ch.length > 0) {
        if (!sd.index) throw CompileError(sd.span, "channel '" + sd.channel + "' requires an index");
        Expr ix = *sd.index;
        Type t = typecheck_or_throw(ix, scope);
        if (t != Type::Int) throw CompileError(ix.span, "type mismatch: channel index must be int");
        if (auto c = constant_value(ix); c && (*c < 0 || *c >= ch.length))
          throw CompileError(ix.span, "channel index out of range");
        if (!constant_value(ix)) check_select_indices(ix, e.selects, ch.length);
        e.channel_index = std::move(ix);
      } else if (sd.index) {
        throw CompileError(sd.span, "channel '" + sd.channel + "' is not an array");
      }
      if (ch.broadcast && sd.kind == SyncKind::Receive && !e.clock_guard.empty())
        throw CompileError(ed.span, "broadcast receivers cannot have clock guards");
    }

    e.update = ed.update;
    typecheck_update(e.update, scope);
    note_resets(e.update);
    e.controllable = ed.controllable;
    if (ed.weight) {
      Expr w = *ed.weight;
      e.weight = const_int(w, scope, "edge weight");
      if (e.weight <= 0) throw CompileError(w.span, "edge weight must be positive");
    }
    return e;
  }

  // Index expressions built only from selects and constants are checked for
  // every select valuation.
  void check_select_indices(const Expr& ix, const std::vector<Select>& sel, int64_t length) {
    std::function<bool(const Expr&)> closed = [&](const Expr& x) {
      if (x.kind == Expr::Kind::Name && x.ref.kind != RefKind::Const && x.ref.kind != RefKind::Select) return false;
      if (x.kind == Expr::Kind::Index || x.kind == Expr::Kind::Member) return false;
      for (const auto& a : x.args)
        if (!closed(a)) return false;
      return true;
    };
    if (!closed(ix)) return;
    std::size_t total = 1;
    for (const auto& s : sel) total *= static_cast<std::size_t>(s.hi - s.lo + 1);
    if (total > 4096) return;
    std::vector<int64_t> vals(sel.size());
    for (std::size_t n = 0; n < total; ++n) {
      std::size_t r = n;
      for (std::size_t k = 0; k < sel.size(); ++k) {
        std::size_t w = static_cast<std::size_t>(sel[k].hi - sel[k].lo + 1);
        vals[k] = sel[k].lo + static_cast<int64_t>(r % w);
        r /= w;
      }
      EvalContext ctx{{}, vals};
      int64_t v = 0;
      try {
        v = eval_int(ix, ctx);
      } catch (const EvalError& err) {
        throw CompileError(ix.span, err.what());
      }
      if (v < 0 || v >= length) throw CompileError(ix.span, "channel index out of range");
    }
  }

  void finish() { net_.max_constants.resize(net_.clock_names.size(), 0); }

  TANetwork net_;
  Scope globals_;
  std::unordered_map<std::string, int> channel_index_;
  std::vector<Pending> pending_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

Parsed<TANetwork> compile_network(const ModelAst& ast) { return Compiler(ast).run(); }

std::vector<Diagnostic> validate_network(const TANetwork& n) { return compile_network(n.ast).diagnostics; }

std::unique_ptr<Scope> TANetwork::query_scope() const {
  auto scope = std::make_unique<Scope>();
  for (const auto& [name, s] : global_symbols) scope->define(name, s);
  for (std::size_t i = 0; i < macro_names.size(); ++i) scope->define_macro(macro_names[i], static_cast<int>(i));
  scope->set_member_resolver([this](const Expr& e) -> std::optional<Symbol> {
    auto idx = find_instance(instance_name(e.name, e.proc_args));
    if (!idx) return std::nullopt;
    const Instance& inst = instances[static_cast<std::size_t>(*idx)];
    for (std::size_t l = 0; l < inst.locations.size(); ++l) {
      if (inst.locations[l].name == e.member) {
        Symbol s;
        s.kind = RefKind::Location;
        s.type = Type::Bool;
        s.index = *idx;
        s.length = static_cast<int64_t>(l);
        return s;
      }
    }
    for (const auto& [n, s] : local_symbols[static_cast<std::size_t>(*idx)])
      if (n == e.member) return s;
    return std::nullopt;
  });
  return scope;
}

std::optional<int> TANetwork::find_instance(const std::string& name) const {
  for (std::size_t i = 0; i < instances.size(); ++i)
    if (instances[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> TANetwork::find_slot(const std::string& name) const {
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (slots[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int> TANetwork::find_clock(const std::string& name) const {
  for (std::size_t i = 1; i < clock_names.size(); ++i)
    if (clock_names[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

std::optional<int64_t> TANetwork::find_constant(const std::string& name) const {
  for (const auto& [n, s] : global_symbols)
    if (n == name && s.kind == RefKind::Const) return s.value;
  return std::nullopt;
}

ConcreteState initial_concrete_state(const TANetwork& n) {
  ConcreteState s;
  for (const auto& inst : n.instances) s.locations.push_back(inst.initial);
  for (const auto& slot : n.slots) s.env.slots.push_back(slot.init);
  s.clocks.assign(n.clock_names.size(), 0.0);
  return s;
}

uint64_t fnv1a(std::string_view text) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace tachyon
