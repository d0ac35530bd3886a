#include "tachyon/expr.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace tachyon {

std::string_view to_string(Type t) {
  switch (t) {
    case Type::Int: return "int";
    case Type::Bool: return "bool";
    case Type::Clock: return "clock";
  }
  return "?";
}

bool is_comparison(BinaryOp op) {
  switch (op) {
    case BinaryOp::Lt: case BinaryOp::Le: case BinaryOp::Eq:
    case BinaryOp::Ne: case BinaryOp::Ge: case BinaryOp::Gt:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
    case BinaryOp::Imply: return "imply";
  }
  return "?";
}

bool Expr::operator==(const Expr& o) const {
  return kind == o.kind && value == o.value && name == o.name && proc_args == o.proc_args &&
         proc_call == o.proc_call && member == o.member && uop == o.uop && bop == o.bop &&
         args == o.args;
}

Expr Expr::int_lit(int64_t v, SourceSpan s) {
  Expr e;
  e.kind = Kind::IntLit;
  e.value = v;
  e.span = s;
  return e;
}

Expr Expr::bool_lit(bool v, SourceSpan s) {
  Expr e;
  e.kind = Kind::BoolLit;
  e.value = v ? 1 : 0;
  e.span = s;
  return e;
}

Expr Expr::name_ref(std::string n, SourceSpan s) {
  Expr e;
  e.kind = Kind::Name;
  e.name = std::move(n);
  e.span = s;
  return e;
}

Expr Expr::index(Expr base, Expr idx, SourceSpan s) {
  Expr e;
  e.kind = Kind::Index;
  e.name = base.name;
  e.args.push_back(std::move(idx));
  e.span = s;
  return e;
}

Expr Expr::unary(UnaryOp op, Expr operand, SourceSpan s) {
  Expr e;
  e.kind = Kind::Unary;
  e.uop = op;
  e.args.push_back(std::move(operand));
  e.span = s;
  return e;
}

Expr Expr::binary(BinaryOp op, Expr l, Expr r, SourceSpan s) {
  Expr e;
  e.kind = Kind::Binary;
  e.bop = op;
  e.args.push_back(std::move(l));
  e.args.push_back(std::move(r));
  e.span = s;
  return e;
}

Expr Expr::member_ref(std::string proc, std::vector<int64_t> args, bool call, std::string member,
                      SourceSpan s) {
  Expr e;
  e.kind = Kind::Member;
  e.name = std::move(proc);
  e.proc_args = std::move(args);
  e.proc_call = call;
  e.member = std::move(member);
  e.span = s;
  return e;
}

bool Stmt::operator==(const Stmt& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Assign: return target == o.target && value == o.value;
    case Kind::If: return cond == o.cond && then_body == o.then_body && else_body == o.else_body;
    case Kind::Call: return callee == o.callee;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expr& e) {
  if (e.kind == Expr::Kind::Unary) return 7;
  if (e.kind != Expr::Kind::Binary) return 8;
  switch (e.bop) {
    case BinaryOp::Imply: return 1;
    case BinaryOp::Or: return 2;
    case BinaryOp::And: return 3;
    case BinaryOp::Add: case BinaryOp::Sub: return 5;
    case BinaryOp::Mul: case BinaryOp::Div: case BinaryOp::Mod: return 6;
    default: return 4;
  }
}

void print(std::ostream& os, const Expr& e);

void print_child(std::ostream& os, const Expr& child, bool parens) {
  if (parens) os << '(';
  print(os, child);
  if (parens) os << ')';
}

void print(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::IntLit: os << e.value; break;
    case Expr::Kind::BoolLit: os << (e.value ? "true" : "false"); break;
    case Expr::Kind::Name: os << e.name; break;
    case Expr::Kind::Index:
      os << e.name << '[';
      print(os, e.args[0]);
      os << ']';
      break;
    case Expr::Kind::Member:
      os << e.name;
      if (e.proc_call) {
        os << '(';
        for (std::size_t i = 0; i < e.proc_args.size(); ++i) os << (i ? ", " : "") << e.proc_args[i];
        os << ')';
      }
      os << '.' << e.member;
      break;
    case Expr::Kind::Unary:
      os << (e.uop == UnaryOp::Neg ? "-" : "!");
      print_child(os, e.args[0], precedence(e.args[0]) < 7);
      break;
    case Expr::Kind::Binary: {
      int p = precedence(e);
      bool right_assoc = e.bop == BinaryOp::Imply;
      int lp = precedence(e.args[0]);
      int rp = precedence(e.args[1]);
      print_child(os, e.args[0], right_assoc ? lp <= p : lp < p);
      os << ' ' << to_string(e.bop) << ' ';
      print_child(os, e.args[1], right_assoc ? rp < p : rp <= p);
      break;
    }
  }
}

void print(std::ostream& os, const Stmt& s);

void print_block(std::ostream& os, const Update& u) {
  os << '{';
  for (const auto& s : u) {
    os << ' ';
    print(os, s);
    os << ';';
  }
  os << " }";
}

void print(std::ostream& os, const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::Assign:
      print(os, s.target);
      os << " := ";
      print(os, s.value);
      break;
    case Stmt::Kind::If:
      os << "if (";
      print(os, s.cond);
      os << ") ";
      print_block(os, s.then_body);
      if (!s.else_body.empty()) {
        os << " else ";
        print_block(os, s.else_body);
      }
      break;
    case Stmt::Kind::Call: os << s.callee << "()"; break;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

std::string to_string(const Stmt& s) {
  std::ostringstream os;
  print(os, s);
  return os.str();
}

std::string to_string(const Update& u, std::string_view sep) {
  std::ostringstream os;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (i) os << sep;
    print(os, u[i]);
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Scopes

const Symbol* Scope::find(std::string_view name) const {
  for (const Scope* s = this; s; s = s->parent_) {
    auto it = s->symbols_.find(std::string(name));
    if (it != s->symbols_.end()) return &it->second;
  }
  return nullptr;
}

std::optional<Symbol> Scope::resolve_member(const Expr& e) const {
  for (const Scope* s = this; s; s = s->parent_) {
    if (s->members_) return s->members_(e);
  }
  return std::nullopt;
}

std::optional<int> Scope::find_macro(std::string_view name) const {
  for (const Scope* s = this; s; s = s->parent_) {
    auto it = s->macros_.find(std::string(name));
    if (it != s->macros_.end()) return it->second;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Type checking

namespace {

enum class T { Int, Bool, Clock, ClockDiff, Formula };

constexpr const char* kClockMisuse = "clock outside clock-constraint atom";

[[noreturn]] void fail(const Expr& e, const std::string& msg) { throw CompileError(e.span, msg); }

const char* type_name(T t) {
  switch (t) {
    case T::Int: return "int";
    case T::Bool: return "bool";
    case T::Clock: return "clock";
    case T::ClockDiff: return "clock difference";
    case T::Formula: return "clock constraint";
  }
  return "?";
}

void apply_symbol(Expr& e, const Symbol& s) {
  e.ref.kind = s.kind;
  e.ref.index = s.index;
  e.ref.length = s.length;
  e.ref.type = s.type;
  e.ref.value = s.value;
}

T from_symbol(const Symbol& s) {
  if (s.kind == RefKind::Clock) return T::Clock;
  if (s.kind == RefKind::Location) return T::Bool;
  return s.type == Type::Bool ? T::Bool : T::Int;
}

bool clocky(T t) { return t == T::Clock || t == T::ClockDiff; }
bool boolish(T t) { return t == T::Bool || t == T::Formula; }

T check(Expr& e, const Scope& scope) {
  switch (e.kind) {
    case Expr::Kind::IntLit: return T::Int;
    case Expr::Kind::BoolLit: return T::Bool;
    case Expr::Kind::Name: {
      const Symbol* s = scope.find(e.name);
      if (!s) fail(e, "unresolved name '" + e.name + "'");
      if (s->kind == RefKind::Var && s->length > 0)
        fail(e, "array '" + e.name + "' used without index");
      if (s->kind == RefKind::Location) fail(e, "unresolved name '" + e.name + "'");
      apply_symbol(e, *s);
      return from_symbol(*s);
    }
    case Expr::Kind::Index: {
      const Symbol* s = scope.find(e.name);
      if (!s) fail(e, "unresolved name '" + e.name + "'");
      if (s->kind != RefKind::Var || s->length == 0) fail(e, "'" + e.name + "' is not an array");
      T it = check(e.args[0], scope);
      if (clocky(it)) fail(e.args[0], kClockMisuse);
      if (it != T::Int) fail(e.args[0], "type mismatch: array index must be int");
      apply_symbol(e, *s);
      if (auto c = constant_value(e.args[0]); c && (*c < 0 || *c >= s->length))
        fail(e.args[0], "index out of bounds");
      return s->type == Type::Bool ? T::Bool : T::Int;
    }
    case Expr::Kind::Member: {
      auto s = scope.resolve_member(e);
      if (!s) fail(e, "unresolved name '" + to_string(e) + "'");
      if (s->kind == RefKind::Var && s->length > 0)
        fail(e, "array '" + to_string(e) + "' used without index");
      apply_symbol(e, *s);
      return from_symbol(*s);
    }
    case Expr::Kind::Unary: {
      T t = check(e.args[0], scope);
      if (clocky(t)) fail(e.args[0], kClockMisuse);
      if (e.uop == UnaryOp::Neg) {
        if (t != T::Int) fail(e, std::string("type mismatch: '-' applied to ") + type_name(t));
        return T::Int;
      }
      if (!boolish(t)) fail(e, std::string("type mismatch: '!' applied to ") + type_name(t));
      return t;
    }
    case Expr::Kind::Binary: break;
  }

  T l = check(e.args[0], scope);
  T r = check(e.args[1], scope);
  switch (e.bop) {
    case BinaryOp::Add: case BinaryOp::Sub: case BinaryOp::Mul:
    case BinaryOp::Div: case BinaryOp::Mod:
      if (e.bop == BinaryOp::Sub && l == T::Clock && r == T::Clock) return T::ClockDiff;
      if (clocky(l)) fail(e.args[0], kClockMisuse);
      if (clocky(r)) fail(e.args[1], kClockMisuse);
      if (l != T::Int || r != T::Int)
        fail(e, std::string("type mismatch: arithmetic on ") + type_name(l == T::Int ? r : l));
      if ((e.bop == BinaryOp::Div || e.bop == BinaryOp::Mod) && e.args[1].kind == Expr::Kind::IntLit &&
          e.args[1].value == 0)
        fail(e.args[1], "division by zero");
      return T::Int;
    case BinaryOp::Lt: case BinaryOp::Le: case BinaryOp::Eq:
    case BinaryOp::Ne: case BinaryOp::Ge: case BinaryOp::Gt:
      if (clocky(l) || clocky(r)) {
        bool ok = (clocky(l) && r == T::Int) || (l == T::Int && clocky(r)) ||
                  (l == T::Clock && r == T::Clock);
        if (!ok) fail(e, "malformed clock constraint");
        e.clock_atom = true;
        return T::Formula;
      }
      if (l == T::Int && r == T::Int) return T::Bool;
      if ((e.bop == BinaryOp::Eq || e.bop == BinaryOp::Ne) && l == T::Bool && r == T::Bool)
        return T::Bool;
      fail(e, std::string("type mismatch: comparing ") + type_name(l) + " with " + type_name(r));
    case BinaryOp::And: case BinaryOp::Or: case BinaryOp::Imply:
      if (clocky(l)) fail(e.args[0], kClockMisuse);
      if (clocky(r)) fail(e.args[1], kClockMisuse);
      if (!boolish(l) || !boolish(r))
        fail(e, std::string("type mismatch: '") + std::string(to_string(e.bop)) + "' on " +
                    type_name(boolish(l) ? r : l));
      return (l == T::Formula || r == T::Formula) ? T::Formula : T::Bool;
  }
  fail(e, "unknown operator");
}

}  // namespace

Type typecheck_or_throw(Expr& e, const Scope& scope) {
  T t = check(e, scope);
  if (clocky(t)) fail(e, kClockMisuse);
  return (t == T::Int) ? Type::Int : Type::Bool;
}

std::variant<Type, Diagnostic> typecheck(Expr& e, const Scope& scope) {
  try {
    return typecheck_or_throw(e, scope);
  } catch (const CompileError& err) {
    return err.diagnostic();
  }
}

void typecheck_update(Update& u, const Scope& scope) {
  for (auto& s : u) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        Expr& tgt = s.target;
        if (tgt.kind != Expr::Kind::Name && tgt.kind != Expr::Kind::Index &&
            tgt.kind != Expr::Kind::Member)
          throw CompileError(tgt.span, "assignment target is not a variable");
        if (tgt.kind == Expr::Kind::Name) {
          const Symbol* sym = scope.find(tgt.name);
          if (sym && sym->kind == RefKind::Clock) {
            apply_symbol(tgt, *sym);
            s.clock_reset = true;
            if (mentions_clock(s.value)) {
              (void)check(s.value, scope);
              throw CompileError(s.value.span, kClockMisuse);
            }
            Type vt = typecheck_or_throw(s.value, scope);
            auto c = constant_value(s.value);
            if (vt != Type::Int || !c || *c < 0)
              throw CompileError(s.value.span, "clock reset must assign a non-negative constant");
            break;
          }
        }
        T tt = check(tgt, scope);
        if (tgt.ref.kind == RefKind::Clock) throw CompileError(tgt.span, "clock reset must be a plain clock name");
        if (tgt.ref.kind != RefKind::Var)
          throw CompileError(tgt.span, "cannot assign to '" + to_string(tgt) + "'");
        T vt = check(s.value, scope);
        if (clocky(vt) || vt == T::Formula) throw CompileError(s.value.span, kClockMisuse);
        if (vt != tt)
          throw CompileError(s.value.span, std::string("type mismatch: assigning ") + type_name(vt) +
                                               " to " + type_name(tt));
        break;
      }
      case Stmt::Kind::If: {
        T ct = check(s.cond, scope);
        if (ct == T::Formula || clocky(ct)) throw CompileError(s.cond.span, kClockMisuse);
        if (ct != T::Bool) throw CompileError(s.cond.span, "type mismatch: condition must be bool");
        typecheck_update(s.then_body, scope);
        typecheck_update(s.else_body, scope);
        break;
      }
      case Stmt::Kind::Call: {
        auto m = scope.find_macro(s.callee);
        if (!m) throw CompileError(s.span, "unknown macro '" + s.callee + "'");
        s.macro = *m;
        break;
      }
    }
  }
}

bool mentions_clock(const Expr& e) {
  if (e.ref.kind == RefKind::Clock) return true;
  for (const auto& a : e.args)
    if (mentions_clock(a)) return true;
  return false;
}

std::optional<int64_t> constant_value(const Expr& e) {
  try {
    switch (e.kind) {
      case Expr::Kind::IntLit: case Expr::Kind::BoolLit: return e.value;
      case Expr::Kind::Name:
        if (e.ref.kind == RefKind::Const) return e.ref.value;
        return std::nullopt;
      case Expr::Kind::Unary:
      case Expr::Kind::Binary: {
        for (const auto& a : e.args)
          if (!constant_value(a)) return std::nullopt;
        if (e.clock_atom) return std::nullopt;
        return eval_int(e, EvalContext{});
      }
      default: return std::nullopt;
    }
  } catch (const EvalError&) {
    return std::nullopt;
  }
}

void substitute(Expr& e, const std::string& name, int64_t value) {
  if (e.kind == Expr::Kind::Name && e.name == name) {
    SourceSpan s = e.span;
    e = Expr::int_lit(value, s);
    return;
  }
  for (auto& a : e.args) substitute(a, name, value);
}

void substitute(Update& u, const std::string& name, int64_t value) {
  for (auto& s : u) {
    substitute(s.target, name, value);
    substitute(s.value, name, value);
    substitute(s.cond, name, value);
    substitute(s.then_body, name, value);
    substitute(s.else_body, name, value);
  }
}

// ---------------------------------------------------------------------------
// Evaluation

std::size_t EnvHash::operator()(const Env& e) const {
  uint64_t h = 1469598103934665603ull;
  for (int64_t v : e.slots) {
    h ^= static_cast<uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

namespace {

int64_t checked(BinaryOp op, int64_t a, int64_t b) {
  int64_t r = 0;
  switch (op) {
    case BinaryOp::Add:
      if (__builtin_add_overflow(a, b, &r)) throw EvalError("integer overflow");
      return r;
    case BinaryOp::Sub:
      if (__builtin_sub_overflow(a, b, &r)) throw EvalError("integer overflow");
      return r;
    case BinaryOp::Mul:
      if (__builtin_mul_overflow(a, b, &r)) throw EvalError("integer overflow");
      return r;
    case BinaryOp::Div:
    case BinaryOp::Mod:
      if (b == 0) throw EvalError("division by zero");
      if (a == std::numeric_limits<int64_t>::min() && b == -1) throw EvalError("integer overflow");
      return op == BinaryOp::Div ? a / b : a % b;
    default: break;
  }
  return 0;
}

double clock_side(const Expr& e, const EvalContext& ctx);

int64_t ev(const Expr& e, const EvalContext& ctx) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
    case Expr::Kind::BoolLit: return e.value;
    case Expr::Kind::Name:
    case Expr::Kind::Member:
      switch (e.ref.kind) {
        case RefKind::Const: return e.ref.value;
        case RefKind::Var: return ctx.vars[static_cast<std::size_t>(e.ref.index)];
        case RefKind::Select: return ctx.select[static_cast<std::size_t>(e.ref.index)];
        case RefKind::Location:
          if (ctx.locations.empty()) throw EvalError("location vector unavailable");
          return ctx.locations[static_cast<std::size_t>(e.ref.index)] == e.ref.length ? 1 : 0;
        case RefKind::Clock: throw EvalError(kClockMisuse);
        case RefKind::None: throw EvalError("unresolved name '" + e.name + "'");
      }
      return 0;
    case Expr::Kind::Index: {
      int64_t i = ev(e.args[0], ctx);
      if (i < 0 || i >= e.ref.length) throw EvalError("index out of bounds");
      return ctx.vars[static_cast<std::size_t>(e.ref.index + i)];
    }
    case Expr::Kind::Unary: {
      int64_t v = ev(e.args[0], ctx);
      if (e.uop == UnaryOp::Not) return v ? 0 : 1;
      if (v == std::numeric_limits<int64_t>::min()) throw EvalError("integer overflow");
      return -v;
    }
    case Expr::Kind::Binary: break;
  }

  if (e.clock_atom) {
    if (ctx.clocks.empty()) throw EvalError("clock valuation unavailable");
    double a = clock_side(e.args[0], ctx);
    double b = clock_side(e.args[1], ctx);
    switch (e.bop) {
      case BinaryOp::Lt: return a < b - kClockEpsilon;
      case BinaryOp::Le: return a <= b + kClockEpsilon;
      case BinaryOp::Eq: return std::fabs(a - b) <= kClockEpsilon;
      case BinaryOp::Ne: return std::fabs(a - b) > kClockEpsilon;
      case BinaryOp::Ge: return a >= b - kClockEpsilon;
      case BinaryOp::Gt: return a > b + kClockEpsilon;
      default: throw EvalError("malformed clock constraint");
    }
  }

  switch (e.bop) {
    case BinaryOp::And: return ev(e.args[0], ctx) && ev(e.args[1], ctx);
    case BinaryOp::Or: return ev(e.args[0], ctx) || ev(e.args[1], ctx);
    case BinaryOp::Imply: return !ev(e.args[0], ctx) || ev(e.args[1], ctx);
    default: break;
  }
  int64_t a = ev(e.args[0], ctx);
  int64_t b = ev(e.args[1], ctx);
  switch (e.bop) {
    case BinaryOp::Lt: return a < b;
    case BinaryOp::Le: return a <= b;
    case BinaryOp::Eq: return a == b;
    case BinaryOp::Ne: return a != b;
    case BinaryOp::Ge: return a >= b;
    case BinaryOp::Gt: return a > b;
    default: return checked(e.bop, a, b);
  }
}

double clock_side(const Expr& e, const EvalContext& ctx) {
  if (e.ref.kind == RefKind::Clock && (e.kind == Expr::Kind::Name || e.kind == Expr::Kind::Member))
    return ctx.clocks[static_cast<std::size_t>(e.ref.index)];
  if (e.kind == Expr::Kind::Binary && e.bop == BinaryOp::Sub && mentions_clock(e))
    return clock_side(e.args[0], ctx) - clock_side(e.args[1], ctx);
  return static_cast<double>(ev(e, ctx));
}

bool stmt_relevant(const Stmt& s, const ExecContext& ctx);

bool body_relevant(const Update& u, const ExecContext& ctx) {
  for (const auto& s : u)
    if (stmt_relevant(s, ctx)) return true;
  return false;
}

bool stmt_relevant(const Stmt& s, const ExecContext& ctx) {
  switch (s.kind) {
    case Stmt::Kind::Assign:
      return s.clock_reset || (*ctx.relevant)[static_cast<std::size_t>(s.target.ref.index)];
    case Stmt::Kind::If: return body_relevant(s.then_body, ctx) || body_relevant(s.else_body, ctx);
    case Stmt::Kind::Call:
      return body_relevant(ctx.macros[static_cast<std::size_t>(s.macro)], ctx);
  }
  return true;
}

void exec_stmt(const Stmt& s, Env& env, const ExecContext& ctx, std::vector<ClockReset>* resets) {
  EvalContext ec{env.slots, ctx.select, ctx.locations, {}};
  switch (s.kind) {
    case Stmt::Kind::Assign: {
      if (s.clock_reset) {
        if (resets) resets->push_back({s.target.ref.index, ev(s.value, ec)});
        return;
      }
      if (ctx.relevant && !(*ctx.relevant)[static_cast<std::size_t>(s.target.ref.index)]) return;
      int64_t slot = s.target.ref.index;
      if (s.target.kind == Expr::Kind::Index) {
        int64_t i = ev(s.target.args[0], ec);
        if (i < 0 || i >= s.target.ref.length) throw EvalError("index out of bounds");
        slot += i;
      }
      int64_t v = ev(s.value, ec);
      if (s.target.ref.type == Type::Bool) v = v != 0;
      env.slots[static_cast<std::size_t>(slot)] = v;
      return;
    }
    case Stmt::Kind::If: {
      if (ctx.relevant && !stmt_relevant(s, ctx)) return;
      const Update& branch = ev(s.cond, ec) ? s.then_body : s.else_body;
      for (const auto& st : branch) exec_stmt(st, env, ctx, resets);
      return;
    }
    case Stmt::Kind::Call: {
      if (s.macro < 0 || static_cast<std::size_t>(s.macro) >= ctx.macros.size())
        throw EvalError("unknown macro '" + s.callee + "'");
      for (const auto& st : ctx.macros[static_cast<std::size_t>(s.macro)]) exec_stmt(st, env, ctx, resets);
      return;
    }
  }
}

}  // namespace

Value eval_expr(const Expr& e, const EvalContext& ctx) {
  int64_t v = ev(e, ctx);
  bool is_bool = e.kind == Expr::Kind::BoolLit || e.clock_atom ||
                 ((e.kind == Expr::Kind::Name || e.kind == Expr::Kind::Index || e.kind == Expr::Kind::Member) &&
                  (e.ref.kind == RefKind::Location || (e.ref.kind == RefKind::Var && e.ref.type == Type::Bool))) ||
                 (e.kind == Expr::Kind::Unary && e.uop == UnaryOp::Not) ||
                 (e.kind == Expr::Kind::Binary &&
                  (is_comparison(e.bop) || e.bop == BinaryOp::And || e.bop == BinaryOp::Or ||
                   e.bop == BinaryOp::Imply));
  return Value{is_bool ? Type::Bool : Type::Int, v};
}

int64_t eval_int(const Expr& e, const EvalContext& ctx) { return ev(e, ctx); }

bool eval_bool(const Expr& e, const EvalContext& ctx) { return ev(e, ctx) != 0; }

void exec_update(const Update& u, Env& env, const ExecContext& ctx, std::vector<ClockReset>* resets) {
  for (const auto& s : u) exec_stmt(s, env, ctx, resets);
}

Env exec_update(const Update& u, const Env& env, const ExecContext& ctx) {
  Env out = env;
  exec_update(u, out, ctx, nullptr);
  return out;
}

}  // namespace tachyon
