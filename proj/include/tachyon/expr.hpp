#pragma once

// Typed expression and update mini-language shared by guards, invariants,
// updates and query predicates.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tachyon/diagnostic.hpp"

namespace tachyon {

enum class Type { Int, Bool, Clock };

std::string_view to_string(Type t);

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Eq, Ne, Ge, Gt, And, Or, Imply };

bool is_comparison(BinaryOp op);
std::string_view to_string(BinaryOp op);

enum class RefKind { None, Const, Var, Clock, Select, Location };

/// Resolution of a name, filled in by typecheck.
struct Ref {
  RefKind kind = RefKind::None;
  int index = -1;       // var slot / clock index / select index / instance index
  int64_t length = 0;   // array length for vars (0 = scalar); location index for Location
  Type type = Type::Int;
  int64_t value = 0;    // constants

  bool operator==(const Ref&) const = default;
};

struct Expr {
  enum class Kind { IntLit, BoolLit, Name, Index, Unary, Binary, Member };

  Kind kind = Kind::IntLit;
  int64_t value = 0;
  std::string name;                 // Name, Index base, Member process
  std::vector<int64_t> proc_args;   // Member: `Switch(0).Open`
  bool proc_call = false;           // Member written with parentheses
  std::string member;               // Member: location or local name
  UnaryOp uop = UnaryOp::Neg;
  BinaryOp bop = BinaryOp::Add;
  std::vector<Expr> args;
  SourceSpan span;

  Ref ref;
  bool clock_atom = false;          // comparison involving clocks

  bool operator==(const Expr& o) const;

  static Expr int_lit(int64_t v, SourceSpan s = {});
  static Expr bool_lit(bool v, SourceSpan s = {});
  static Expr name_ref(std::string n, SourceSpan s = {});
  static Expr index(Expr base, Expr idx, SourceSpan s = {});
  static Expr unary(UnaryOp op, Expr e, SourceSpan s = {});
  static Expr binary(BinaryOp op, Expr l, Expr r, SourceSpan s = {});
  static Expr member_ref(std::string proc, std::vector<int64_t> args, bool call, std::string member,
                         SourceSpan s = {});
};

std::string to_string(const Expr& e);

struct Stmt;
using Update = std::vector<Stmt>;

struct Stmt {
  enum class Kind { Assign, If, Call };

  Kind kind = Kind::Assign;
  Expr target;
  Expr value;
  Expr cond;
  Update then_body;
  Update else_body;
  std::string callee;
  SourceSpan span;

  int macro = -1;          // resolved callee
  bool clock_reset = false;

  bool operator==(const Stmt& o) const;
};

std::string to_string(const Stmt& s);
std::string to_string(const Update& u, std::string_view sep = ", ");

// ---------------------------------------------------------------------------
// Name resolution

struct Symbol {
  RefKind kind = RefKind::None;
  int index = -1;
  int64_t length = 0;
  Type type = Type::Int;
  int64_t value = 0;
};

/// Lexically nested symbol table. Lookups fall through to the parent.
class Scope {
 public:
  using MemberResolver = std::function<std::optional<Symbol>(const Expr&)>;

  explicit Scope(const Scope* parent = nullptr) : parent_(parent) {}

  void define(const std::string& name, Symbol s) { symbols_[name] = s; }
  bool defines(const std::string& name) const { return symbols_.count(name) != 0; }
  const Symbol* find(std::string_view name) const;

  void set_member_resolver(MemberResolver r) { members_ = std::move(r); }
  std::optional<Symbol> resolve_member(const Expr& e) const;

  /// Names of macros, in definition order (call targets for updates).
  void define_macro(const std::string& name, int index) { macros_[name] = index; }
  std::optional<int> find_macro(std::string_view name) const;

 private:
  const Scope* parent_;
  std::unordered_map<std::string, Symbol> symbols_;
  std::unordered_map<std::string, int> macros_;
  MemberResolver members_;
};

using DeclTable = Scope;

/// Resolves names in place and computes the type. Clock comparisons are typed
/// `bool` and flagged via `Expr::clock_atom`.
std::variant<Type, Diagnostic> typecheck(Expr& e, const Scope& scope);

/// Throwing form used inside semantic passes.
Type typecheck_or_throw(Expr& e, const Scope& scope);

/// Resolves and checks a statement sequence. Clock resets must be constant and
/// non-negative; data assignments may not target clocks.
void typecheck_update(Update& u, const Scope& scope);

bool mentions_clock(const Expr& e);

/// Value of a resolved expression built only from literals and constants.
std::optional<int64_t> constant_value(const Expr& e);

/// Replaces every free occurrence of `name` with an integer literal.
void substitute(Expr& e, const std::string& name, int64_t value);
void substitute(Update& u, const std::string& name, int64_t value);

// ---------------------------------------------------------------------------
// Evaluation

struct Value {
  Type type = Type::Int;
  int64_t raw = 0;

  bool as_bool() const { return raw != 0; }
  bool operator==(const Value&) const = default;
};

struct Env {
  std::vector<int64_t> slots;

  bool operator==(const Env&) const = default;
  auto operator<=>(const Env&) const = default;
};

struct EnvHash {
  std::size_t operator()(const Env& e) const;
};

/// Raised for run-time faults: division by zero, overflow, index errors.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalContext {
  std::span<const int64_t> vars;
  std::span<const int64_t> select = {};
  std::span<const int> locations = {};
  std::span<const double> clocks = {};   // index 0 is the reference clock
};

/// Tolerance used when comparing real-valued clocks with integer bounds.
inline constexpr double kClockEpsilon = 1e-6;

Value eval_expr(const Expr& e, const EvalContext& ctx);
int64_t eval_int(const Expr& e, const EvalContext& ctx);
bool eval_bool(const Expr& e, const EvalContext& ctx);

struct ClockReset {
  int clock;
  int64_t value;
};

struct ExecContext {
  std::span<const int64_t> select = {};
  std::span<const int> locations = {};
  std::span<const Update> macros = {};
  const std::vector<char>* relevant = nullptr;  // var slots kept by sliced exploration
};

/// Executes statements in order against `env`, appending clock resets.
void exec_update(const Update& u, Env& env, const ExecContext& ctx, std::vector<ClockReset>* resets);

/// Value-returning form.
Env exec_update(const Update& u, const Env& env, const ExecContext& ctx = {});

}  // namespace tachyon
