#pragma once

// Timed-automata networks: the source-level declarations produced by the
// parser and the compiled, instantiated form consumed by the engines.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tachyon/dbm.hpp"
#include "tachyon/diagnostic.hpp"
#include "tachyon/expr.hpp"

namespace tachyon {

enum class LocationKind { Normal, Urgent, Committed };

// ---------------------------------------------------------------------------
// Source declarations

struct ConstDecl {
  std::string name;
  Expr value;
  SourceSpan span;
  bool operator==(const ConstDecl&) const = default;
};

struct ClockDecl {
  std::string name;
  SourceSpan span;
  bool operator==(const ClockDecl&) const = default;
};

struct VarDecl {
  std::string name;
  Type type = Type::Int;
  std::optional<Expr> size;   // arrays
  std::optional<Expr> init;
  SourceSpan span;
  bool operator==(const VarDecl&) const = default;
};

struct ChanDecl {
  std::string name;
  bool broadcast = false;
  std::optional<Expr> size;
  SourceSpan span;
  bool operator==(const ChanDecl&) const = default;
};

struct MacroDecl {
  std::string name;
  Update body;
  SourceSpan span;
  bool operator==(const MacroDecl&) const = default;
};

struct Declarations {
  std::vector<ConstDecl> consts;
  std::vector<ClockDecl> clocks;
  std::vector<VarDecl> vars;
  std::vector<ChanDecl> chans;
  std::vector<MacroDecl> macros;
  bool operator==(const Declarations&) const = default;
};

struct LocationDecl {
  std::string name;
  LocationKind kind = LocationKind::Normal;
  bool branchpoint = false;
  bool initial = false;
  std::optional<Expr> invariant;
  std::optional<Expr> exit_weight;
  SourceSpan span;
  bool operator==(const LocationDecl&) const = default;
};

struct SelectDecl {
  std::string name;
  Expr lo;
  Expr hi;
  SourceSpan span;
  bool operator==(const SelectDecl&) const = default;
};

enum class SyncKind { None, Send, Receive };

struct SyncDecl {
  std::string channel;
  std::optional<Expr> index;
  SyncKind kind = SyncKind::Send;
  SourceSpan span;
  bool operator==(const SyncDecl&) const = default;
};

struct EdgeDecl {
  std::string source;
  std::string target;
  std::vector<SelectDecl> selects;
  std::optional<Expr> guard;
  std::optional<SyncDecl> sync;
  Update update;
  bool controllable = false;
  std::optional<Expr> weight;
  SourceSpan span;
  bool operator==(const EdgeDecl&) const = default;
};

struct Param {
  std::string name;
  SourceSpan span;
  bool operator==(const Param&) const = default;
};

struct TemplateDecl {
  std::string name;
  std::vector<Param> params;
  Declarations locals;   // consts, clocks, vars only
  std::vector<LocationDecl> locations;
  std::vector<EdgeDecl> edges;
  SourceSpan span;
  bool operator==(const TemplateDecl&) const = default;
};

struct InstanceDecl {
  std::string template_name;
  std::vector<Expr> args;
  bool call = false;   // written `T()` rather than `T`
  SourceSpan span;
  bool operator==(const InstanceDecl&) const = default;
};

struct ModelAst {
  Declarations globals;
  std::vector<TemplateDecl> templates;
  std::vector<InstanceDecl> system;
  bool operator==(const ModelAst&) const = default;
};

/// Display name of an instance: `T` without arguments, `T(a, b)` otherwise.
std::string instance_name(const std::string& templ, const std::vector<int64_t>& args);

/// Template with parameters replaced by literals.
struct AutomatonInstance {
  std::string name;
  std::string template_name;
  std::vector<int64_t> args;
  TemplateDecl body;
  bool operator==(const AutomatonInstance&) const = default;
};

/// Substitutes `args` for the template parameters. Throws CompileError
/// "arity mismatch".
AutomatonInstance instantiate(const TemplateDecl& t, const std::vector<int64_t>& args, const std::string& name);

// ---------------------------------------------------------------------------
// Compiled network

/// Normalized clock atom `x_i - x_j op c` (j == 0 for single-clock atoms).
struct AtomForm {
  int i = 0;
  int j = 0;
  BinaryOp op = BinaryOp::Le;
  int64_t c = 0;
};

/// Decomposes a resolved clock comparison. Throws CompileError when the bound
/// is not constant.
AtomForm decompose_atom(const Expr& atom);

/// Conjunction of DBM constraints equivalent to `atom` (or to its negation).
/// `!=` and negated `==` produce two alternatives.
std::vector<std::vector<Constraint>> atom_constraints(const AtomForm& a, bool negated);

struct Location {
  std::string name;
  LocationKind kind = LocationKind::Normal;
  bool branchpoint = false;
  std::vector<Constraint> invariant;
  Expr invariant_expr;       // true literal when absent
  int64_t exit_weight = 1;
  std::vector<int> out;      // outgoing edge indices

  bool committed() const { return kind == LocationKind::Committed || branchpoint; }
  bool urgent() const { return kind != LocationKind::Normal || branchpoint; }
};

struct Select {
  std::string name;
  int64_t lo = 0;
  int64_t hi = 0;
};

struct Edge {
  int source = 0;
  int target = 0;
  std::vector<Select> selects;
  std::vector<Constraint> clock_guard;
  Expr clock_guard_expr;     // conjunction of the clock atoms, for display
  Expr data_guard;           // true literal when absent
  bool has_data_guard = false;
  SyncKind sync = SyncKind::None;
  int channel = -1;          // index into TANetwork::channels
  Expr channel_index;        // resolved index expression (int literal 0 for scalars)
  Update update;
  bool controllable = false;
  int64_t weight = 1;
  std::string label;         // `Source->Target#n`
};

struct Channel {
  std::string name;
  bool broadcast = false;
  int base = 0;              // first flattened channel id
  int64_t length = 0;        // 0 for scalars
};

struct Instance {
  std::string name;
  std::string template_name;
  std::vector<int64_t> args;
  std::vector<Location> locations;
  std::vector<Edge> edges;
  int initial = 0;
};

struct SlotInfo {
  std::string name;          // `detected`, `a[1]`, `Switch(0).x`
  Type type = Type::Int;
  int64_t init = 0;
};

struct ConcreteState {
  std::vector<int> locations;
  Env env;
  std::vector<double> clocks;   // index 0 is the reference clock, always 0
  double time = 0.0;

  bool operator==(const ConcreteState&) const = default;
};

struct TANetwork {
  ModelAst ast;

  std::vector<std::string> clock_names;   // [0] = "0"
  std::vector<SlotInfo> slots;
  std::vector<Channel> channels;
  int channel_ids = 0;
  std::vector<std::string> macro_names;
  std::vector<Update> macros;
  std::vector<Instance> instances;
  std::vector<int64_t> max_constants;     // per clock, from the model alone
  std::vector<std::pair<std::string, Symbol>> global_symbols;
  std::vector<std::vector<std::pair<std::string, Symbol>>> local_symbols;   // per instance

  int clock_count() const { return static_cast<int>(clock_names.size()); }

  /// Global names plus `Proc.Loc` / `Proc(args).member` resolution.
  std::unique_ptr<Scope> query_scope() const;

  std::optional<int> find_instance(const std::string& name) const;
  std::optional<int> find_slot(const std::string& name) const;
  std::optional<int> find_clock(const std::string& name) const;
  std::optional<int64_t> find_constant(const std::string& name) const;

  /// Structural equality of the declared model (spans ignored).
  bool operator==(const TANetwork& o) const { return ast == o.ast; }
};

/// Instantiates, resolves and validates. Diagnostics cover every violation
/// found; the network is returned only when there are none.
Parsed<TANetwork> compile_network(const ModelAst& ast);

std::vector<Diagnostic> validate_network(const TANetwork& n);

ConcreteState initial_concrete_state(const TANetwork& n);

/// Stable 64-bit FNV-1a digest.
uint64_t fnv1a(std::string_view text);

}  // namespace tachyon
