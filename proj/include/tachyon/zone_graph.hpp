#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tachyon/dbm.hpp"
#include "tachyon/model.hpp"
#include "tachyon/transitions.hpp"

namespace tachyon {

struct SymState {
  std::vector<int> locations;
  Env env;
  Dbm zone;

  bool operator==(const SymState&) const = default;
};

struct ZoneGraphOptions {
  /// Skip assignments to variables that no guard, channel index or observed
  /// predicate depends on.
  bool slicing = true;
  std::vector<const Expr*> observed;   // query predicates, kept relevant
};

class ZoneGraph {
 public:
  explicit ZoneGraph(const TANetwork& n, ZoneGraphOptions opts = {});

  const TANetwork& network() const { return net_; }
  int dim() const { return net_.clock_count(); }

  SymState initial();

  /// Appends successors of `s` in deterministic order; `labels`, when given,
  /// receives one description per successor. Throws EvalError.
  void successors(const SymState& s, std::vector<SymState>& out, std::vector<std::string>* labels = nullptr);

  /// Max constants per clock: model, observed predicates and resets.
  const std::vector<int64_t>& max_constants() const { return k_; }
  const std::vector<char>& relevant() const { return relevant_; }
  bool slicing() const { return slicing_; }

  /// Folds predicate constants into the extrapolation bounds.
  void observe_constants(const Expr& e);

  std::string describe(const SymState& s) const;

 private:
  bool finish(SymState& s, bool delay) const;

  const TANetwork& net_;
  Transitions trans_;
  FiringSet firings_;
  std::vector<ClockReset> resets_;
  std::vector<int64_t> k_;
  std::vector<char> relevant_;
  bool slicing_;
};

/// Free-function form: all successors of `s`.
std::vector<SymState> symbolic_successors(const SymState& s, const TANetwork& n);

/// Variable slots that influence control flow; see ZoneGraphOptions::slicing.
std::vector<char> relevant_slots(const TANetwork& n, const std::vector<const Expr*>& observed);

}  // namespace tachyon
