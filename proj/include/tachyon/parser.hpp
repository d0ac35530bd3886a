#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tachyon/diagnostic.hpp"
#include "tachyon/expr.hpp"
#include "tachyon/model.hpp"

namespace tachyon {

struct Query {
  enum class Kind { Reach, Invariant, LeadsTo, StrategyMin, Estimate };

  Kind kind = Kind::Reach;
  std::string text;
  SourceSpan span;

  Expr phi;    // Reach / Invariant predicate, LeadsTo premise, StrategyMin goal
  Expr psi;    // LeadsTo conclusion

  // StrategyMin
  std::string name;
  std::string cost;
  std::vector<std::string> observed_discrete;
  std::vector<std::string> observed_continuous;

  // StrategyMin / Estimate
  Expr horizon_expr;
  int64_t horizon = 0;   // filled by resolve_query

  // Estimate
  Expr runs_expr;
  int64_t runs = 0;
  std::string mode = "max";
  Expr value;
  std::optional<std::string> under;

  bool operator==(const Query& o) const;
};

std::string to_string(const Query& q);

/// Parses a model file and compiles it. Syntax errors stop at 20 diagnostics.
Parsed<TANetwork> parse_model(std::string_view text);

/// Syntax only; no name resolution.
Parsed<ModelAst> parse_model_ast(std::string_view text);

/// One query per line; blank lines and `#` / `//` comments are skipped.
/// Lines that fail leave a diagnostic and are omitted from the list.
Parsed<std::vector<Query>> parse_queries(std::string_view text);

Parsed<Query> parse_query(std::string_view line);

/// Resolves names against the network and evaluates constant horizons.
/// Throws CompileError.
void resolve_query(Query& q, const TANetwork& n);

std::string pretty_print(const ModelAst& ast);
std::string pretty_print(const TANetwork& n);

}  // namespace tachyon
