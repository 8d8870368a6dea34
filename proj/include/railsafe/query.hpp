#pragma once

// Consultation query language.
//
//   query := expr? ;  expr := or ;  or := and ("or" and)* ;  and := not ("and" not)* ;
//   not   := "not" not | atom | "(" expr ")" ;
//   atom  := param ("has" | "isa") string | "actors.trains" cmp int | "has" "critical"
//          | "status" "is" ident | "system" "is" string ;
//
// `has` matches a selected value literally (instance id or code, or an
// instance whose label matches ignoring case); `isa` expands a concept to all
// instances below it. The empty query matches every scenario.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "railsafe/archive.hpp"
#include "railsafe/ontology.hpp"

namespace railsafe::query {

enum class CompareOp { eq, ne, lt, le, gt, ge };

std::string_view to_string(CompareOp op);
bool compare(long long lhs, CompareOp op, long long rhs);

struct Atom {
  enum class Kind { param_has, param_isa, actor_count, has_critical, status_is, system_is };
  Kind kind = Kind::has_critical;
  ParameterId parameter = ParameterId::risks;  ///< param_has / param_isa
  std::string term;                            ///< param_has / param_isa / system_is
  CompareOp op = CompareOp::eq;                ///< actor_count
  long long count = 0;                         ///< actor_count
  Status status = Status::draft;               ///< status_is

  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Expr {
  enum class Kind { atom, all_of, any_of, negate };
  Kind kind = Kind::atom;
  Atom atom;
  std::vector<Expr> operands;

  static Expr make_atom(Atom a);
  static Expr all_of(std::vector<Expr> operands);
  static Expr any_of(std::vector<Expr> operands);
  static Expr negate(Expr operand);

  friend bool operator==(const Expr&, const Expr&) = default;
};

enum class Projection { ids, summaries, full };

std::string_view to_string(Projection p);
std::optional<Projection> parse_projection(std::string_view text);

struct QueryAst {
  /// Empty means match-all.
  std::optional<Expr> root;
  Projection projection = Projection::ids;

  friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

/// Total: returns an AST or throws syntax_error / unknown_parameter with the
/// line and column of the offending token; syntax errors list the expected
/// tokens in Error::details().
QueryAst parse_query(std::string_view text);

/// Canonical text; parse_query(print_query(ast)) == ast for n-ary connectives
/// with at least two operands.
std::string print_query(const QueryAst& ast);
std::string print_atom(const Atom& atom);

struct QueryStats {
  std::size_t documents_scanned = 0;
  std::size_t index_hits = 0;
};

struct QueryResult {
  std::vector<std::string> ids;
  std::vector<ScenarioSummary> summaries;    ///< Projection::summaries
  std::vector<ScenarioDocument> documents;   ///< Projection::full
  QueryStats stats;
};

struct EvaluateOptions {
  /// Ignore the index and test every document directly.
  bool force_scan = false;
};

/// Throws unknown_concept when an `isa` term names neither a concept nor an
/// instance; storage errors propagate.
QueryResult evaluate(const QueryAst& ast, const Archive& archive, const Ontology& o,
                     const EvaluateOptions& options = {});

struct AtomExplanation {
  std::string atom;
  std::vector<std::string> expansion;
  bool index_served = false;
};

struct Explanation {
  std::vector<AtomExplanation> atoms;
};

Explanation explain(const QueryAst& ast, const Ontology& o);

/// Instance ids and codes an atom accepts under its parameter.
std::vector<std::string> expand_term(const Atom& atom, const Ontology& o);

/// Direct per-document test shared by the scan path.
bool matches(const Expr& e, const ScenarioDocument& doc, const Ontology& o);

}  // namespace railsafe::query
