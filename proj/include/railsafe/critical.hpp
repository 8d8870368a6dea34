#pragma once

// Critical situations: predicates over markings and the sequencing tables
// (initial marking, chronology of fired transitions, critical marking) that
// lead to them.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "railsafe/petri.hpp"

namespace railsafe::petri {

enum class Comparator { ge, le, eq };

std::string_view to_string(Comparator c);

/// Boolean combination of token-count comparisons, e.g. `seg3 >= 2 and not auth = 0`.
class CriticalPredicate {
 public:
  struct Node {
    enum class Kind { compare, all_of, any_of, negate };
    Kind kind = Kind::compare;
    std::string place;
    Comparator comparator = Comparator::ge;
    long long value = 0;
    std::vector<Node> operands;

    friend bool operator==(const Node&, const Node&) = default;
  };

  CriticalPredicate() = default;
  explicit CriticalPredicate(Node root) : root_(std::move(root)) {}

  /// Grammar: or := and ("or" and)*; and := unary ("and" unary)*;
  /// unary := "not" unary | "(" or ")" | place (">=" | "<=" | "=") integer.
  /// Throws syntax_error with the column of the offending token.
  static CriticalPredicate parse(std::string_view text);
  static CriticalPredicate compare(std::string place, Comparator c, long long value);

  bool holds(const Marking& m) const;
  /// Every place id referenced, sorted and unique.
  std::vector<std::string> places() const;
  std::string to_string() const;

  const Node& root() const noexcept { return root_; }

  friend bool operator==(const CriticalPredicate&, const CriticalPredicate&) = default;

 private:
  Node root_;
};

/// Throws unknown_place when the predicate names a place absent from `net`.
void check_predicate(const PetriNet& net, const CriticalPredicate& pred);

struct SequencingRow {
  std::string transition;
  Marking marking;
  std::string situation_label;

  friend bool operator==(const SequencingRow&, const SequencingRow&) = default;
};

struct SequencingTable {
  Marking initial;
  std::vector<SequencingRow> rows;
  bool critical = false;

  const Marking& final_marking() const { return rows.empty() ? initial : rows.back().marking; }
  std::vector<std::string> chronology() const;

  friend bool operator==(const SequencingTable&, const SequencingTable&) = default;
};

struct CriticalSearch {
  std::vector<SequencingTable> tables;
  Truncation truncated;
  std::size_t markings_explored = 0;
};

/// One table per distinct critical marking within the bounds, each carrying a
/// shortest firing sequence from `m0` (ties broken by the lexicographically
/// smallest sequence of transition ids). Tables are ordered by sequence
/// length, then lexicographically.
CriticalSearch find_critical(const PetriNet& net, const Marking& m0, const CriticalPredicate& pred,
                             const ExplorationBounds& bounds, const ExplorationControl& control = {});

/// Every repetition-free firing sequence of at most `bounds.max_depth` steps
/// that ends at its first critical marking. Meant for small nets; stops after
/// `max_tables` tables and flags truncation.
CriticalSearch find_critical_all_paths(const PetriNet& net, const Marking& m0, const CriticalPredicate& pred,
                                       const ExplorationBounds& bounds, std::size_t max_tables = 1000,
                                       const ExplorationControl& control = {});

/// Re-fires the chronology from the table's initial marking. Returns a
/// description of the first mismatch, or nullopt when every row reproduces.
std::optional<std::string> replay_mismatch(const PetriNet& net, const SequencingTable& table);

}  // namespace railsafe::petri
