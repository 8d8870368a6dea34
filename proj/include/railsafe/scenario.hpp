#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "railsafe/findings.hpp"
#include "railsafe/ontology.hpp"

namespace railsafe {

/// The eight fact-sheet parameters, in sheet order.
enum class ParameterId {
  geographical_principle,
  risks,
  risk_linked_functions,
  geographical_areas,
  actors,
  incidental_functions,
  summarized_failures,
  interim_solutions,
};

inline constexpr std::array<ParameterId, 8> kAllParameters = {
    ParameterId::geographical_principle, ParameterId::risks,
    ParameterId::risk_linked_functions,  ParameterId::geographical_areas,
    ParameterId::actors,                 ParameterId::incidental_functions,
    ParameterId::summarized_failures,    ParameterId::interim_solutions,
};

std::string_view to_string(ParameterId p);
std::optional<ParameterId> parse_parameter(std::string_view text);
/// Ontology concept whose instances are the legal values of `p` in the seed ontology.
std::string_view anchor_concept(ParameterId p);

enum class Cardinality { single, multiple };

struct AttributeSchema {
  ParameterId parameter;
  std::string concept_id;
  Cardinality cardinality = Cardinality::multiple;
  bool allows_numeric = false;
  bool allows_coded_entry = false;
};

struct ValueSelection {
  std::string instance;
  bool key_concept = false;
  std::optional<long long> numeric_qualifier;

  friend bool operator==(const ValueSelection&, const ValueSelection&) = default;
};

/// Open-ended failure or solution code such as `OO26`.
struct CodedEntry {
  std::string code;
  std::string description;
  bool key_concept = false;

  friend bool operator==(const CodedEntry&, const CodedEntry&) = default;
};

bool is_valid_code(std::string_view code);

using Selection = std::variant<ValueSelection, CodedEntry>;

/// Identity of a selection within its parameter: instance id or code.
const std::string& selection_key(const Selection& s);
bool is_key_concept(const Selection& s);

struct ScenarioSheet {
  std::string scenario_id;
  std::string title;
  std::string narrative;
  std::string transport_system;
  std::map<ParameterId, std::vector<Selection>> selections;

  const std::vector<Selection>& at(ParameterId p) const;

  friend bool operator==(const ScenarioSheet&, const ScenarioSheet&) = default;
};

/// One schema per parameter bound to the ontology. Throws missing_anchor
/// naming every absent anchor concept.
std::vector<AttributeSchema> default_schema(const Ontology& o);

/// Never throws; malformed input yields error findings.
ValidationReport validate_sheet(const ScenarioSheet& sheet, const std::vector<AttributeSchema>& schema,
                                const Ontology& o);

std::vector<std::pair<ParameterId, Selection>> key_concepts(const ScenarioSheet& sheet);

struct ChangedSelection {
  Selection before;
  Selection after;

  friend bool operator==(const ChangedSelection&, const ChangedSelection&) = default;
};

struct ParameterDiff {
  std::vector<Selection> added;
  std::vector<Selection> removed;
  std::vector<ChangedSelection> changed;

  bool empty() const { return added.empty() && removed.empty() && changed.empty(); }
  friend bool operator==(const ParameterDiff&, const ParameterDiff&) = default;
};

struct SheetDiff {
  std::map<ParameterId, ParameterDiff> parameters;

  bool empty() const { return parameters.empty(); }
};

/// Selection-level difference keyed by instance id or code. Throws
/// schema_mismatch when a parameter lists the same key twice, because the
/// difference is then ambiguous.
SheetDiff diff_sheets(const ScenarioSheet& a, const ScenarioSheet& b);
/// Applies a difference produced by diff_sheets; apply_diff(a, diff_sheets(a, b))
/// is selection-equal to b.
ScenarioSheet apply_diff(const ScenarioSheet& a, const SheetDiff& diff);
/// Same selections per parameter irrespective of order.
bool selection_equal(const ScenarioSheet& a, const ScenarioSheet& b);

/// Coded entries not yet present in the ontology, as instances attached to
/// their parameter's anchor concept.
std::vector<Instance> unregistered_codes(const ScenarioSheet& sheet, const std::vector<AttributeSchema>& schema,
                                         const Ontology& o);

}  // namespace railsafe
