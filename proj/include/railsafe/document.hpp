#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "railsafe/critical.hpp"
#include "railsafe/net_text.hpp"
#include "railsafe/scenario.hpp"
#include "railsafe/text.hpp"

namespace railsafe {

enum class Status { draft, validated };

std::string_view to_string(Status s);
std::optional<Status> parse_status(std::string_view text);

struct DocumentMeta {
  std::string author;
  text::Timestamp created{};
  text::Timestamp modified{};
  Status status = Status::draft;
  std::string ontology_version;

  friend bool operator==(const DocumentMeta&, const DocumentMeta&) = default;
};

/// The persisted unit: one accident scenario.
struct ScenarioDocument {
  ScenarioSheet sheet;
  std::optional<petri::NetModel> net;
  std::vector<petri::SequencingTable> tables;
  DocumentMeta meta;

  const std::string& id() const noexcept { return sheet.scenario_id; }

  friend bool operator==(const ScenarioDocument&, const ScenarioDocument&) = default;
};

/// Document-level checks that need no ontology: id well-formed, net
/// structure, tables replay against the stored net and end critical.
ValidationReport validate_structure(const ScenarioDocument& doc);

/// Full validation: structure plus the sheet against the ontology schema.
ValidationReport validate_document(const ScenarioDocument& doc, const Ontology& o);

/// Scenario ids double as file names: `[A-Za-z0-9][A-Za-z0-9._-]*`, at most 128 bytes.
bool is_valid_scenario_id(std::string_view id);

/// Canonical XML rendering; byte-stable for a given document.
std::string to_xml(const ScenarioDocument& doc);
/// Typed parse only; invariants are left to validate_structure. Throws parse_error.
ScenarioDocument parse_document_xml(std::string_view xml);
/// Throws parse_error for malformed or ill-typed content and
/// invariant_violation for values breaking type invariants (negative tokens,
/// unknown marking places, non-replaying tables).
ScenarioDocument document_from_xml(std::string_view xml);

}  // namespace railsafe
