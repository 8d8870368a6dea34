#pragma once

// JSON wire format. Documents map field-for-field onto the XML dialect, with
// the same element and attribute names used as keys.

#include <json.hpp>

#include "railsafe/archive.hpp"
#include "railsafe/critical.hpp"
#include "railsafe/document.hpp"
#include "railsafe/error.hpp"
#include "railsafe/findings.hpp"
#include "railsafe/ontology.hpp"
#include "railsafe/query.hpp"

namespace railsafe::json_codec {

using json = nlohmann::json;

json to_json(const ScenarioDocument& doc);
/// Throws parse_error naming the offending field. Missing timestamps decode
/// as the epoch so the archive stamps them on save.
ScenarioDocument document_from_json(const json& j);

json to_json(const petri::Marking& m);
petri::Marking marking_from_json(const json& j, std::string_view field);
json to_json(const petri::SequencingTable& t);
json to_json(const petri::Truncation& t);
json to_json(const petri::CriticalSearch& s);

json to_json(const std::vector<TreeNode>& forest);
json to_json(const Instance& i);
json to_json(const ScenarioSummary& s);
json to_json(const ValidationReport& r);
json to_json(const Error& e);
json to_json(const query::QueryResult& r, query::Projection projection);
json to_json(const query::Explanation& e);

petri::ExplorationBounds bounds_from_json(const json& j, petri::ExplorationBounds defaults);

}  // namespace railsafe::json_codec
