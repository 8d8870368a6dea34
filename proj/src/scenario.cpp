#include "railsafe/scenario.hpp"

#include <algorithm>
#include <set>

namespace railsafe {

std::string_view to_string(ParameterId p) {
  switch (p) {
    case ParameterId::geographical_principle: return "geographical-principle";
    case ParameterId::risks: return "risks";
    case ParameterId::risk_linked_functions: return "risk-linked-functions";
    case ParameterId::geographical_areas: return "geographical-areas";
    case ParameterId::actors: return "actors";
    case ParameterId::incidental_functions: return "incidental-functions";
    case ParameterId::summarized_failures: return "summarized-failures";
    case ParameterId::interim_solutions: return "interim-solutions";
  }
  return "";
}

std::optional<ParameterId> parse_parameter(std::string_view text) {
  for (auto p : kAllParameters) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

std::string_view anchor_concept(ParameterId p) {
  switch (p) {
    case ParameterId::geographical_principle: return "geographical-principle";
    case ParameterId::risks: return "risk";
    case ParameterId::risk_linked_functions: return "risk-linked-function";
    case ParameterId::geographical_areas: return "geographical-area";
    case ParameterId::actors: return "actor";
    case ParameterId::incidental_functions: return "incidental-function";
    case ParameterId::summarized_failures: return "summarized-failure";
    case ParameterId::interim_solutions: return "interim-solution";
  }
  return "";
}

bool is_valid_code(std::string_view code) {
  if (code.size() < 3) return false;
  auto upper = [](char c) { return c >= 'A' && c <= 'Z'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!upper(code[0]) || !upper(code[1])) return false;
  return std::all_of(code.begin() + 2, code.end(), digit);
}

const std::string& selection_key(const Selection& s) {
  return std::visit(
      [](const auto& v) -> const std::string& {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, ValueSelection>) return v.instance;
        else return v.code;
      },
      s);
}

bool is_key_concept(const Selection& s) {
  return std::visit([](const auto& v) { return v.key_concept; }, s);
}

const std::vector<Selection>& ScenarioSheet::at(ParameterId p) const {
  static const std::vector<Selection> empty;
  auto it = selections.find(p);
  return it == selections.end() ? empty : it->second;
}

std::vector<AttributeSchema> default_schema(const Ontology& o) {
  std::vector<std::string> missing;
  std::vector<AttributeSchema> out;
  for (auto p : kAllParameters) {
    std::string anchor(anchor_concept(p));
    if (!o.has_concept(anchor)) {
      missing.push_back(anchor);
      continue;
    }
    AttributeSchema s{p, anchor};
    s.cardinality = p == ParameterId::geographical_principle ? Cardinality::single : Cardinality::multiple;
    s.allows_numeric = p == ParameterId::actors;
    s.allows_coded_entry = p == ParameterId::summarized_failures || p == ParameterId::interim_solutions;
    out.push_back(std::move(s));
  }
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw Error(ErrorCode::missing_anchor, "ontology lacks anchor concept(s): " + names, missing);
  }
  return out;
}

namespace {

// Parameters whose chosen values carry key-concept stars on the reference sheet.
bool normally_starred(ParameterId p) {
  return p != ParameterId::summarized_failures && p != ParameterId::interim_solutions;
}

}  // namespace

ValidationReport validate_sheet(const ScenarioSheet& sheet, const std::vector<AttributeSchema>& schema,
                                const Ontology& o) {
  ValidationReport report;
  if (sheet.narrative.empty()) report.warning("narrative", "empty-narrative", "scenario has no narrative");

  for (auto p : kAllParameters) {
    std::string subject(to_string(p));
    auto sit = std::find_if(schema.begin(), schema.end(), [&](const AttributeSchema& s) { return s.parameter == p; });
    if (sit == schema.end()) {
      report.error(subject, "no-schema", "no attribute schema for parameter " + subject);
      continue;
    }
    const AttributeSchema& s = *sit;
    const auto& list = sheet.at(p);
    if (list.empty()) {
      report.error(subject, "missing-parameter", "parameter " + subject + " has no selected value");
      continue;
    }
    if (s.cardinality == Cardinality::single && list.size() > 1) {
      report.error(subject, "cardinality",
                   "parameter " + subject + " accepts one value, got " + std::to_string(list.size()));
    }

    std::set<std::string> legal;
    if (o.has_concept(s.concept_id)) {
      for (const auto& i : o.instances_of(s.concept_id, true)) legal.insert(i.id);
    }

    std::set<std::string> seen;
    bool any_key = false;
    for (const auto& sel : list) {
      const auto& key = selection_key(sel);
      if (!seen.insert(key).second) {
        report.error(subject, "duplicate-value", "value '" + key + "' selected twice");
        continue;
      }
      any_key = any_key || is_key_concept(sel);
      if (const auto* v = std::get_if<ValueSelection>(&sel)) {
        if (!o.has_instance(v->instance)) {
          report.error(subject, "unknown-value", "'" + v->instance + "' is not an ontology instance");
          continue;
        }
        if (!legal.count(v->instance)) {
          report.error(subject, "out-of-anchor",
                       "'" + v->instance + "' is not an instance of " + s.concept_id + " or its subconcepts");
          continue;
        }
        if (v->numeric_qualifier) {
          if (!s.allows_numeric) {
            report.error(subject, "numeric-not-allowed", "parameter " + subject + " takes no numeric qualifier");
          } else if (*v->numeric_qualifier < 0) {
            report.error(subject, "negative-qualifier", "qualifier on '" + v->instance + "' is negative");
          }
        }
      } else {
        const auto& c = std::get<CodedEntry>(sel);
        if (!s.allows_coded_entry) {
          report.error(subject, "coded-not-allowed", "parameter " + subject + " does not take coded entries");
        } else if (!is_valid_code(c.code)) {
          report.error(subject, "invalid-code", "'" + c.code + "' is not a code of the form AA99");
        } else if (c.description.empty()) {
          report.error(subject, "empty-description", "code " + c.code + " has no description");
        } else if (o.has_instance(c.code) && !legal.count(c.code)) {
          report.error(subject, "out-of-anchor",
                       "code " + c.code + " is registered outside " + s.concept_id);
        }
      }
    }
    if (!any_key && normally_starred(p)) {
      report.warning(subject, "no-key-concept", "no value of " + subject + " is flagged as a key concept");
    }
  }
  return report;
}

std::vector<std::pair<ParameterId, Selection>> key_concepts(const ScenarioSheet& sheet) {
  std::vector<std::pair<ParameterId, Selection>> out;
  for (auto p : kAllParameters) {
    for (const auto& sel : sheet.at(p)) {
      if (is_key_concept(sel)) out.emplace_back(p, sel);
    }
  }
  return out;
}

namespace {

std::map<std::string, const Selection*> keyed(const std::vector<Selection>& list, ParameterId p) {
  std::map<std::string, const Selection*> out;
  for (const auto& s : list) {
    if (!out.emplace(selection_key(s), &s).second) {
      throw Error(ErrorCode::schema_mismatch, "parameter " + std::string(to_string(p)) + " lists '" +
                                                  selection_key(s) + "' twice; difference is ambiguous");
    }
  }
  return out;
}

}  // namespace

SheetDiff diff_sheets(const ScenarioSheet& a, const ScenarioSheet& b) {
  SheetDiff diff;
  for (auto p : kAllParameters) {
    auto ka = keyed(a.at(p), p);
    auto kb = keyed(b.at(p), p);
    ParameterDiff d;
    for (const auto& s : b.at(p)) {
      auto it = ka.find(selection_key(s));
      if (it == ka.end()) d.added.push_back(s);
      else if (!(*it->second == s)) d.changed.push_back({*it->second, s});
    }
    for (const auto& s : a.at(p)) {
      if (!kb.count(selection_key(s))) d.removed.push_back(s);
    }
    if (!d.empty()) diff.parameters.emplace(p, std::move(d));
  }
  return diff;
}

ScenarioSheet apply_diff(const ScenarioSheet& a, const SheetDiff& diff) {
  ScenarioSheet out = a;
  for (const auto& [p, d] : diff.parameters) {
    auto& list = out.selections[p];
    for (const auto& r : d.removed) {
      std::erase_if(list, [&](const Selection& s) { return selection_key(s) == selection_key(r); });
    }
    for (const auto& c : d.changed) {
      for (auto& s : list) {
        if (selection_key(s) == selection_key(c.before)) s = c.after;
      }
    }
    list.insert(list.end(), d.added.begin(), d.added.end());
    if (list.empty()) out.selections.erase(p);
  }
  return out;
}

bool selection_equal(const ScenarioSheet& a, const ScenarioSheet& b) {
  for (auto p : kAllParameters) {
    const auto& la = a.at(p);
    const auto& lb = b.at(p);
    if (la.size() != lb.size()) return false;
    for (const auto& s : la) {
      if (std::count(la.begin(), la.end(), s) != std::count(lb.begin(), lb.end(), s)) return false;
    }
  }
  return true;
}

std::vector<Instance> unregistered_codes(const ScenarioSheet& sheet, const std::vector<AttributeSchema>& schema,
                                         const Ontology& o) {
  std::vector<Instance> out;
  std::set<std::string> taken;
  for (const auto& s : schema) {
    if (!s.allows_coded_entry) continue;
    for (const auto& sel : sheet.at(s.parameter)) {
      const auto* c = std::get_if<CodedEntry>(&sel);
      if (!c || !is_valid_code(c->code) || c->description.empty()) continue;
      if (o.has_instance(c->code) || !taken.insert(c->code).second) continue;
      Instance inst;
      inst.id = c->code;
      inst.label = c->description;
      inst.concept_id = s.concept_id;
      inst.note = "registered from scenario " + sheet.scenario_id;
      out.push_back(std::move(inst));
    }
  }
  return out;
}

}  // namespace railsafe
