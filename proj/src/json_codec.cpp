#include "railsafe/json_codec.hpp"

namespace railsafe::json_codec {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::parse_error, "field '" + field + "' " + what, {field});
}

const json* member(const json& j, std::string_view key) {
  auto it = j.find(std::string(key));
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

const json& require_object(const json& j, const std::string& field) {
  if (!j.is_object()) bad(field, "must be an object");
  return j;
}

std::string string_field(const json& j, std::string_view key, const std::string& path, bool required = false) {
  const json* v = member(j, key);
  std::string field = path + std::string(key);
  if (!v) {
    if (required) bad(field, "is required");
    return "";
  }
  if (!v->is_string()) bad(field, "must be a string");
  return v->get<std::string>();
}

bool bool_field(const json& j, std::string_view key, const std::string& path) {
  const json* v = member(j, key);
  if (!v) return false;
  if (!v->is_boolean()) bad(path + std::string(key), "must be a boolean");
  return v->get<bool>();
}

long long int_value(const json& v, const std::string& field) {
  if (!v.is_number_integer()) bad(field, "must be an integer");
  return v.get<long long>();
}

const json& array_field(const json& j, std::string_view key, const std::string& path) {
  static const json empty = json::array();
  const json* v = member(j, key);
  if (!v) return empty;
  if (!v->is_array()) bad(path + std::string(key), "must be an array");
  return *v;
}

text::Timestamp time_field(const json& j, std::string_view key, const std::string& path) {
  auto s = string_field(j, key, path);
  if (s.empty()) return {};
  auto t = text::parse_rfc3339(s);
  if (!t) bad(path + std::string(key), "is not an RFC 3339 UTC timestamp");
  return *t;
}

petri::Aspect aspect_field(const json& j, const std::string& path) {
  auto text = string_field(j, "aspect", path, true);
  auto a = petri::parse_aspect(text);
  if (!a) bad(path + "aspect", "must be external, internal or interface");
  return *a;
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]."; }

json sheet_json(const ScenarioSheet& s) {
  json params = json::object();
  for (const auto& [p, list] : s.selections) {
    json arr = json::array();
    for (const auto& sel : list) {
      if (const auto* v = std::get_if<ValueSelection>(&sel)) {
        json e = {{"instance", v->instance}, {"key", v->key_concept}};
        if (v->numeric_qualifier) e["qualifier"] = *v->numeric_qualifier;
        arr.push_back(std::move(e));
      } else {
        const auto& c = std::get<CodedEntry>(sel);
        arr.push_back({{"code", c.code}, {"description", c.description}, {"key", c.key_concept}});
      }
    }
    params[std::string(to_string(p))] = std::move(arr);
  }
  return {{"title", s.title},
          {"transport-system", s.transport_system},
          {"narrative", s.narrative},
          {"parameters", std::move(params)}};
}

ScenarioSheet sheet_from_json(const json& j, const std::string& id) {
  require_object(j, "sheet");
  ScenarioSheet s;
  s.scenario_id = id;
  s.title = string_field(j, "title", "sheet.");
  s.transport_system = string_field(j, "transport-system", "sheet.");
  s.narrative = string_field(j, "narrative", "sheet.");
  const json* params = member(j, "parameters");
  if (!params) return s;
  require_object(*params, "sheet.parameters");
  for (const auto& [name, arr] : params->items()) {
    std::string path = "sheet.parameters." + name;
    auto p = parse_parameter(name);
    if (!p) throw Error(ErrorCode::unknown_parameter, "unknown parameter '" + name + "'", {path});
    if (!arr.is_array()) bad(path, "must be an array");
    auto& list = s.selections[*p];
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto& e = require_object(arr[i], path + "[" + std::to_string(i) + "]");
      auto where = at(path, i);
      if (member(e, "code")) {
        list.emplace_back(CodedEntry{string_field(e, "code", where, true), string_field(e, "description", where),
                                     bool_field(e, "key", where)});
      } else {
        ValueSelection v{string_field(e, "instance", where, true), bool_field(e, "key", where), std::nullopt};
        if (const json* q = member(e, "qualifier")) v.numeric_qualifier = int_value(*q, where + "qualifier");
        list.emplace_back(std::move(v));
      }
    }
  }
  return s;
}

json net_json(const petri::NetModel& m) {
  json places = json::array(), transitions = json::array(), arcs = json::array();
  for (const auto& p : m.net.places) {
    places.push_back({{"id", p.id}, {"label", p.label}, {"aspect", petri::to_string(p.aspect)}});
  }
  for (const auto& t : m.net.transitions) {
    json e = {{"id", t.id}, {"label", t.label}, {"aspect", petri::to_string(t.aspect)}};
    if (!t.guard_note.empty()) e["guard"] = t.guard_note;
    transitions.push_back(std::move(e));
  }
  for (const auto& a : m.net.arcs) arcs.push_back({{"source", a.source}, {"target", a.target}, {"weight", a.weight}});
  json out = {{"places", std::move(places)},
              {"transitions", std::move(transitions)},
              {"arcs", std::move(arcs)},
              {"initial-marking", to_json(m.initial)}};
  out["predicate"] = m.predicate ? json(m.predicate->to_string()) : json(nullptr);
  return out;
}

petri::NetModel net_from_json(const json& j) {
  require_object(j, "net");
  petri::NetModel m;
  const auto& places = array_field(j, "places", "net.");
  for (std::size_t i = 0; i < places.size(); ++i) {
    auto where = at("net.places", i);
    const auto& e = require_object(places[i], where);
    m.net.places.push_back({string_field(e, "id", where, true), string_field(e, "label", where), aspect_field(e, where)});
  }
  const auto& transitions = array_field(j, "transitions", "net.");
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    auto where = at("net.transitions", i);
    const auto& e = require_object(transitions[i], where);
    m.net.transitions.push_back({string_field(e, "id", where, true), string_field(e, "label", where),
                                 aspect_field(e, where), string_field(e, "guard", where)});
  }
  const auto& arcs = array_field(j, "arcs", "net.");
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    auto where = at("net.arcs", i);
    const auto& e = require_object(arcs[i], where);
    const json* w = member(e, "weight");
    m.net.arcs.push_back({string_field(e, "source", where, true), string_field(e, "target", where, true),
                          w ? int_value(*w, where + "weight") : 1});
  }
  if (const json* init = member(j, "initial-marking")) m.initial = marking_from_json(*init, "net.initial-marking");
  auto pred = string_field(j, "predicate", "net.");
  if (!pred.empty()) m.predicate = petri::CriticalPredicate::parse(pred);
  return m;
}

petri::SequencingTable table_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  petri::SequencingTable t;
  t.critical = bool_field(j, "critical", path + ".");
  if (const json* init = member(j, "initial")) t.initial = marking_from_json(*init, path + ".initial");
  const auto& rows = array_field(j, "rows", path + ".");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto where = at(path + ".rows", i);
    const auto& r = require_object(rows[i], where);
    petri::Marking m;
    if (const json* mk = member(r, "marking")) m = marking_from_json(*mk, where + "marking");
    t.rows.push_back({string_field(r, "transition", where, true), std::move(m), string_field(r, "situation", where)});
  }
  return t;
}

}  // namespace

json to_json(const petri::Marking& m) {
  json out = json::object();
  for (const auto& [p, n] : m.tokens()) out[p] = n;
  return out;
}

petri::Marking marking_from_json(const json& j, std::string_view field) {
  std::string path(field);
  require_object(j, path);
  petri::Marking m;
  for (const auto& [p, n] : j.items()) m.set(p, int_value(n, path + "." + p));
  return m;
}

json to_json(const petri::SequencingTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"transition", r.transition}, {"situation", r.situation_label}, {"marking", to_json(r.marking)}});
  }
  return {{"critical", t.critical}, {"initial", to_json(t.initial)}, {"rows", std::move(rows)}};
}

json to_json(const petri::Truncation& t) {
  return {{"any", t.any()},         {"markings", t.markings},   {"tokens", t.tokens},
          {"depth", t.depth},       {"cancelled", t.cancelled}, {"tables", t.tables}};
}

json to_json(const petri::CriticalSearch& s) {
  json tables = json::array();
  for (const auto& t : s.tables) tables.push_back(to_json(t));
  return {{"tables", std::move(tables)},
          {"truncated", s.truncated.any()},
          {"truncation", to_json(s.truncated)},
          {"markings-explored", s.markings_explored}};
}

json to_json(const ScenarioDocument& doc) {
  json tables = json::array();
  for (const auto& t : doc.tables) tables.push_back(to_json(t));
  return {{"id", doc.id()},
          {"sheet", sheet_json(doc.sheet)},
          {"net", doc.net ? net_json(*doc.net) : json(nullptr)},
          {"tables", std::move(tables)},
          {"meta",
           {{"author", doc.meta.author},
            {"created", text::format_rfc3339(doc.meta.created)},
            {"modified", text::format_rfc3339(doc.meta.modified)},
            {"status", to_string(doc.meta.status)},
            {"ontology-version", doc.meta.ontology_version}}}};
}

ScenarioDocument document_from_json(const json& j) {
  require_object(j, "document");
  ScenarioDocument doc;
  std::string id = string_field(j, "id", "", true);
  const json* sheet = member(j, "sheet");
  if (!sheet) bad("sheet", "is required");
  doc.sheet = sheet_from_json(*sheet, id);
  if (const json* net = member(j, "net")) doc.net = net_from_json(*net);
  const auto& tables = array_field(j, "tables", "");
  for (std::size_t i = 0; i < tables.size(); ++i) {
    doc.tables.push_back(table_from_json(tables[i], "tables[" + std::to_string(i) + "]"));
  }
  if (const json* meta = member(j, "meta")) {
    require_object(*meta, "meta");
    doc.meta.author = string_field(*meta, "author", "meta.");
    doc.meta.created = time_field(*meta, "created", "meta.");
    doc.meta.modified = time_field(*meta, "modified", "meta.");
    auto status = string_field(*meta, "status", "meta.");
    if (!status.empty()) {
      auto s = parse_status(status);
      if (!s) bad("meta.status", "must be draft or validated");
      doc.meta.status = *s;
    }
    doc.meta.ontology_version = string_field(*meta, "ontology-version", "meta.");
  }
  return doc;
}

json to_json(const Instance& i) {
  return {{"id", i.id}, {"label", i.label}, {"concept", i.concept_id}, {"alt-labels", i.alt_labels}, {"note", i.note}};
}

json to_json(const std::vector<TreeNode>& forest) {
  json out = json::array();
  for (const auto& n : forest) {
    json instances = json::array();
    for (const auto& i : n.instances) instances.push_back(to_json(i));
    out.push_back({{"id", n.concept_id},
                   {"label", n.label},
                   {"children", to_json(n.children)},
                   {"instances", std::move(instances)}});
  }
  return out;
}

json to_json(const ScenarioSummary& s) {
  return {{"id", s.id},
          {"title", s.title},
          {"status", to_string(s.status)},
          {"modified", text::format_rfc3339(s.modified)}};
}

json to_json(const ValidationReport& r) {
  json findings = json::array();
  for (const auto& f : r.findings()) {
    findings.push_back(
        {{"subject", f.subject}, {"severity", to_string(f.severity)}, {"code", f.code}, {"message", f.message}});
  }
  return {{"errors", r.error_count()}, {"warnings", r.warning_count()}, {"findings", std::move(findings)}};
}

json to_json(const Error& e) {
  json out = {{"code", to_string(e.code())}, {"message", e.what()}, {"details", e.details()}};
  if (e.position()) out["position"] = {{"line", e.position()->line}, {"column", e.position()->column}};
  return out;
}

json to_json(const query::QueryResult& r, query::Projection projection) {
  json out = {{"ids", r.ids},
              {"stats", {{"documents-scanned", r.stats.documents_scanned}, {"index-hits", r.stats.index_hits}}}};
  if (projection == query::Projection::summaries) {
    json arr = json::array();
    for (const auto& s : r.summaries) arr.push_back(to_json(s));
    out["summaries"] = std::move(arr);
  } else if (projection == query::Projection::full) {
    json arr = json::array();
    for (const auto& d : r.documents) arr.push_back(to_json(d));
    out["documents"] = std::move(arr);
  }
  return out;
}

json to_json(const query::Explanation& e) {
  json out = json::array();
  for (const auto& a : e.atoms) {
    out.push_back({{"atom", a.atom}, {"expansion", a.expansion}, {"index-served", a.index_served}});
  }
  return out;
}

petri::ExplorationBounds bounds_from_json(const json& j, petri::ExplorationBounds b) {
  require_object(j, "bounds");
  auto positive = [&](std::string_view key) -> std::optional<long long> {
    const json* v = member(j, key);
    if (!v) return std::nullopt;
    long long n = int_value(*v, "bounds." + std::string(key));
    if (n <= 0) throw Error(ErrorCode::invalid_bound, "bounds." + std::string(key) + " must be positive");
    return n;
  };
  if (auto n = positive("max-markings")) b.max_markings = static_cast<std::size_t>(*n);
  if (auto n = positive("max-tokens")) b.max_tokens = *n;
  if (auto n = positive("max-depth")) b.max_depth = static_cast<std::size_t>(*n);
  return b;
}

}  // namespace railsafe::json_codec
