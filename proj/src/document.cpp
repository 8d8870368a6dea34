#include "railsafe/document.hpp"

#include <algorithm>
#include <cctype>

#include "railsafe/xml.hpp"

namespace railsafe {

std::string_view to_string(Status s) {
  return s == Status::draft ? "draft" : "validated";
}

std::optional<Status> parse_status(std::string_view text) {
  if (text == "draft") return Status::draft;
  if (text == "validated") return Status::validated;
  return std::nullopt;
}

bool is_valid_scenario_id(std::string_view id) {
  if (id.empty() || id.size() > 128) return false;
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  if (!alnum(id.front())) return false;
  return std::all_of(id.begin(), id.end(), [&](char c) { return alnum(c) || c == '-' || c == '_' || c == '.'; });
}

namespace {

void check_marking(const petri::PetriNet& net, const petri::Marking& m, const std::string& where,
                   ValidationReport& report) {
  for (const auto& [p, n] : m.tokens()) {
    if (!net.find_place(p)) report.error(where, "unknown-place", "marking references unknown place '" + p + "'");
    if (n < 0) report.error(where, "negative-tokens", "place '" + p + "' holds " + std::to_string(n) + " tokens");
  }
}

}  // namespace

ValidationReport validate_structure(const ScenarioDocument& doc) {
  ValidationReport report;
  if (!is_valid_scenario_id(doc.id())) {
    report.error("scenario", "invalid-id", "scenario id '" + doc.id() + "' is not a valid identifier");
  }
  for (const auto& [p, list] : doc.sheet.selections) {
    for (const auto& sel : list) {
      const auto* v = std::get_if<ValueSelection>(&sel);
      if (v && v->numeric_qualifier && *v->numeric_qualifier < 0) {
        report.error(std::string(to_string(p)), "negative-qualifier", "qualifier on '" + v->instance + "' is negative");
      }
    }
  }

  if (!doc.net) {
    if (!doc.tables.empty()) report.error("tables", "table-without-net", "sequencing tables stored without a net");
    return report;
  }
  const auto& model = *doc.net;
  auto net_report = validate_net(model.net);
  report.append(net_report);
  if (!net_report.ok()) return report;

  check_marking(model.net, model.initial, "initial-marking", report);
  if (model.predicate) {
    for (const auto& p : model.predicate->places()) {
      if (!model.net.find_place(p)) report.error("predicate", "unknown-place", "predicate names unknown place '" + p + "'");
    }
  }
  for (std::size_t i = 0; i < doc.tables.size(); ++i) {
    const auto& t = doc.tables[i];
    std::string where = "table-" + std::to_string(i + 1);
    ValidationReport markings;
    check_marking(model.net, t.initial, where, markings);
    for (const auto& r : t.rows) check_marking(model.net, r.marking, where, markings);
    report.append(markings);
    if (!markings.ok()) continue;
    if (auto mismatch = petri::replay_mismatch(model.net, t)) {
      report.error(where, "replay-mismatch", *mismatch);
    } else if (t.critical && model.predicate && !model.predicate->holds(t.final_marking())) {
      report.error(where, "not-critical", "final marking " + t.final_marking().to_string() +
                                              " does not satisfy the stored predicate");
    }
  }
  return report;
}

ValidationReport validate_document(const ScenarioDocument& doc, const Ontology& o) {
  ValidationReport report = validate_structure(doc);
  try {
    report.append(validate_sheet(doc.sheet, default_schema(o), o));
  } catch (const Error& e) {
    report.error("sheet", std::string(to_string(e.code())), e.what());
  }
  return report;
}

// XML -----------------------------------------------------------------------

namespace {

xml::Element marking_element(std::string name, const petri::Marking& m) {
  xml::Element e(std::move(name));
  for (const auto& [p, n] : m.tokens()) {
    e.add(xml::Element("tokens")).set("place", p).set("count", std::to_string(n));
  }
  return e;
}

xml::Element sheet_element(const ScenarioSheet& s) {
  xml::Element e("sheet");
  e.add_text("title", s.title);
  e.add_text("transport-system", s.transport_system);
  e.add_text("narrative", s.narrative);
  for (const auto& [p, list] : s.selections) {
    auto& pe = e.add(xml::Element("parameter"));
    pe.set("id", std::string(to_string(p)));
    for (const auto& sel : list) {
      if (const auto* v = std::get_if<ValueSelection>(&sel)) {
        auto& ve = pe.add(xml::Element("value"));
        ve.set("instance", v->instance).set("key", v->key_concept ? "true" : "false");
        if (v->numeric_qualifier) ve.set("qualifier", std::to_string(*v->numeric_qualifier));
      } else {
        const auto& c = std::get<CodedEntry>(sel);
        auto& ce = pe.add_text("coded", c.description);
        ce.set("code", c.code).set("key", c.key_concept ? "true" : "false");
      }
    }
  }
  return e;
}

xml::Element net_element(const petri::NetModel& m) {
  xml::Element e("net");
  for (const auto& p : m.net.places) {
    e.add(xml::Element("place")).set("id", p.id).set("label", p.label).set("aspect", std::string(to_string(p.aspect)));
  }
  for (const auto& t : m.net.transitions) {
    auto& te = e.add(xml::Element("transition"));
    te.set("id", t.id).set("label", t.label).set("aspect", std::string(to_string(t.aspect)));
    if (!t.guard_note.empty()) te.set("guard", t.guard_note);
  }
  for (const auto& a : m.net.arcs) {
    e.add(xml::Element("arc")).set("source", a.source).set("target", a.target).set("weight", std::to_string(a.weight));
  }
  e.add(marking_element("initial-marking", m.initial));
  if (m.predicate) e.add_text("predicate", m.predicate->to_string());
  return e;
}

xml::Element tables_element(const std::vector<petri::SequencingTable>& tables) {
  xml::Element e("tables");
  for (const auto& t : tables) {
    auto& te = e.add(xml::Element("table"));
    te.set("critical", t.critical ? "true" : "false");
    te.add(marking_element("initial", t.initial));
    for (const auto& r : t.rows) {
      auto row = marking_element("row", r.marking);
      row.attributes.insert(row.attributes.begin(), {"situation", r.situation_label});
      row.attributes.insert(row.attributes.begin(), {"transition", r.transition});
      te.add(std::move(row));
    }
  }
  return e;
}

}  // namespace

std::string to_xml(const ScenarioDocument& doc) {
  xml::Element root("scenario");
  root.set("id", doc.id());
  root.add(sheet_element(doc.sheet));
  if (doc.net) root.add(net_element(*doc.net));
  root.add(tables_element(doc.tables));
  auto& meta = root.add(xml::Element("meta"));
  meta.set("author", doc.meta.author)
      .set("created", text::format_rfc3339(doc.meta.created))
      .set("modified", text::format_rfc3339(doc.meta.modified))
      .set("status", std::string(to_string(doc.meta.status)))
      .set("ontology-version", doc.meta.ontology_version);
  return xml::write(root);
}

namespace {

[[noreturn]] void bad(const xml::Element& e, const std::string& msg) {
  throw Error(ErrorCode::parse_error, msg, {}, e.position);
}

void expect_only(const xml::Element& e, std::initializer_list<std::string_view> names) {
  for (const auto& c : e.children) {
    if (std::find(names.begin(), names.end(), c.name) == names.end()) {
      bad(c, "unexpected element <" + c.name + "> inside <" + e.name + ">");
    }
  }
}

long long int_attr(const xml::Element& e, std::string_view key) {
  const auto& raw = e.required_attr(key);
  auto v = text::parse_int(raw);
  if (!v) bad(e, "attribute '" + std::string(key) + "' of <" + e.name + "> is not an integer: '" + raw + "'");
  return *v;
}

bool bool_attr(const xml::Element& e, std::string_view key) {
  auto v = e.attr(key);
  if (!v || *v == "false") return false;
  if (*v == "true") return true;
  bad(e, "attribute '" + std::string(key) + "' must be 'true' or 'false'");
}

petri::Marking read_marking(const xml::Element& e) {
  petri::Marking m;
  for (const auto* t : e.children_named("tokens")) {
    const auto& place = t->required_attr("place");
    if (m.tokens().count(place)) bad(*t, "place '" + place + "' listed twice in marking");
    m.set(place, int_attr(*t, "count"));
  }
  return m;
}

std::string text_of(const xml::Element& parent, std::string_view name) {
  const auto* c = parent.child(name);
  return c ? c->text : std::string();
}

ScenarioSheet read_sheet(const xml::Element& e, std::string id) {
  expect_only(e, {"title", "transport-system", "narrative", "parameter"});
  ScenarioSheet s;
  s.scenario_id = std::move(id);
  s.title = text_of(e, "title");
  s.transport_system = text_of(e, "transport-system");
  s.narrative = text_of(e, "narrative");
  for (const auto* pe : e.children_named("parameter")) {
    auto p = parse_parameter(pe->required_attr("id"));
    if (!p) throw Error(ErrorCode::unknown_parameter, "unknown parameter '" + pe->required_attr("id") + "'", {}, pe->position);
    if (s.selections.count(*p)) bad(*pe, "parameter '" + std::string(to_string(*p)) + "' appears twice");
    auto& list = s.selections[*p];
    expect_only(*pe, {"value", "coded"});
    for (const auto& ve : pe->children) {
      if (ve.name == "value") {
        ValueSelection v{ve.required_attr("instance"), bool_attr(ve, "key"), std::nullopt};
        if (ve.attr("qualifier")) v.numeric_qualifier = int_attr(ve, "qualifier");
        list.emplace_back(std::move(v));
      } else {
        list.emplace_back(CodedEntry{ve.required_attr("code"), ve.text, bool_attr(ve, "key")});
      }
    }
  }
  return s;
}

petri::NetModel read_net(const xml::Element& e) {
  expect_only(e, {"place", "transition", "arc", "initial-marking", "predicate"});
  petri::NetModel m;
  for (const auto& c : e.children) {
    if (c.name == "place" || c.name == "transition") {
      auto aspect = petri::parse_aspect(c.required_attr("aspect"));
      if (!aspect) bad(c, "unknown aspect '" + c.required_attr("aspect") + "'");
      if (c.name == "place") {
        m.net.places.push_back({c.required_attr("id"), std::string(c.attr("label").value_or("")), *aspect});
      } else {
        m.net.transitions.push_back({c.required_attr("id"), std::string(c.attr("label").value_or("")), *aspect,
                                     std::string(c.attr("guard").value_or(""))});
      }
    } else if (c.name == "arc") {
      m.net.arcs.push_back({c.required_attr("source"), c.required_attr("target"), int_attr(c, "weight")});
    } else if (c.name == "initial-marking") {
      m.initial = read_marking(c);
    } else {
      try {
        m.predicate = petri::CriticalPredicate::parse(c.text);
      } catch (const Error& err) {
        bad(c, std::string("invalid predicate: ") + err.what());
      }
    }
  }
  return m;
}

std::vector<petri::SequencingTable> read_tables(const xml::Element& e) {
  expect_only(e, {"table"});
  std::vector<petri::SequencingTable> out;
  for (const auto& te : e.children) {
    expect_only(te, {"initial", "row"});
    petri::SequencingTable t;
    t.critical = bool_attr(te, "critical");
    const auto* init = te.child("initial");
    if (!init) bad(te, "<table> needs an <initial> marking");
    t.initial = read_marking(*init);
    for (const auto* r : te.children_named("row")) {
      t.rows.push_back({r->required_attr("transition"), read_marking(*r), std::string(r->attr("situation").value_or(""))});
    }
    out.push_back(std::move(t));
  }
  return out;
}

text::Timestamp time_attr(const xml::Element& e, std::string_view key) {
  auto t = text::parse_rfc3339(e.required_attr(key));
  if (!t) bad(e, "attribute '" + std::string(key) + "' is not an RFC 3339 UTC timestamp");
  return *t;
}

}  // namespace

ScenarioDocument parse_document_xml(std::string_view document) {
  auto root = xml::parse(document);
  if (root.name != "scenario") bad(root, "expected root element <scenario>, found <" + root.name + ">");
  expect_only(root, {"sheet", "net", "tables", "meta"});
  ScenarioDocument doc;
  const auto* sheet = root.child("sheet");
  if (!sheet) bad(root, "<scenario> needs a <sheet>");
  doc.sheet = read_sheet(*sheet, root.required_attr("id"));
  if (const auto* net = root.child("net")) doc.net = read_net(*net);
  if (const auto* tables = root.child("tables")) doc.tables = read_tables(*tables);
  const auto* meta = root.child("meta");
  if (!meta) bad(root, "<scenario> needs a <meta>");
  doc.meta.author = std::string(meta->attr("author").value_or(""));
  doc.meta.created = time_attr(*meta, "created");
  doc.meta.modified = time_attr(*meta, "modified");
  auto status = parse_status(meta->required_attr("status"));
  if (!status) bad(*meta, "status must be 'draft' or 'validated'");
  doc.meta.status = *status;
  doc.meta.ontology_version = std::string(meta->attr("ontology-version").value_or(""));
  return doc;
}

ScenarioDocument document_from_xml(std::string_view document) {
  auto doc = parse_document_xml(document);
  auto report = validate_structure(doc);
  if (!report.ok()) {
    std::vector<std::string> details;
    for (const auto& f : report.findings()) {
      if (f.severity == Severity::error) details.push_back(f.subject + ": " + f.message);
    }
    throw Error(ErrorCode::invariant_violation,
                "scenario '" + doc.id() + "' violates document invariants: " + details.front(), details);
  }
  return doc;
}

}  // namespace railsafe
