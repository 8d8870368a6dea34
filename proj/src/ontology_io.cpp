#include <set>

#include "railsafe/ontology.hpp"
#include "railsafe/text.hpp"
#include "railsafe/xml.hpp"

namespace railsafe {

namespace {

std::string where(const xml::Element& e) {
  return "line " + std::to_string(e.position.line) + ", column " + std::to_string(e.position.column);
}

class Reader {
 public:
  explicit Reader(const OntologyLoadOptions& options) : options_(options) {}

  void unknown(const xml::Element& e, const std::string& what) {
    std::string msg = what + " at " + where(e);
    if (options_.strict) problems.push_back(msg);
    else warnings.push_back(msg);
  }

  void check_attributes(const xml::Element& e, std::initializer_list<std::string_view> allowed) {
    for (const auto& [k, v] : e.attributes) {
      bool ok = false;
      for (auto a : allowed) ok = ok || a == k;
      if (!ok) unknown(e, "unknown attribute '" + k + "' on <" + e.name + ">");
    }
  }

  std::string attr(const xml::Element& e, std::string_view key) {
    auto v = e.attr(key);
    if (!v) {
      problems.push_back("<" + e.name + "> is missing attribute '" + std::string(key) + "' at " + where(e));
      return {};
    }
    return std::string(*v);
  }

  Concept read_concept(const xml::Element& e) {
    check_attributes(e, {"id", "label", "layer", "root"});
    Concept c;
    c.id = attr(e, "id");
    c.label = attr(e, "label");
    auto layer = parse_layer(attr(e, "layer"));
    if (!layer) problems.push_back("concept '" + c.id + "' has invalid layer at " + where(e));
    c.layer = layer.value_or(Layer::generic);
    if (auto r = e.attr("root")) {
      if (*r == "true") c.root = true;
      else if (*r != "false") problems.push_back("root marker must be 'true' or 'false' at " + where(e));
    }
    for (const auto& child : e.children) {
      if (child.name == "parent") {
        check_attributes(child, {"ref"});
        c.parents.push_back(attr(child, "ref"));
      } else if (child.name == "alt-label") {
        c.alt_labels.push_back(child.text);
      } else if (child.name == "definition") {
        c.definition = child.text;
      } else {
        unknown(child, "unknown element <" + child.name + "> in concept '" + c.id + "'");
      }
    }
    return c;
  }

  Instance read_instance(const xml::Element& e) {
    check_attributes(e, {"id", "label", "concept"});
    Instance i;
    i.id = attr(e, "id");
    i.label = attr(e, "label");
    i.concept_id = attr(e, "concept");
    for (const auto& child : e.children) {
      if (child.name == "alt-label") i.alt_labels.push_back(child.text);
      else if (child.name == "note") i.note = child.text;
      else unknown(child, "unknown element <" + child.name + "> in instance '" + i.id + "'");
    }
    return i;
  }

  std::vector<std::string> problems;
  std::vector<std::string> warnings;

 private:
  const OntologyLoadOptions& options_;
};

}  // namespace

LoadedOntology parse_ontology(std::string_view document, const OntologyLoadOptions& options) {
  xml::Element root = xml::parse(document);
  if (root.name != "ontology") {
    throw Error(ErrorCode::parse_error, "expected root element <ontology>, found <" + root.name + ">", {},
                root.position);
  }
  Reader reader(options);
  reader.check_attributes(root, {"version"});
  std::string version = reader.attr(root, "version");
  std::vector<Concept> concepts;
  std::vector<Instance> instances;
  for (const auto& e : root.children) {
    if (e.name == "concept") concepts.push_back(reader.read_concept(e));
    else if (e.name == "instance") instances.push_back(reader.read_instance(e));
    else reader.unknown(e, "unknown element <" + e.name + ">");
  }
  if (!reader.problems.empty()) {
    throw Error(ErrorCode::parse_error, "ontology document is not well-formed: " + reader.problems.front(),
                reader.problems);
  }
  LoadedOntology out{Ontology(std::move(version), std::move(concepts), std::move(instances)),
                     std::move(reader.warnings)};
  for (auto& w : out.ontology.lint()) out.warnings.push_back(std::move(w));
  return out;
}

Ontology load_ontology(std::string_view document, const OntologyLoadOptions& options) {
  return parse_ontology(document, options).ontology;
}

Ontology load_ontology_file(const std::string& path, const OntologyLoadOptions& options) {
  return load_ontology(text::read_file(path), options);
}

std::string serialize_ontology(const Ontology& o) {
  xml::Element root("ontology");
  root.set("version", o.version());
  for (const auto& [id, c] : o.concepts()) {
    xml::Element e("concept");
    e.set("id", c.id).set("label", c.label).set("layer", std::string(to_string(c.layer)));
    if (c.root) e.set("root", "true");
    for (const auto& p : c.parents) e.add(xml::Element("parent")).set("ref", p);
    for (const auto& a : c.alt_labels) e.add_text("alt-label", a);
    if (!c.definition.empty()) e.add_text("definition", c.definition);
    root.add(std::move(e));
  }
  for (const auto& [id, i] : o.instances()) {
    xml::Element e("instance");
    e.set("id", i.id).set("label", i.label).set("concept", i.concept_id);
    for (const auto& a : i.alt_labels) e.add_text("alt-label", a);
    if (!i.note.empty()) e.add_text("note", i.note);
    root.add(std::move(e));
  }
  return xml::write(root);
}

}  // namespace railsafe
