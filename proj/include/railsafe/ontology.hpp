#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "railsafe/error.hpp"

namespace railsafe {

/// Concept ids are kebab-case: `[a-z0-9][a-z0-9-]*`.
bool is_valid_concept_id(std::string_view value);
/// Instance ids also admit upper case (failure codes such as OO26).
bool is_valid_instance_id(std::string_view value);

enum class Layer { generic, domain };

std::string_view to_string(Layer layer);
std::optional<Layer> parse_layer(std::string_view text);

struct Concept {
  std::string id;
  std::string label;
  std::vector<std::string> alt_labels;
  std::string definition;
  Layer layer = Layer::generic;
  std::vector<std::string> parents;
  /// Domain concept deliberately not anchored under the generic layer.
  bool root = false;

  friend bool operator==(const Concept&, const Concept&) = default;
};

struct Instance {
  std::string id;
  std::string label;
  std::string concept_id;
  std::vector<std::string> alt_labels;
  std::string note;

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Immutable two-layer ontology: a concept DAG with leaf instances.
/// Construction validates every invariant and reports all violations at once.
class Ontology {
 public:
  Ontology() = default;
  /// Throws consistency_error whose details list every violation found.
  Ontology(std::string version, std::vector<Concept> concepts, std::vector<Instance> instances);

  const std::string& version() const noexcept { return version_; }
  const std::map<std::string, Concept>& concepts() const noexcept { return concepts_; }
  const std::map<std::string, Instance>& instances() const noexcept { return instances_; }

  bool has_concept(std::string_view id) const;
  bool has_instance(std::string_view id) const;
  /// Throws unknown_concept.
  const Concept& concept_at(std::string_view id) const;
  const Instance* find_instance(std::string_view id) const;

  /// Reflexive-transitive: true iff `ancestor` is reachable from `sub` via parent links.
  bool is_subconcept(std::string_view sub, std::string_view ancestor) const;
  /// Strict descendants of `c`, sorted by id.
  std::vector<std::string> descendants(std::string_view c) const;
  /// Direct children of `c`, sorted by id.
  std::vector<std::string> children(std::string_view c) const;
  std::vector<Instance> instances_of(std::string_view c, bool transitive) const;

  /// Concepts whose label or alt label equals `term` ignoring case, or whose id equals `term`.
  std::vector<std::string> match_concepts(std::string_view term) const;
  std::vector<std::string> match_instances(std::string_view term) const;

  /// Non-fatal observations (domain concepts exempted with the root marker).
  std::vector<std::string> lint() const;

  /// Returns a new ontology with `extra` added; existing content is unchanged.
  Ontology with_instances(const std::vector<Instance>& extra) const;

  friend bool operator==(const Ontology& a, const Ontology& b) {
    return a.version_ == b.version_ && a.concepts_ == b.concepts_ && a.instances_ == b.instances_;
  }

 private:
  void require(std::string_view id) const;

  std::string version_;
  std::map<std::string, Concept> concepts_;
  std::map<std::string, Instance> instances_;
  std::map<std::string, std::vector<std::string>> children_;
  std::map<std::string, std::vector<std::string>> direct_instances_;
};

struct TreeNode {
  std::string concept_id;
  std::string label;
  std::vector<TreeNode> children;
  std::vector<Instance> instances;
};

/// Forest view of the DAG: roots are parentless concepts; a concept with k
/// parents is rendered once under each of them.
std::vector<TreeNode> concept_tree(const Ontology& o);

// Serialization -------------------------------------------------------------

struct OntologyLoadOptions {
  /// Unknown elements and attributes are errors when strict, warnings otherwise.
  bool strict = true;
};

struct LoadedOntology {
  Ontology ontology;
  std::vector<std::string> warnings;
};

/// Parses the ontology XML dialect. Throws parse_error for malformed
/// documents and consistency_error for invariant violations.
LoadedOntology parse_ontology(std::string_view document, const OntologyLoadOptions& options = {});
Ontology load_ontology(std::string_view document, const OntologyLoadOptions& options = {});
Ontology load_ontology_file(const std::string& path, const OntologyLoadOptions& options = {});

/// Canonical XML: concepts then instances, each sorted by id.
std::string serialize_ontology(const Ontology& o);

}  // namespace railsafe
