#include "railsafe/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "railsafe/text.hpp"

namespace railsafe {

bool is_valid_concept_id(std::string_view v) {
  if (v.empty()) return false;
  auto lower_alnum = [](char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); };
  if (!lower_alnum(v.front())) return false;
  return std::all_of(v.begin(), v.end(), [&](char c) { return lower_alnum(c) || c == '-'; });
}

bool is_valid_instance_id(std::string_view v) {
  if (v.empty()) return false;
  auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  if (!alnum(v.front())) return false;
  return std::all_of(v.begin(), v.end(), [&](char c) { return alnum(c) || c == '-' || c == '_' || c == '.'; });
}

std::string_view to_string(Layer layer) {
  return layer == Layer::generic ? "generic" : "domain";
}

std::optional<Layer> parse_layer(std::string_view text) {
  if (text == "generic") return Layer::generic;
  if (text == "domain") return Layer::domain;
  return std::nullopt;
}

namespace {

// Tarjan's strongly connected components over the parent relation; every
// component with more than one member, or a self-parent, is a cycle.
std::vector<std::vector<std::string>> find_cycles(const std::map<std::string, Concept>& concepts) {
  std::map<std::string, int> index, low;
  std::set<std::string> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> cycles;
  int counter = 0;

  std::function<void(const std::string&)> strongconnect = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& p : concepts.at(v).parents) {
      if (!concepts.count(p)) continue;
      if (!index.count(p)) {
        strongconnect(p);
        low[v] = std::min(low[v], low[p]);
      } else if (on_stack.count(p)) {
        low[v] = std::min(low[v], index[p]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> component;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        component.push_back(w);
      } while (w != v);
      const auto& self = concepts.at(v).parents;
      bool self_loop = std::find(self.begin(), self.end(), v) != self.end();
      if (component.size() > 1 || self_loop) {
        std::sort(component.begin(), component.end());
        cycles.push_back(std::move(component));
      }
    }
  };

  for (const auto& [id, c] : concepts) {
    if (!index.count(id)) strongconnect(id);
  }
  std::sort(cycles.begin(), cycles.end());
  return cycles;
}

}  // namespace

Ontology::Ontology(std::string version, std::vector<Concept> concepts, std::vector<Instance> instances)
    : version_(std::move(version)) {
  std::vector<std::string> violations;

  for (auto& c : concepts) {
    if (!is_valid_concept_id(c.id)) violations.push_back("invalid concept id '" + c.id + "'");
    if (concepts_.count(c.id)) {
      violations.push_back("duplicate concept id '" + c.id + "'");
      continue;
    }
    std::string id = c.id;
    concepts_.emplace(std::move(id), std::move(c));
  }
  for (auto& i : instances) {
    if (!is_valid_instance_id(i.id)) violations.push_back("invalid instance id '" + i.id + "'");
    if (instances_.count(i.id)) {
      violations.push_back("duplicate instance id '" + i.id + "'");
      continue;
    }
    std::string id = i.id;
    instances_.emplace(std::move(id), std::move(i));
  }

  for (const auto& [id, c] : concepts_) {
    std::set<std::string> seen;
    for (const auto& p : c.parents) {
      if (!seen.insert(p).second) violations.push_back("concept '" + id + "' lists parent '" + p + "' twice");
      auto it = concepts_.find(p);
      if (it == concepts_.end()) {
        violations.push_back("concept '" + id + "' has undeclared parent '" + p + "'");
        continue;
      }
      if (c.layer == Layer::generic && it->second.layer == Layer::domain) {
        violations.push_back("generic concept '" + id + "' has domain-layer parent '" + p + "'");
      }
    }
    if (c.root && c.layer == Layer::generic) {
      violations.push_back("root marker on generic concept '" + id + "' (only domain concepts may be exempted)");
    }
  }
  for (const auto& [id, i] : instances_) {
    if (!concepts_.count(i.concept_id)) {
      violations.push_back("instance '" + id + "' refers to undeclared concept '" + i.concept_id + "'");
    }
  }

  auto cycles = find_cycles(concepts_);
  for (const auto& cyc : cycles) {
    std::string members;
    for (const auto& m : cyc) members += (members.empty() ? "" : ", ") + m;
    violations.push_back("cycle in parent relation among {" + members + "}");
  }

  if (cycles.empty()) {
    for (const auto& [id, c] : concepts_) {
      if (c.layer != Layer::domain || c.root) continue;
      // Walk ancestors looking for a generic-layer concept.
      std::set<std::string> visited;
      std::vector<std::string> frontier(c.parents.begin(), c.parents.end());
      bool anchored = false;
      while (!frontier.empty() && !anchored) {
        std::string cur = frontier.back();
        frontier.pop_back();
        auto it = concepts_.find(cur);
        if (it == concepts_.end() || !visited.insert(cur).second) continue;
        if (it->second.layer == Layer::generic) anchored = true;
        frontier.insert(frontier.end(), it->second.parents.begin(), it->second.parents.end());
      }
      if (!anchored) {
        violations.push_back("domain concept '" + id +
                             "' has no generic-layer ancestor and no root marker");
      }
    }
  }

  if (!violations.empty()) {
    throw Error(ErrorCode::consistency_error,
                "ontology is inconsistent (" + std::to_string(violations.size()) + " violation" +
                    (violations.size() == 1 ? "" : "s") + ")",
                std::move(violations));
  }

  for (const auto& [id, c] : concepts_) {
    for (const auto& p : c.parents) children_[p].push_back(id);
  }
  for (const auto& [id, i] : instances_) direct_instances_[i.concept_id].push_back(id);
}

bool Ontology::has_concept(std::string_view id) const {
  return concepts_.find(std::string(id)) != concepts_.end();
}

bool Ontology::has_instance(std::string_view id) const {
  return instances_.find(std::string(id)) != instances_.end();
}

void Ontology::require(std::string_view id) const {
  if (!has_concept(id)) throw Error(ErrorCode::unknown_concept, "unknown concept '" + std::string(id) + "'");
}

const Concept& Ontology::concept_at(std::string_view id) const {
  auto it = concepts_.find(std::string(id));
  if (it == concepts_.end()) throw Error(ErrorCode::unknown_concept, "unknown concept '" + std::string(id) + "'");
  return it->second;
}

const Instance* Ontology::find_instance(std::string_view id) const {
  auto it = instances_.find(std::string(id));
  return it == instances_.end() ? nullptr : &it->second;
}

bool Ontology::is_subconcept(std::string_view sub, std::string_view ancestor) const {
  require(sub);
  require(ancestor);
  // Depth-first walk up the parent links; the DAG invariant bounds it.
  std::set<std::string_view> visited;
  std::vector<std::string_view> pending{sub};
  while (!pending.empty()) {
    auto cur = pending.back();
    pending.pop_back();
    if (cur == ancestor) return true;
    if (!visited.insert(cur).second) continue;
    for (const auto& p : concepts_.find(std::string(cur))->second.parents) pending.push_back(p);
  }
  return false;
}

std::vector<std::string> Ontology::children(std::string_view c) const {
  require(c);
  auto it = children_.find(std::string(c));
  return it == children_.end() ? std::vector<std::string>{} : it->second;
}

std::vector<std::string> Ontology::descendants(std::string_view c) const {
  require(c);
  std::set<std::string> found;
  std::vector<std::string> pending{std::string(c)};
  while (!pending.empty()) {
    auto cur = std::move(pending.back());
    pending.pop_back();
    auto it = children_.find(cur);
    if (it == children_.end()) continue;
    for (const auto& child : it->second) {
      if (found.insert(child).second) pending.push_back(child);
    }
  }
  return {found.begin(), found.end()};
}

std::vector<Instance> Ontology::instances_of(std::string_view c, bool transitive) const {
  require(c);
  std::set<std::string> scope{std::string(c)};
  if (transitive) {
    for (auto& d : descendants(c)) scope.insert(std::move(d));
  }
  std::vector<Instance> out;
  for (const auto& [id, inst] : instances_) {
    if (scope.count(inst.concept_id)) out.push_back(inst);
  }
  return out;
}

namespace {

bool label_matches(std::string_view term, const std::string& label, const std::vector<std::string>& alts) {
  if (text::iequals(term, label)) return true;
  return std::any_of(alts.begin(), alts.end(), [&](const std::string& a) { return text::iequals(term, a); });
}

}  // namespace

std::vector<std::string> Ontology::match_concepts(std::string_view term) const {
  std::vector<std::string> out;
  for (const auto& [id, c] : concepts_) {
    if (id == term || label_matches(term, c.label, c.alt_labels)) out.push_back(id);
  }
  return out;
}

std::vector<std::string> Ontology::match_instances(std::string_view term) const {
  std::vector<std::string> out;
  for (const auto& [id, i] : instances_) {
    if (id == term || label_matches(term, i.label, i.alt_labels)) out.push_back(id);
  }
  return out;
}

std::vector<std::string> Ontology::lint() const {
  std::vector<std::string> out;
  for (const auto& [id, c] : concepts_) {
    if (c.root) out.push_back("domain concept '" + id + "' is exempted from generic anchoring by a root marker");
  }
  return out;
}

Ontology Ontology::with_instances(const std::vector<Instance>& extra) const {
  std::vector<Concept> cs;
  cs.reserve(concepts_.size());
  for (const auto& [id, c] : concepts_) cs.push_back(c);
  std::vector<Instance> is;
  is.reserve(instances_.size() + extra.size());
  for (const auto& [id, i] : instances_) is.push_back(i);
  is.insert(is.end(), extra.begin(), extra.end());
  return Ontology(version_, std::move(cs), std::move(is));
}

namespace {

TreeNode build_node(const Ontology& o, const std::string& id) {
  TreeNode node;
  node.concept_id = id;
  node.label = o.concept_at(id).label;
  for (const auto& child : o.children(id)) node.children.push_back(build_node(o, child));
  node.instances = o.instances_of(id, false);
  return node;
}

}  // namespace

std::vector<TreeNode> concept_tree(const Ontology& o) {
  std::vector<TreeNode> forest;
  for (const auto& [id, c] : o.concepts()) {
    if (c.parents.empty()) forest.push_back(build_node(o, id));
  }
  return forest;
}

}  // namespace railsafe
