#include "railsafe/petri.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "railsafe/error.hpp"

namespace railsafe::petri {

std::string_view to_string(Aspect a) {
  switch (a) {
    case Aspect::external: return "external";
    case Aspect::internal: return "internal";
    case Aspect::interface: return "interface";
  }
  return "";
}

std::optional<Aspect> parse_aspect(std::string_view text) {
  if (text == "external") return Aspect::external;
  if (text == "internal") return Aspect::internal;
  if (text == "interface") return Aspect::interface;
  return std::nullopt;
}

const Place* PetriNet::find_place(std::string_view id) const {
  auto it = std::find_if(places.begin(), places.end(), [&](const Place& p) { return p.id == id; });
  return it == places.end() ? nullptr : &*it;
}

const Transition* PetriNet::find_transition(std::string_view id) const {
  auto it = std::find_if(transitions.begin(), transitions.end(), [&](const Transition& t) { return t.id == id; });
  return it == transitions.end() ? nullptr : &*it;
}

Marking::Marking(std::initializer_list<std::pair<const std::string, long long>> init) {
  for (const auto& [p, n] : init) set(p, n);
}

long long Marking::get(std::string_view place) const {
  auto it = tokens_.find(std::string(place));
  return it == tokens_.end() ? 0 : it->second;
}

void Marking::set(const std::string& place, long long count) {
  if (count == 0) tokens_.erase(place);
  else tokens_[place] = count;
}

long long Marking::total() const {
  long long sum = 0;
  for (const auto& [p, n] : tokens_) sum += n;
  return sum;
}

std::string Marking::to_string() const {
  if (tokens_.empty()) return "(empty)";
  std::string out;
  for (const auto& [p, n] : tokens_) {
    if (!out.empty()) out += ' ';
    out += p + ":" + std::to_string(n);
  }
  return out;
}

ValidationReport validate_net(const PetriNet& net) {
  ValidationReport report;
  std::set<std::string> places, transitions;
  for (const auto& p : net.places) {
    if (p.id.empty()) report.error("", "empty-id", "place with empty id");
    else if (!places.insert(p.id).second) report.error(p.id, "duplicate-id", "place id '" + p.id + "' declared twice");
  }
  for (const auto& t : net.transitions) {
    if (t.id.empty()) report.error("", "empty-id", "transition with empty id");
    else if (!transitions.insert(t.id).second)
      report.error(t.id, "duplicate-id", "transition id '" + t.id + "' declared twice");
    else if (places.count(t.id))
      report.error(t.id, "duplicate-id", "id '" + t.id + "' names both a place and a transition");
  }

  std::set<std::pair<std::string, std::string>> pairs;
  std::set<std::string> connected;
  for (const auto& a : net.arcs) {
    std::string subject = a.source + "->" + a.target;
    bool src_p = places.count(a.source) > 0, src_t = transitions.count(a.source) > 0;
    bool dst_p = places.count(a.target) > 0, dst_t = transitions.count(a.target) > 0;
    if (!src_p && !src_t) report.error(subject, "dangling-arc", "arc source '" + a.source + "' is not declared");
    if (!dst_p && !dst_t) report.error(subject, "dangling-arc", "arc target '" + a.target + "' is not declared");
    if ((src_p && dst_p) || (src_t && dst_t)) {
      report.error(subject, "non-bipartite", "arc must join a place and a transition");
    }
    if (a.weight < 1) report.error(subject, "invalid-weight", "arc weight must be at least 1");
    if (!pairs.emplace(a.source, a.target).second) report.error(subject, "duplicate-arc", "arc declared twice");
    connected.insert(a.source);
    connected.insert(a.target);
  }

  bool has_interface = false;
  for (const auto& p : net.places) {
    has_interface = has_interface || p.aspect == Aspect::interface;
    if (!p.id.empty() && !connected.count(p.id)) report.warning(p.id, "isolated-node", "place '" + p.id + "' has no arcs");
  }
  for (const auto& t : net.transitions) {
    has_interface = has_interface || t.aspect == Aspect::interface;
    if (!t.id.empty() && !connected.count(t.id))
      report.warning(t.id, "isolated-node", "transition '" + t.id + "' has no arcs");
  }
  if (!has_interface) {
    report.warning("", "aspect-coverage", "net has no interface-aspect element linking external and internal aspects");
  }
  return report;
}

CompiledNet::CompiledNet(const PetriNet& net) {
  auto report = validate_net(net);
  if (!report.ok()) {
    std::vector<std::string> details;
    for (const auto& f : report.findings()) {
      if (f.severity == Severity::error) details.push_back(f.message);
    }
    throw Error(ErrorCode::invariant_violation, "net is structurally invalid: " + details.front(), details);
  }
  for (const auto& p : net.places) {
    place_index_.emplace(p.id, place_ids_.size());
    place_ids_.push_back(p.id);
  }
  std::vector<const Transition*> sorted;
  for (const auto& t : net.transitions) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(), [](const Transition* a, const Transition* b) { return a->id < b->id; });
  std::map<std::string, std::size_t, std::less<>> t_index;
  for (const auto* t : sorted) {
    t_index.emplace(t->id, transitions_.size());
    transitions_.push_back({t->id, t->label.empty() ? t->id : t->label, {}, {}});
  }
  for (const auto& a : net.arcs) {
    if (auto p = place_index_.find(a.source); p != place_index_.end()) {
      transitions_[t_index.at(a.target)].pre.push_back({p->second, a.weight});
    } else {
      transitions_[t_index.at(a.source)].post.push_back({place_index_.at(a.target), a.weight});
    }
  }
}

std::optional<std::size_t> CompiledNet::transition_index(std::string_view id) const {
  auto it = std::lower_bound(transitions_.begin(), transitions_.end(), id,
                             [](const CompiledTransition& t, std::string_view v) { return t.id < v; });
  if (it == transitions_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - transitions_.begin());
}

CompiledNet::State CompiledNet::encode(const Marking& m) const {
  State s(place_ids_.size(), 0);
  for (const auto& [p, n] : m.tokens()) {
    auto it = place_index_.find(p);
    if (it == place_index_.end()) throw Error(ErrorCode::unknown_place, "marking references unknown place '" + p + "'");
    if (n < 0) {
      throw Error(ErrorCode::invariant_violation,
                  "marking holds a negative count (" + std::to_string(n) + ") in place '" + p + "'");
    }
    s[it->second] = n;
  }
  return s;
}

Marking CompiledNet::decode(const State& s) const {
  Marking m;
  for (std::size_t i = 0; i < s.size(); ++i) m.set(place_ids_[i], s[i]);
  return m;
}

bool CompiledNet::enabled(const State& s, std::size_t t) const {
  for (const auto& w : transitions_[t].pre) {
    if (s[w.place] < w.weight) return false;
  }
  return true;
}

CompiledNet::State CompiledNet::fire(const State& s, std::size_t t) const {
  State out = s;
  for (const auto& w : transitions_[t].pre) out[w.place] -= w.weight;
  for (const auto& w : transitions_[t].post) out[w.place] += w.weight;
  return out;
}

std::vector<std::string> enabled(const PetriNet& net, const Marking& m) {
  CompiledNet c(net);
  auto s = c.encode(m);
  std::vector<std::string> out;
  for (std::size_t t = 0; t < c.transition_count(); ++t) {
    if (c.enabled(s, t)) out.push_back(c.transition_id(t));
  }
  return out;
}

Marking fire(const PetriNet& net, const Marking& m, std::string_view transition) {
  CompiledNet c(net);
  auto s = c.encode(m);
  auto t = c.transition_index(transition);
  if (!t) throw Error(ErrorCode::unknown_transition, "unknown transition '" + std::string(transition) + "'");
  if (!c.enabled(s, *t)) {
    throw Error(ErrorCode::not_enabled, "transition '" + std::string(transition) + "' is not enabled at " + m.to_string());
  }
  return c.decode(c.fire(s, *t));
}

void check_bounds(const ExplorationBounds& bounds) {
  std::vector<std::string> bad;
  if (bounds.max_markings == 0) bad.push_back("max_markings must be positive");
  if (bounds.max_tokens <= 0) bad.push_back("max_tokens must be positive");
  if (bounds.max_depth == 0) bad.push_back("max_depth must be positive");
  if (!bad.empty()) throw Error(ErrorCode::invalid_bound, "invalid exploration bounds: " + bad.front(), bad);
}

ReachabilityGraph reachability(const PetriNet& net, const Marking& m0, const ExplorationBounds& bounds,
                               const ExplorationControl& control) {
  check_bounds(bounds);
  CompiledNet c(net);
  std::vector<CompiledNet::State> states{c.encode(m0)};
  std::map<CompiledNet::State, std::size_t> seen{{states.front(), 0}};
  ReachabilityGraph g;
  g.depth.push_back(0);
  std::deque<std::size_t> queue{0};

  while (!queue.empty()) {
    if (control.stop.stop_requested() ||
        (control.deadline && std::chrono::steady_clock::now() >= *control.deadline)) {
      g.truncated.cancelled = true;
      break;
    }
    std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t t = 0; t < c.transition_count(); ++t) {
      if (!c.enabled(states[i], t)) continue;
      if (g.depth[i] >= bounds.max_depth) {
        g.truncated.depth = true;
        break;
      }
      auto next = c.fire(states[i], t);
      if (std::any_of(next.begin(), next.end(), [&](long long n) { return n > bounds.max_tokens; })) {
        g.truncated.tokens = true;
        continue;
      }
      auto it = seen.find(next);
      std::size_t j;
      if (it != seen.end()) {
        j = it->second;
      } else {
        if (states.size() >= bounds.max_markings) {
          g.truncated.markings = true;
          continue;
        }
        j = states.size();
        seen.emplace(next, j);
        states.push_back(std::move(next));
        g.depth.push_back(g.depth[i] + 1);
        queue.push_back(j);
      }
      g.edges.push_back({i, j, c.transition_id(t)});
    }
  }

  g.markings.reserve(states.size());
  for (const auto& s : states) g.markings.push_back(c.decode(s));
  return g;
}

std::string to_dot(const ReachabilityGraph& graph) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"' || ch == '\\') out += '\\';
      out += ch;
    }
    return out + "\"";
  };
  std::string out = "digraph reachability {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < graph.markings.size(); ++i) {
    out += "  m" + std::to_string(i) + " [label=" + quote(graph.markings[i].to_string()) + "];\n";
  }
  for (const auto& e : graph.edges) {
    out += "  m" + std::to_string(e.from) + " -> m" + std::to_string(e.to) + " [label=" + quote(e.transition) + "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace railsafe::petri
