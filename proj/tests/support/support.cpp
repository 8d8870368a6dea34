#include "support.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>

#include "railsafe/seed.hpp"

namespace railsafe::support {

namespace fs = std::filesystem;

namespace {

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

long long uniform(Rng& rng, long long lo, long long hi) { return std::uniform_int_distribution<long long>(lo, hi)(rng); }

bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

TempDir::TempDir() {
  static Rng rng(std::random_device{}());
  path_ = fs::temp_directory_path() / ("railsafe-test-" + std::to_string(rng()));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

const Ontology& seed_ontology() {
  static const Ontology o = load_ontology(seed::ontology_xml());
  return o;
}

ScenarioDocument exemplar() { return document_from_xml(seed::exemplar_xml()); }

std::string random_text(Rng& rng, std::size_t max_len) {
  static const std::vector<std::string> pieces = {"a", "b", "Z", "7", " ", " ", "-", "&", "<", ">", "\"", "'",
                                                  "é", "→", "\n", "\t", "]]>", "&amp;", "x", "train"};
  std::string out;
  auto n = uniform(rng, 0, static_cast<long long>(max_len));
  for (long long i = 0; i < n; ++i) out += pick(rng, pieces);
  return out;
}

// Petri nets ----------------------------------------------------------------

petri::NetModel random_net(Rng& rng, const NetShape& shape) {
  petri::NetModel m;
  auto np = uniform(rng, 1, shape.max_places);
  auto nt = uniform(rng, 1, shape.max_transitions);
  static const std::vector<petri::Aspect> aspects = {petri::Aspect::external, petri::Aspect::internal,
                                                      petri::Aspect::interface};
  for (long long i = 1; i <= np; ++i) m.net.places.push_back({"p" + std::to_string(i), "place " + std::to_string(i), pick(rng, aspects)});
  for (long long i = 1; i <= nt; ++i) {
    m.net.transitions.push_back({"t" + std::to_string(i), "transition " + std::to_string(i), pick(rng, aspects), ""});
  }
  for (const auto& t : m.net.transitions) {
    for (const auto& p : m.net.places) {
      if (coin(rng, 0.35)) m.net.arcs.push_back({p.id, t.id, uniform(rng, 1, shape.max_weight)});
      if (coin(rng, 0.35)) m.net.arcs.push_back({t.id, p.id, uniform(rng, 1, shape.max_weight)});
    }
  }
  auto tokens = uniform(rng, 0, shape.max_initial_tokens);
  for (long long i = 0; i < tokens; ++i) {
    const auto& p = pick(rng, m.net.places).id;
    m.initial.set(p, m.initial.get(p) + 1);
  }
  return m;
}

petri::Marking random_marking(Rng& rng, const petri::PetriNet& net, long long max_per_place) {
  petri::Marking m;
  for (const auto& p : net.places) m.set(p.id, uniform(rng, 0, max_per_place));
  return m;
}

std::map<std::string, std::pair<long long, long long>> incidence(const petri::PetriNet& net,
                                                                  const std::string& transition) {
  std::map<std::string, std::pair<long long, long long>> out;
  for (const auto& p : net.places) out[p.id] = {0, 0};
  for (const auto& a : net.arcs) {
    if (a.target == transition) out[a.source].first += a.weight;
    if (a.source == transition) out[a.target].second += a.weight;
  }
  return out;
}

namespace {

std::optional<petri::Marking> oracle_fire(const petri::PetriNet& net, const petri::Marking& m, const std::string& t) {
  petri::Marking next = m;
  for (const auto& [place, w] : incidence(net, t)) {
    long long after = m.get(place) - w.first;
    if (after < 0) return std::nullopt;
    next.set(place, after + w.second);
  }
  return next;
}

std::vector<std::string> sorted_transition_ids(const petri::PetriNet& net) {
  std::vector<std::string> ids;
  for (const auto& t : net.transitions) ids.push_back(t.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

OracleGraph oracle_reachability(const petri::PetriNet& net, const petri::Marking& m0,
                                const petri::ExplorationBounds& bounds) {
  OracleGraph g;
  auto ids = sorted_transition_ids(net);
  std::map<petri::Marking, std::size_t> depth{{m0, 0}};
  std::deque<petri::Marking> frontier{m0};
  g.nodes.insert(m0);
  while (!frontier.empty()) {
    auto m = frontier.front();
    frontier.pop_front();
    for (const auto& t : ids) {
      auto next = oracle_fire(net, m, t);
      if (!next) continue;
      if (depth[m] >= bounds.max_depth) break;
      bool over = false;
      for (const auto& [p, n] : next->tokens()) over = over || n > bounds.max_tokens;
      if (over) continue;
      if (!g.nodes.count(*next)) {
        if (g.nodes.size() >= bounds.max_markings) continue;
        g.nodes.insert(*next);
        depth[*next] = depth[m] + 1;
        frontier.push_back(*next);
      }
      g.edges.insert({m, t, *next});
    }
  }
  return g;
}

std::set<std::vector<std::string>> oracle_critical_paths(const petri::PetriNet& net, const petri::Marking& m0,
                                                         const petri::CriticalPredicate& pred,
                                                         std::size_t max_depth) {
  std::set<std::vector<std::string>> out;
  if (pred.holds(m0)) return {{}};
  auto ids = sorted_transition_ids(net);
  std::vector<std::string> path;
  std::set<petri::Marking> visited{m0};
  std::function<void(const petri::Marking&)> go = [&](const petri::Marking& m) {
    if (path.size() >= max_depth) return;
    for (const auto& t : ids) {
      auto next = oracle_fire(net, m, t);
      if (!next || visited.count(*next)) continue;
      path.push_back(t);
      if (pred.holds(*next)) {
        out.insert(path);
      } else {
        visited.insert(*next);
        go(*next);
        visited.erase(*next);
      }
      path.pop_back();
    }
  };
  go(m0);
  return out;
}

std::optional<petri::Marking> oracle_replay(const petri::PetriNet& net, const petri::Marking& m0,
                                            const std::vector<std::string>& sequence) {
  petri::Marking m = m0;
  for (const auto& t : sequence) {
    auto next = oracle_fire(net, m, t);
    if (!next) return std::nullopt;
    m = *next;
  }
  return m;
}

// Ontologies ----------------------------------------------------------------

Ontology random_dag_ontology(Rng& rng, int max_concepts) {
  auto n = uniform(rng, 1, max_concepts);
  std::vector<std::string> ids;
  for (long long i = 0; i < n; ++i) ids.push_back("k" + std::to_string(uniform(rng, 0, 999)) + "-" + std::to_string(i));
  std::vector<Concept> concepts;
  double p = std::min(0.5, 2.5 / static_cast<double>(n));
  for (long long i = 0; i < n; ++i) {
    Concept c;
    c.id = ids[i];
    c.label = "Concept " + std::to_string(i);
    c.layer = Layer::generic;
    for (long long j = 0; j < i; ++j) {
      if (coin(rng, p)) c.parents.push_back(ids[j]);
    }
    concepts.push_back(std::move(c));
  }
  std::shuffle(concepts.begin(), concepts.end(), rng);
  std::vector<Instance> instances;
  auto ni = uniform(rng, 0, 5);
  for (long long i = 0; i < ni; ++i) {
    instances.push_back({"inst-" + std::to_string(i), "Instance " + std::to_string(i), pick(rng, ids), {}, ""});
  }
  return Ontology("random", std::move(concepts), std::move(instances));
}

std::map<std::string, std::set<std::string>> oracle_closure(const Ontology& o) {
  std::vector<std::string> ids;
  for (const auto& [id, c] : o.concepts()) ids.push_back(id);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;
  std::size_t n = ids.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    reach[i][i] = true;
    for (const auto& p : o.concepts().at(ids[i]).parents) reach[i][index.at(p)] = true;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  std::map<std::string, std::set<std::string>> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j]) out[ids[i]].insert(ids[j]);
    }
  }
  return out;
}

// Documents -----------------------------------------------------------------

ScenarioDocument random_document(Rng& rng, const std::string& id) {
  const auto& o = seed_ontology();
  ScenarioDocument d;
  d.sheet.scenario_id = id;
  d.sheet.title = random_text(rng, 12);
  d.sheet.narrative = random_text(rng, 40);
  static const std::vector<std::string> systems = {"VAL", "POMA", "MAGGALY", "", "val"};
  d.sheet.transport_system = pick(rng, systems);
  static const std::vector<std::string> codes = {"OO26", "OS15", "OO7", "AB123", "IS2"};

  for (auto p : kAllParameters) {
    if (!coin(rng, 0.85)) continue;
    auto& list = d.sheet.selections[p];
    std::vector<std::string> legal;
    for (const auto& i : o.instances_of(anchor_concept(p), true)) legal.push_back(i.id);
    std::set<std::string> used;
    auto count = uniform(rng, 0, 3);
    for (long long k = 0; k < count; ++k) {
      bool coded = (p == ParameterId::summarized_failures || p == ParameterId::interim_solutions) && coin(rng, 0.6);
      if (coded) {
        auto code = pick(rng, codes);
        if (!used.insert(code).second) continue;
        list.emplace_back(CodedEntry{code, random_text(rng, 10), coin(rng)});
        continue;
      }
      std::string value = coin(rng, 0.9) ? pick(rng, legal) : "oov-" + std::to_string(uniform(rng, 0, 9));
      if (!used.insert(value).second) continue;
      ValueSelection v{value, coin(rng), std::nullopt};
      if (p == ParameterId::actors && value == "number-of-trains") v.numeric_qualifier = uniform(rng, 0, 4);
      else if (coin(rng, 0.1)) v.numeric_qualifier = uniform(rng, 0, 1000000);
      list.emplace_back(std::move(v));
    }
  }

  if (coin(rng, 0.6)) {
    auto model = random_net(rng);
    for (auto& pl : model.net.places) pl.label = random_text(rng, 8);
    for (auto& t : model.net.transitions) {
      t.label = random_text(rng, 8);
      if (coin(rng, 0.3)) t.guard_note = random_text(rng, 8);
    }
    if (coin(rng, 0.8)) {
      const auto& place = pick(rng, model.net.places).id;
      model.predicate = petri::CriticalPredicate::compare(place, petri::Comparator::ge, uniform(rng, 1, 2));
      petri::ExplorationBounds bounds;
      bounds.max_markings = 200;
      auto search = petri::find_critical(model.net, model.initial, *model.predicate, bounds);
      auto keep = std::min<std::size_t>(search.tables.size(), 3);
      d.tables.assign(search.tables.begin(), search.tables.begin() + static_cast<long>(keep));
    }
    d.net = std::move(model);
  }

  d.meta.author = random_text(rng, 6);
  d.meta.created = text::Timestamp(std::chrono::seconds(uniform(rng, 946684800, 1900000000)));
  d.meta.modified = d.meta.created + std::chrono::seconds(uniform(rng, 0, 100000));
  d.meta.status = Status::draft;
  d.meta.ontology_version = o.version();
  return d;
}

// Queries -------------------------------------------------------------------

query::Atom random_atom(Rng& rng) {
  const auto& o = seed_ontology();
  query::Atom a;
  auto kind = uniform(rng, 0, 5);
  auto param = kAllParameters[static_cast<std::size_t>(uniform(rng, 0, 7))];
  switch (kind) {
    case 0: {
      a.kind = query::Atom::Kind::param_has;
      a.parameter = param;
      auto instances = o.instances_of(anchor_concept(param), true);
      std::vector<std::string> terms = {"oov-1", "OO26", "OS15", "say \"hi\"", "back\\slash"};
      for (const auto& i : instances) {
        terms.push_back(i.id);
        terms.push_back(text::to_lower(i.label));
      }
      a.term = pick(rng, terms);
      break;
    }
    case 1: {
      a.kind = query::Atom::Kind::param_isa;
      a.parameter = param;
      std::vector<std::string> terms;
      for (const auto& c : o.descendants(anchor_concept(param))) terms.push_back(c);
      terms.push_back(std::string(anchor_concept(param)));
      terms.push_back(text::to_lower(o.concept_at(anchor_concept(param)).label));
      for (const auto& i : o.instances_of(anchor_concept(param), true)) terms.push_back(i.id);
      terms.push_back("feared-event");
      a.term = pick(rng, terms);
      break;
    }
    case 2: {
      a.kind = query::Atom::Kind::actor_count;
      static const std::vector<query::CompareOp> ops = {query::CompareOp::eq, query::CompareOp::ne,
                                                        query::CompareOp::lt, query::CompareOp::le,
                                                        query::CompareOp::gt, query::CompareOp::ge};
      a.op = pick(rng, ops);
      a.count = uniform(rng, 0, 4);
      break;
    }
    case 3: a.kind = query::Atom::Kind::has_critical; break;
    case 4:
      a.kind = query::Atom::Kind::status_is;
      a.status = coin(rng) ? Status::draft : Status::validated;
      break;
    default: {
      a.kind = query::Atom::Kind::system_is;
      static const std::vector<std::string> systems = {"VAL", "val", "POMA", "Maggaly", "none"};
      a.term = pick(rng, systems);
    }
  }
  return a;
}

query::Expr random_expr(Rng& rng, int depth) {
  if (depth <= 0 || coin(rng, 0.3)) return query::Expr::make_atom(random_atom(rng));
  auto kind = uniform(rng, 0, 2);
  if (kind == 2) return query::Expr::negate(random_expr(rng, depth - 1));
  std::vector<query::Expr> ops;
  auto n = uniform(rng, 2, 3);
  for (long long i = 0; i < n; ++i) ops.push_back(random_expr(rng, depth - 1));
  return kind == 0 ? query::Expr::all_of(std::move(ops)) : query::Expr::any_of(std::move(ops));
}

query::QueryAst random_query(Rng& rng, int depth) {
  query::QueryAst ast;
  ast.root = random_expr(rng, depth);
  return ast;
}

namespace {

bool label_matches(const std::string& label, const std::vector<std::string>& alts, const std::string& term) {
  if (text::iequals(label, term)) return true;
  return std::any_of(alts.begin(), alts.end(), [&](const auto& a) { return text::iequals(a, term); });
}

bool has_ancestor_in(const Ontology& o, const std::string& concept_id, const std::set<std::string>& targets) {
  std::vector<std::string> stack{concept_id};
  std::set<std::string> seen;
  while (!stack.empty()) {
    auto c = stack.back();
    stack.pop_back();
    if (!seen.insert(c).second) continue;
    if (targets.count(c)) return true;
    for (const auto& p : o.concepts().at(c).parents) stack.push_back(p);
  }
  return false;
}

bool naive_atom(const query::Atom& a, const ScenarioDocument& d, const Ontology& o) {
  using K = query::Atom::Kind;
  auto keys = [&](ParameterId p) {
    std::vector<const Selection*> out;
    auto it = d.sheet.selections.find(p);
    if (it != d.sheet.selections.end()) {
      for (const auto& s : it->second) out.push_back(&s);
    }
    return out;
  };
  switch (a.kind) {
    case K::param_has:
      for (const auto* s : keys(a.parameter)) {
        const auto& key = selection_key(*s);
        if (key == a.term) return true;
        auto it = o.instances().find(key);
        if (it != o.instances().end() && label_matches(it->second.label, it->second.alt_labels, a.term)) return true;
      }
      return false;
    case K::param_isa: {
      std::set<std::string> concepts, instances;
      for (const auto& [id, c] : o.concepts()) {
        if (id == a.term || label_matches(c.label, c.alt_labels, a.term)) concepts.insert(id);
      }
      for (const auto& [id, i] : o.instances()) {
        if (id == a.term || label_matches(i.label, i.alt_labels, a.term)) instances.insert(id);
      }
      if (concepts.empty() && instances.empty()) throw Error(ErrorCode::unknown_concept, a.term);
      for (const auto* s : keys(a.parameter)) {
        const auto& key = selection_key(*s);
        if (instances.count(key)) return true;
        auto it = o.instances().find(key);
        if (it != o.instances().end() && has_ancestor_in(o, it->second.concept_id, concepts)) return true;
      }
      return false;
    }
    case K::actor_count:
      for (const auto* s : keys(ParameterId::actors)) {
        const auto* v = std::get_if<ValueSelection>(s);
        if (v && v->instance == "number-of-trains" && v->numeric_qualifier &&
            query::compare(*v->numeric_qualifier, a.op, a.count)) {
          return true;
        }
      }
      return false;
    case K::has_critical:
      for (const auto& t : d.tables) {
        if (t.critical) return true;
      }
      return false;
    case K::status_is: return d.meta.status == a.status;
    case K::system_is: return text::iequals(d.sheet.transport_system, a.term);
  }
  return false;
}

bool naive_expr(const query::Expr& e, const ScenarioDocument& d, const Ontology& o) {
  switch (e.kind) {
    case query::Expr::Kind::atom: return naive_atom(e.atom, d, o);
    case query::Expr::Kind::negate: return !naive_expr(e.operands[0], d, o);
    case query::Expr::Kind::all_of:
      for (const auto& op : e.operands) {
        if (!naive_expr(op, d, o)) return false;
      }
      return true;
    case query::Expr::Kind::any_of:
      for (const auto& op : e.operands) {
        if (naive_expr(op, d, o)) return true;
      }
      return false;
  }
  return false;
}

}  // namespace

std::set<std::string> naive_evaluate(const query::QueryAst& ast, const std::vector<ScenarioDocument>& docs,
                                     const Ontology& o) {
  std::set<std::string> out;
  for (const auto& d : docs) {
    if (!ast.root || naive_expr(*ast.root, d, o)) out.insert(d.id());
  }
  return out;
}

}  // namespace railsafe::support
