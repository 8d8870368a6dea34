#include <algorithm>
#include <map>
#include <set>

#include "railsafe/query.hpp"

namespace railsafe::query {

namespace {

constexpr std::string_view kTrainCount = "number-of-trains";

using IdSet = std::set<std::string>;

bool index_served(const Atom& a) {
  return a.kind == Atom::Kind::param_has || a.kind == Atom::Kind::param_isa || a.kind == Atom::Kind::status_is;
}

bool test_atom(const Atom& a, const ScenarioDocument& doc, const std::vector<std::string>& expansion) {
  switch (a.kind) {
    case Atom::Kind::param_has:
    case Atom::Kind::param_isa: {
      auto it = doc.sheet.selections.find(a.parameter);
      if (it == doc.sheet.selections.end()) return false;
      return std::any_of(it->second.begin(), it->second.end(), [&](const Selection& s) {
        return std::binary_search(expansion.begin(), expansion.end(), selection_key(s));
      });
    }
    case Atom::Kind::actor_count: {
      auto it = doc.sheet.selections.find(ParameterId::actors);
      if (it == doc.sheet.selections.end()) return false;
      for (const auto& s : it->second) {
        const auto* v = std::get_if<ValueSelection>(&s);
        if (v && v->instance == kTrainCount && v->numeric_qualifier && compare(*v->numeric_qualifier, a.op, a.count)) {
          return true;
        }
      }
      return false;
    }
    case Atom::Kind::has_critical:
      return std::any_of(doc.tables.begin(), doc.tables.end(), [](const auto& t) { return t.critical; });
    case Atom::Kind::status_is: return doc.meta.status == a.status;
    case Atom::Kind::system_is: return text::iequals(doc.sheet.transport_system, a.term);
  }
  return false;
}

using ExpansionCache = std::map<const Atom*, std::vector<std::string>>;

void collect_expansions(const Expr& e, const Ontology& o, ExpansionCache& cache) {
  if (e.kind == Expr::Kind::atom) {
    cache[&e.atom] = expand_term(e.atom, o);
    return;
  }
  for (const auto& op : e.operands) collect_expansions(op, o, cache);
}

bool matches_cached(const Expr& e, const ScenarioDocument& doc, const ExpansionCache& cache) {
  switch (e.kind) {
    case Expr::Kind::atom: return test_atom(e.atom, doc, cache.at(&e.atom));
    case Expr::Kind::negate: return !matches_cached(e.operands.front(), doc, cache);
    case Expr::Kind::all_of:
      return std::all_of(e.operands.begin(), e.operands.end(),
                         [&](const Expr& o) { return matches_cached(o, doc, cache); });
    case Expr::Kind::any_of:
      return std::any_of(e.operands.begin(), e.operands.end(),
                         [&](const Expr& o) { return matches_cached(o, doc, cache); });
  }
  return false;
}

class Evaluator {
 public:
  Evaluator(const Archive& archive, const ExpansionCache& cache, QueryStats& stats)
      : archive_(archive), cache_(cache), stats_(stats) {
    auto ids = archive.ids();
    universe_.insert(ids.begin(), ids.end());
  }

  const IdSet& universe() const { return universe_; }

  const ScenarioDocument& document(const std::string& id) {
    auto it = docs_.find(id);
    if (it == docs_.end()) {
      it = docs_.emplace(id, archive_.load(id)).first;
      ++stats_.documents_scanned;
    }
    return it->second;
  }

  IdSet scan(const Expr& e) {
    IdSet out;
    for (const auto& id : universe_) {
      if (matches_cached(e, document(id), cache_)) out.insert(id);
    }
    return out;
  }

  IdSet eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::atom: return eval_atom(e);
      case Expr::Kind::negate: {
        IdSet inner = eval(e.operands.front());
        IdSet out;
        std::set_difference(universe_.begin(), universe_.end(), inner.begin(), inner.end(),
                            std::inserter(out, out.end()));
        return out;
      }
      case Expr::Kind::all_of: {
        IdSet acc = eval(e.operands.front());
        for (std::size_t i = 1; i < e.operands.size() && !acc.empty(); ++i) {
          IdSet next = eval(e.operands[i]);
          IdSet out;
          std::set_intersection(acc.begin(), acc.end(), next.begin(), next.end(), std::inserter(out, out.end()));
          acc = std::move(out);
        }
        return acc;
      }
      case Expr::Kind::any_of: {
        IdSet acc;
        for (const auto& op : e.operands) acc.merge(eval(op));
        return acc;
      }
    }
    return {};
  }

 private:
  IdSet eval_atom(const Expr& e) {
    const Atom& a = e.atom;
    IdSet out;
    switch (a.kind) {
      case Atom::Kind::param_has:
      case Atom::Kind::param_isa:
        for (const auto& v : cache_.at(&a)) {
          auto hit = archive_.lookup(a.parameter, v);
          if (!hit.empty()) ++stats_.index_hits;
          for (auto& id : hit) {
            if (universe_.count(id)) out.insert(id);
          }
        }
        return out;
      case Atom::Kind::status_is:
        ++stats_.index_hits;
        for (const auto& s : archive_.list(a.status)) {
          if (universe_.count(s.id)) out.insert(s.id);
        }
        return out;
      default: return scan(e);
    }
  }

  const Archive& archive_;
  const ExpansionCache& cache_;
  QueryStats& stats_;
  IdSet universe_;
  std::map<std::string, ScenarioDocument> docs_;
};

void explain_expr(const Expr& e, const Ontology& o, Explanation& out) {
  if (e.kind != Expr::Kind::atom) {
    for (const auto& op : e.operands) explain_expr(op, o, out);
    return;
  }
  out.atoms.push_back({print_atom(e.atom), expand_term(e.atom, o), index_served(e.atom)});
}

}  // namespace

std::vector<std::string> expand_term(const Atom& atom, const Ontology& o) {
  std::set<std::string> out;
  if (atom.kind == Atom::Kind::param_has) {
    out.insert(atom.term);
    for (auto& id : o.match_instances(atom.term)) out.insert(id);
  } else if (atom.kind == Atom::Kind::param_isa) {
    auto concepts = o.match_concepts(atom.term);
    auto instances = o.match_instances(atom.term);
    if (concepts.empty() && instances.empty()) {
      throw Error(ErrorCode::unknown_concept, "'" + atom.term + "' names no concept or instance");
    }
    for (const auto& c : concepts) {
      for (const auto& i : o.instances_of(c, true)) out.insert(i.id);
    }
    out.insert(instances.begin(), instances.end());
  }
  return {out.begin(), out.end()};
}

bool matches(const Expr& e, const ScenarioDocument& doc, const Ontology& o) {
  ExpansionCache cache;
  collect_expansions(e, o, cache);
  return matches_cached(e, doc, cache);
}

Explanation explain(const QueryAst& ast, const Ontology& o) {
  Explanation out;
  if (ast.root) explain_expr(*ast.root, o, out);
  return out;
}

QueryResult evaluate(const QueryAst& ast, const Archive& archive, const Ontology& o, const EvaluateOptions& options) {
  ExpansionCache cache;
  if (ast.root) collect_expansions(*ast.root, o, cache);
  QueryResult result;
  Evaluator ev(archive, cache, result.stats);
  IdSet hits;
  if (!ast.root) hits = ev.universe();
  else if (options.force_scan) hits = ev.scan(*ast.root);
  else hits = ev.eval(*ast.root);

  result.ids.assign(hits.begin(), hits.end());
  if (ast.projection == Projection::summaries) {
    for (auto& s : archive.list()) {
      if (hits.count(s.id)) result.summaries.push_back(std::move(s));
    }
  } else if (ast.projection == Projection::full) {
    for (const auto& id : result.ids) result.documents.push_back(ev.document(id));
  }
  return result;
}

}  // namespace railsafe::query
