#pragma once

// Generators and brute-force oracles shared by the unit tests and the
// acceptance binary. The oracles deliberately avoid the library's own
// algorithms (no CompiledNet, no is_subconcept, no index).

#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "railsafe/archive.hpp"
#include "railsafe/critical.hpp"
#include "railsafe/document.hpp"
#include "railsafe/net_text.hpp"
#include "railsafe/ontology.hpp"
#include "railsafe/query.hpp"

namespace railsafe::support {

using Rng = std::mt19937_64;

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

const Ontology& seed_ontology();
ScenarioDocument exemplar();

// Petri nets ----------------------------------------------------------------

struct NetShape {
  int max_places = 6;
  int max_transitions = 6;
  long long max_weight = 2;
  long long max_initial_tokens = 3;
};

/// Structurally valid net with ids p1..pn and t1..tm, no duplicate arcs.
petri::NetModel random_net(Rng& rng, const NetShape& shape = {});
petri::Marking random_marking(Rng& rng, const petri::PetriNet& net, long long max_per_place);

using OracleEdge = std::tuple<petri::Marking, std::string, petri::Marking>;

struct OracleGraph {
  std::set<petri::Marking> nodes;
  std::set<OracleEdge> edges;
};

/// Breadth-first reachability over Marking maps, transitions tried in id order.
OracleGraph oracle_reachability(const petri::PetriNet& net, const petri::Marking& m0,
                                const petri::ExplorationBounds& bounds);

/// Pre and post weight of `transition` on every place (zeros included).
std::map<std::string, std::pair<long long, long long>> incidence(const petri::PetriNet& net,
                                                                  const std::string& transition);

/// Every repetition-free firing sequence from m0 (no marking visited twice)
/// that ends at its first critical marking, with at most `max_depth` steps.
std::set<std::vector<std::string>> oracle_critical_paths(const petri::PetriNet& net, const petri::Marking& m0,
                                                         const petri::CriticalPredicate& pred,
                                                         std::size_t max_depth);

/// Replays a firing sequence with the oracle firing rule; empty on failure.
std::optional<petri::Marking> oracle_replay(const petri::PetriNet& net, const petri::Marking& m0,
                                            const std::vector<std::string>& sequence);

// Ontologies ----------------------------------------------------------------

/// Generic-layer DAG with up to `max_concepts` concepts and a few instances.
Ontology random_dag_ontology(Rng& rng, int max_concepts);

/// Reflexive-transitive closure of the parent relation by Floyd-Warshall.
/// closure[a] holds every ancestor of a, a included.
std::map<std::string, std::set<std::string>> oracle_closure(const Ontology& o);

// Documents -----------------------------------------------------------------

/// Structurally valid draft document: random sheet over the seed vocabulary
/// (plus out-of-vocabulary keys and codes), optional net with replaying tables,
/// awkward text content.
ScenarioDocument random_document(Rng& rng, const std::string& id);

// Queries -------------------------------------------------------------------

query::Atom random_atom(Rng& rng);
query::Expr random_expr(Rng& rng, int depth);
query::QueryAst random_query(Rng& rng, int depth);

/// Linear scan with its own reading of the query semantics.
std::set<std::string> naive_evaluate(const query::QueryAst& ast, const std::vector<ScenarioDocument>& docs,
                                     const Ontology& o);

std::string random_text(Rng& rng, std::size_t max_len);

}  // namespace railsafe::support
