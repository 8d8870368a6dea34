#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "railsafe/findings.hpp"

namespace railsafe::petri {

/// Modeling discipline for scenario nets: the outside world, the on-board /
/// wayside automation, and the exchange of information between the two.
enum class Aspect { external, internal, interface };

std::string_view to_string(Aspect a);
std::optional<Aspect> parse_aspect(std::string_view text);

struct Place {
  std::string id;
  std::string label;
  Aspect aspect = Aspect::external;

  friend bool operator==(const Place&, const Place&) = default;
};

struct Transition {
  std::string id;
  std::string label;
  Aspect aspect = Aspect::external;
  /// Documentation only; never evaluated.
  std::string guard_note;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct Arc {
  std::string source;
  std::string target;
  long long weight = 1;

  friend bool operator==(const Arc&, const Arc&) = default;
};

struct PetriNet {
  std::vector<Place> places;
  std::vector<Transition> transitions;
  std::vector<Arc> arcs;

  const Place* find_place(std::string_view id) const;
  const Transition* find_transition(std::string_view id) const;

  friend bool operator==(const PetriNet&, const PetriNet&) = default;
};

/// Token counts per place. Absent places hold zero; zero entries are never stored,
/// so equality is structural.
class Marking {
 public:
  Marking() = default;
  Marking(std::initializer_list<std::pair<const std::string, long long>> init);

  long long get(std::string_view place) const;
  void set(const std::string& place, long long count);
  const std::map<std::string, long long>& tokens() const noexcept { return tokens_; }
  long long total() const;

  /// `p:1 q:2`, places in id order, zeros omitted; `(empty)` when no tokens.
  std::string to_string() const;

  friend bool operator==(const Marking&, const Marking&) = default;
  friend auto operator<=>(const Marking&, const Marking&) = default;

 private:
  std::map<std::string, long long> tokens_;
};

/// Structural findings: dangling or non-bipartite arcs, duplicate ids, bad
/// weights (errors); isolated nodes and missing interface aspect (warnings).
ValidationReport validate_net(const PetriNet& net);

/// Index-based form of a structurally valid net. Transitions are ordered by id.
class CompiledNet {
 public:
  using State = std::vector<long long>;

  /// Throws invariant_violation listing every structural error.
  explicit CompiledNet(const PetriNet& net);

  std::size_t place_count() const noexcept { return place_ids_.size(); }
  std::size_t transition_count() const noexcept { return transitions_.size(); }
  const std::string& place_id(std::size_t i) const { return place_ids_[i]; }
  const std::string& transition_id(std::size_t t) const { return transitions_[t].id; }
  const std::string& transition_label(std::size_t t) const { return transitions_[t].label; }
  std::optional<std::size_t> transition_index(std::string_view id) const;

  /// Throws unknown_place for undeclared keys and invariant_violation for negative counts.
  State encode(const Marking& m) const;
  Marking decode(const State& s) const;

  bool enabled(const State& s, std::size_t t) const;
  /// Caller guarantees enabledness.
  State fire(const State& s, std::size_t t) const;

 private:
  struct Weighted {
    std::size_t place;
    long long weight;
  };
  struct CompiledTransition {
    std::string id;
    std::string label;
    std::vector<Weighted> pre;
    std::vector<Weighted> post;
  };

  std::vector<std::string> place_ids_;
  std::map<std::string, std::size_t, std::less<>> place_index_;
  std::vector<CompiledTransition> transitions_;
};

/// Transitions enabled at `m`, sorted by id.
std::vector<std::string> enabled(const PetriNet& net, const Marking& m);

/// Standard firing rule. Throws not_enabled or unknown_transition.
Marking fire(const PetriNet& net, const Marking& m, std::string_view transition);

struct ExplorationBounds {
  std::size_t max_markings = 10000;
  long long max_tokens = 16;
  std::size_t max_depth = 256;
};

/// Throws invalid_bound unless every limit is positive.
void check_bounds(const ExplorationBounds& bounds);

/// Cooperative interruption, checked once per marking expansion.
struct ExplorationControl {
  std::stop_token stop;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct Truncation {
  bool markings = false;  ///< a new marking was dropped at the marking limit
  bool tokens = false;    ///< a successor exceeded the per-place token cap
  bool depth = false;     ///< an enabled marking sat at the depth limit
  bool cancelled = false; ///< stop requested or deadline passed
  bool tables = false;    ///< path enumeration hit its table limit

  bool any() const { return markings || tokens || depth || cancelled || tables; }
};

struct ReachabilityGraph {
  struct Edge {
    std::size_t from;
    std::size_t to;
    std::string transition;

    friend bool operator==(const Edge&, const Edge&) = default;
  };

  /// markings[0] is the initial marking; order is breadth-first discovery.
  std::vector<Marking> markings;
  std::vector<std::size_t> depth;
  std::vector<Edge> edges;
  Truncation truncated;
};

/// Breadth-first exploration within the bounds. A successor exceeding the
/// token cap is dropped with its edge; a new marking beyond the marking limit
/// is dropped with its edge; markings at the depth limit are not expanded.
ReachabilityGraph reachability(const PetriNet& net, const Marking& m0, const ExplorationBounds& bounds,
                               const ExplorationControl& control = {});

std::string to_dot(const ReachabilityGraph& graph);

}  // namespace railsafe::petri
