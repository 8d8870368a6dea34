#pragma once

// Line-oriented net form for desk debugging:
//
//   place <id> <aspect> "<label>"
//   trans <id> <aspect> "<label>" ["<guard note>"]
//   arc <source> <target> <weight>
//   mark <place> <count>
//   pred <predicate text to end of line>
//
// Blank lines and lines starting with '#' are ignored.

#include <optional>
#include <string>
#include <string_view>

#include "railsafe/critical.hpp"

namespace railsafe::petri {

struct NetModel {
  PetriNet net;
  Marking initial;
  std::optional<CriticalPredicate> predicate;

  friend bool operator==(const NetModel&, const NetModel&) = default;
};

std::string export_net_text(const NetModel& model);
/// Throws parse_error with the offending line number.
NetModel parse_net_text(std::string_view text);

}  // namespace railsafe::petri
