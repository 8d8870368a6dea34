#pragma once

#include <optional>
#include <string_view>
#include <vector>

// Data files compiled into the binary so `init` and the demos work without
// a source checkout.
namespace railsafe::seed {

std::string_view ontology_xml();
std::string_view exemplar_xml();

/// Built-in demo scenario documents by id (demo-collision, demo-door-closing).
std::optional<std::string_view> demo_xml(std::string_view id);
std::vector<std::string_view> demo_ids();

}  // namespace railsafe::seed
