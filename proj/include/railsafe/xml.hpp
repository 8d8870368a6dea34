#pragma once

// Minimal XML element tree on top of expat. Enough for the ontology and
// scenario document dialects: elements, attributes, character data. No
// namespaces, no mixed content preserved beyond concatenated text.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "railsafe/error.hpp"

namespace railsafe::xml {

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;
  SourcePosition position;

  Element() = default;
  explicit Element(std::string n) : name(std::move(n)) {}

  std::optional<std::string_view> attr(std::string_view key) const;
  /// Throws parse_error naming the element and its position when absent.
  const std::string& required_attr(std::string_view key) const;
  Element& set(std::string key, std::string value);
  Element& add(Element child);
  /// Appends `<name>text</name>`.
  Element& add_text(std::string child_name, std::string value);

  const Element* child(std::string_view child_name) const;
  std::vector<const Element*> children_named(std::string_view child_name) const;
};

/// Parses a UTF-8 document. Malformed input raises parse_error carrying the
/// line/column reported by expat.
Element parse(std::string_view document);

/// Canonical rendering: XML declaration, two-space indentation, attributes in
/// insertion order, text-only elements on one line.
std::string write(const Element& root);

std::string escape(std::string_view raw, bool attribute);

}  // namespace railsafe::xml
