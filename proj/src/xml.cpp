#include "railsafe/xml.hpp"

#include <expat.h>

#include <algorithm>
#include <cctype>
#include <memory>

namespace railsafe::xml {

std::optional<std::string_view> Element::attr(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return std::string_view(v);
  }
  return std::nullopt;
}

const std::string& Element::required_attr(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return v;
  }
  throw Error(ErrorCode::parse_error, "element <" + name + "> is missing attribute '" + std::string(key) + "'",
              {}, position);
}

Element& Element::set(std::string key, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == key) {
      v = std::move(value);
      return *this;
    }
  }
  attributes.emplace_back(std::move(key), std::move(value));
  return *this;
}

Element& Element::add(Element c) {
  children.push_back(std::move(c));
  return children.back();
}

Element& Element::add_text(std::string child_name, std::string value) {
  Element e(std::move(child_name));
  e.text = std::move(value);
  return add(std::move(e));
}

const Element* Element::child(std::string_view child_name) const {
  for (const auto& c : children) {
    if (c.name == child_name) return &c;
  }
  return nullptr;
}

std::vector<const Element*> Element::children_named(std::string_view child_name) const {
  std::vector<const Element*> out;
  for (const auto& c : children) {
    if (c.name == child_name) out.push_back(&c);
  }
  return out;
}

namespace {

struct ParseState {
  XML_Parser parser = nullptr;
  std::vector<Element*> stack;
  Element root;
  bool have_root = false;
};

SourcePosition current_position(XML_Parser p) {
  return {static_cast<std::size_t>(XML_GetCurrentLineNumber(p)),
          static_cast<std::size_t>(XML_GetCurrentColumnNumber(p)) + 1};
}

void on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto* st = static_cast<ParseState*>(data);
  Element e(name);
  e.position = current_position(st->parser);
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    e.attributes.emplace_back(attrs[i], attrs[i + 1]);
  }
  if (st->stack.empty()) {
    st->root = std::move(e);
    st->have_root = true;
    st->stack.push_back(&st->root);
  } else {
    Element& parent = *st->stack.back();
    parent.children.push_back(std::move(e));
    st->stack.push_back(&parent.children.back());
  }
}

void on_end(void* data, const XML_Char*) {
  auto* st = static_cast<ParseState*>(data);
  Element* e = st->stack.back();
  st->stack.pop_back();
  // Whitespace between child elements is layout, not content.
  if (!e->children.empty() &&
      std::all_of(e->text.begin(), e->text.end(), [](unsigned char c) { return std::isspace(c); })) {
    e->text.clear();
  }
}

void on_text(void* data, const XML_Char* s, int len) {
  auto* st = static_cast<ParseState*>(data);
  if (!st->stack.empty()) st->stack.back()->text.append(s, static_cast<std::size_t>(len));
}

struct ParserDeleter {
  void operator()(XML_ParserStruct* p) const { XML_ParserFree(p); }
};

}  // namespace

Element parse(std::string_view document) {
  std::unique_ptr<XML_ParserStruct, ParserDeleter> parser(XML_ParserCreate("UTF-8"));
  if (!parser) throw Error(ErrorCode::parse_error, "cannot allocate XML parser");
  ParseState st;
  st.parser = parser.get();
  XML_SetUserData(parser.get(), &st);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE) == XML_STATUS_ERROR) {
    throw Error(ErrorCode::parse_error,
                std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser.get())), {},
                current_position(parser.get()));
  }
  if (!st.have_root) throw Error(ErrorCode::parse_error, "empty XML document");
  return std::move(st.root);
}

std::string escape(std::string_view raw, bool attribute) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) out += "&quot;";
        else out += c;
        break;
      case '\n':
        if (attribute) out += "&#10;";
        else out += c;
        break;
      case '\t':
        if (attribute) out += "&#9;";
        else out += c;
        break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

void write_element(const Element& e, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += '<';
  out += e.name;
  for (const auto& [k, v] : e.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    out += escape(v, true);
    out += '"';
  }
  if (e.children.empty() && e.text.empty()) {
    out += "/>\n";
    return;
  }
  out += '>';
  if (e.children.empty()) {
    out += escape(e.text, false);
  } else {
    out += '\n';
    for (const auto& c : e.children) write_element(c, depth + 1, out);
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
  }
  out += "</";
  out += e.name;
  out += ">\n";
}

}  // namespace

std::string write(const Element& root) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  write_element(root, 0, out);
  return out;
}

}  // namespace railsafe::xml
