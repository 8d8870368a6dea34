#include "railsafe/net_text.hpp"

#include <cctype>
#include <sstream>
#include <vector>

#include "railsafe/error.hpp"
#include "railsafe/text.hpp"

namespace railsafe::petri {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + '"';
}

// Splits a record into bare words and double-quoted strings.
std::vector<std::string> fields(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    std::string f;
    if (line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        char c = line[i++];
        if (c == '"') {
          closed = true;
          break;
        }
        if (c == '\\' && i < line.size()) {
          char e = line[i++];
          f += e == 'n' ? '\n' : e;
        } else {
          f += c;
        }
      }
      if (!closed) throw Error(ErrorCode::parse_error, "unterminated string", {}, SourcePosition{line_no, i});
    } else {
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) f += line[i++];
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

std::string export_net_text(const NetModel& model) {
  std::ostringstream out;
  for (const auto& p : model.net.places) {
    out << "place " << p.id << ' ' << to_string(p.aspect) << ' ' << quote(p.label) << '\n';
  }
  for (const auto& t : model.net.transitions) {
    out << "trans " << t.id << ' ' << to_string(t.aspect) << ' ' << quote(t.label);
    if (!t.guard_note.empty()) out << ' ' << quote(t.guard_note);
    out << '\n';
  }
  for (const auto& a : model.net.arcs) out << "arc " << a.source << ' ' << a.target << ' ' << a.weight << '\n';
  for (const auto& [p, n] : model.initial.tokens()) out << "mark " << p << ' ' << n << '\n';
  if (model.predicate) out << "pred " << model.predicate->to_string() << '\n';
  return out.str();
}

NetModel parse_net_text(std::string_view text) {
  NetModel model;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text::trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    auto fail = [&](const std::string& msg) -> Error {
      return Error(ErrorCode::parse_error, msg, {}, SourcePosition{line_no, 1});
    };
    if (line.substr(0, 5) == "pred ") {
      try {
        model.predicate = CriticalPredicate::parse(line.substr(5));
      } catch (const Error& e) {
        throw fail(std::string("bad predicate: ") + e.what());
      }
      continue;
    }
    auto f = fields(line, line_no);
    const auto& kind = f.front();
    if (kind == "place" || kind == "trans") {
      if (f.size() < 3 || f.size() > (kind == "trans" ? 5u : 4u)) throw fail("malformed " + kind + " record");
      auto aspect = parse_aspect(f[2]);
      if (!aspect) throw fail("unknown aspect '" + f[2] + "'");
      std::string label = f.size() > 3 ? f[3] : "";
      if (kind == "place") {
        model.net.places.push_back({f[1], label, *aspect});
      } else {
        model.net.transitions.push_back({f[1], label, *aspect, f.size() > 4 ? f[4] : ""});
      }
    } else if (kind == "arc") {
      if (f.size() != 4) throw fail("arc record needs source, target and weight");
      auto w = text::parse_int(f[3]);
      if (!w) throw fail("arc weight '" + f[3] + "' is not an integer");
      model.net.arcs.push_back({f[1], f[2], *w});
    } else if (kind == "mark") {
      if (f.size() != 3) throw fail("mark record needs place and count");
      auto n = text::parse_int(f[2]);
      if (!n) throw fail("token count '" + f[2] + "' is not an integer");
      model.initial.set(f[1], *n);
    } else {
      throw fail("unknown record '" + kind + "'");
    }
  }
  return model;
}

}  // namespace railsafe::petri
