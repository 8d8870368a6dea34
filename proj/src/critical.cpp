#include "railsafe/critical.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

#include "railsafe/error.hpp"
#include "railsafe/text.hpp"

namespace railsafe::petri {

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::ge: return ">=";
    case Comparator::le: return "<=";
    case Comparator::eq: return "=";
  }
  return "";
}

namespace {

struct Token {
  enum class Kind { word, cmp, lparen, rparen, end } kind;
  std::string text;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t col = i + 1;
    if (c == '(') {
      out.push_back({Token::Kind::lparen, "(", col});
      ++i;
    } else if (c == ')') {
      out.push_back({Token::Kind::rparen, ")", col});
      ++i;
    } else if (s.substr(i, 2) == ">=" || s.substr(i, 2) == "<=" || s.substr(i, 2) == "==") {
      out.push_back({Token::Kind::cmp, std::string(s.substr(i, 2)), col});
      i += 2;
    } else if (s.substr(i, 3) == "\xE2\x89\xA5" || s.substr(i, 3) == "\xE2\x89\xA4") {
      out.push_back({Token::Kind::cmp, s.substr(i, 3) == "\xE2\x89\xA5" ? ">=" : "<=", col});
      i += 3;
    } else if (c == '=') {
      out.push_back({Token::Kind::cmp, "=", col});
      ++i;
    } else if (word_char(c)) {
      std::size_t j = i;
      while (j < s.size() && word_char(s[j])) ++j;
      out.push_back({Token::Kind::word, std::string(s.substr(i, j - i)), col});
      i = j;
    } else {
      throw Error(ErrorCode::syntax_error, std::string("unexpected character '") + c + "' in predicate", {},
                  SourcePosition{1, col});
    }
  }
  out.push_back({Token::Kind::end, "", s.size() + 1});
  return out;
}

class PredicateParser {
 public:
  explicit PredicateParser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  CriticalPredicate::Node parse() {
    auto n = parse_or();
    if (peek().kind != Token::Kind::end) fail("end of predicate");
    return n;
  }

 private:
  using Node = CriticalPredicate::Node;

  const Token& peek() const { return tokens_[pos_]; }
  bool keyword(std::string_view kw) const { return peek().kind == Token::Kind::word && text::iequals(peek().text, kw); }

  [[noreturn]] void fail(const std::string& expected) const {
    const auto& t = peek();
    std::string found = t.kind == Token::Kind::end ? "end of input" : "'" + t.text + "'";
    throw Error(ErrorCode::syntax_error, "predicate: expected " + expected + ", found " + found, {expected},
                SourcePosition{1, t.column});
  }

  Node parse_or() {
    Node first = parse_and();
    if (!keyword("or")) return first;
    Node n;
    n.kind = Node::Kind::any_of;
    n.operands.push_back(std::move(first));
    while (keyword("or")) {
      ++pos_;
      n.operands.push_back(parse_and());
    }
    return n;
  }

  Node parse_and() {
    Node first = parse_unary();
    if (!keyword("and")) return first;
    Node n;
    n.kind = Node::Kind::all_of;
    n.operands.push_back(std::move(first));
    while (keyword("and")) {
      ++pos_;
      n.operands.push_back(parse_unary());
    }
    return n;
  }

  Node parse_unary() {
    if (keyword("not")) {
      ++pos_;
      Node n;
      n.kind = Node::Kind::negate;
      n.operands.push_back(parse_unary());
      return n;
    }
    if (peek().kind == Token::Kind::lparen) {
      ++pos_;
      Node n = parse_or();
      if (peek().kind != Token::Kind::rparen) fail("')'");
      ++pos_;
      return n;
    }
    if (peek().kind != Token::Kind::word || keyword("and") || keyword("or")) fail("place id, 'not' or '('");
    Node n;
    n.kind = Node::Kind::compare;
    n.place = peek().text;
    ++pos_;
    if (peek().kind != Token::Kind::cmp) fail("comparator (>=, <=, =)");
    const auto& op = peek().text;
    n.comparator = op == ">=" ? Comparator::ge : op == "<=" ? Comparator::le : Comparator::eq;
    ++pos_;
    auto v = peek().kind == Token::Kind::word ? text::parse_int(peek().text) : std::nullopt;
    if (!v) fail("integer");
    n.value = *v;
    ++pos_;
    return n;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

bool evaluate(const CriticalPredicate::Node& n, const Marking& m) {
  using Kind = CriticalPredicate::Node::Kind;
  switch (n.kind) {
    case Kind::compare: {
      long long v = m.get(n.place);
      switch (n.comparator) {
        case Comparator::ge: return v >= n.value;
        case Comparator::le: return v <= n.value;
        case Comparator::eq: return v == n.value;
      }
      return false;
    }
    case Kind::all_of:
      return std::all_of(n.operands.begin(), n.operands.end(), [&](const auto& o) { return evaluate(o, m); });
    case Kind::any_of:
      return std::any_of(n.operands.begin(), n.operands.end(), [&](const auto& o) { return evaluate(o, m); });
    case Kind::negate:
      return !evaluate(n.operands.front(), m);
  }
  return false;
}

std::string print(const CriticalPredicate::Node& n) {
  using Kind = CriticalPredicate::Node::Kind;
  auto operand = [](const CriticalPredicate::Node& o) {
    bool compound = o.kind == Kind::all_of || o.kind == Kind::any_of;
    return compound ? "(" + print(o) + ")" : print(o);
  };
  switch (n.kind) {
    case Kind::compare:
      return n.place + " " + std::string(to_string(n.comparator)) + " " + std::to_string(n.value);
    case Kind::negate:
      return "not " + operand(n.operands.front());
    case Kind::all_of:
    case Kind::any_of: {
      std::string sep = n.kind == Kind::all_of ? " and " : " or ";
      std::string out;
      for (const auto& o : n.operands) out += (out.empty() ? "" : sep) + operand(o);
      return out;
    }
  }
  return "";
}

void collect_places(const CriticalPredicate::Node& n, std::set<std::string>& out) {
  if (n.kind == CriticalPredicate::Node::Kind::compare) out.insert(n.place);
  for (const auto& o : n.operands) collect_places(o, out);
}

}  // namespace

CriticalPredicate CriticalPredicate::parse(std::string_view text) {
  return CriticalPredicate(PredicateParser(tokenize(text)).parse());
}

CriticalPredicate CriticalPredicate::compare(std::string place, Comparator c, long long value) {
  Node n;
  n.place = std::move(place);
  n.comparator = c;
  n.value = value;
  return CriticalPredicate(std::move(n));
}

bool CriticalPredicate::holds(const Marking& m) const { return evaluate(root_, m); }

std::vector<std::string> CriticalPredicate::places() const {
  std::set<std::string> s;
  collect_places(root_, s);
  return {s.begin(), s.end()};
}

std::string CriticalPredicate::to_string() const { return print(root_); }

void check_predicate(const PetriNet& net, const CriticalPredicate& pred) {
  std::vector<std::string> unknown;
  for (const auto& p : pred.places()) {
    if (!net.find_place(p)) unknown.push_back(p);
  }
  if (!unknown.empty()) {
    throw Error(ErrorCode::unknown_place, "predicate references unknown place '" + unknown.front() + "'", unknown);
  }
}

std::vector<std::string> SequencingTable::chronology() const {
  std::vector<std::string> out;
  for (const auto& r : rows) out.push_back(r.transition);
  return out;
}

namespace {

std::string situation_label(const PetriNet& net, const std::string& transition) {
  const auto* t = net.find_transition(transition);
  return t && !t->label.empty() ? t->label : transition;
}

void sort_tables(std::vector<SequencingTable>& tables) {
  std::stable_sort(tables.begin(), tables.end(), [](const SequencingTable& a, const SequencingTable& b) {
    if (a.rows.size() != b.rows.size()) return a.rows.size() < b.rows.size();
    return a.chronology() < b.chronology();
  });
}

bool interrupted(const ExplorationControl& control) {
  return control.stop.stop_requested() ||
         (control.deadline && std::chrono::steady_clock::now() >= *control.deadline);
}

}  // namespace

CriticalSearch find_critical(const PetriNet& net, const Marking& m0, const CriticalPredicate& pred,
                             const ExplorationBounds& bounds, const ExplorationControl& control) {
  check_bounds(bounds);
  check_predicate(net, pred);
  auto graph = reachability(net, m0, bounds, control);

  // Breadth-first discovery over id-sorted transitions records, as the first
  // edge into each marking, the lexicographically smallest shortest path.
  std::vector<std::optional<std::size_t>> discovered_by(graph.markings.size());
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    auto to = graph.edges[e].to;
    if (to != 0 && !discovered_by[to]) discovered_by[to] = e;
  }

  CriticalSearch out;
  out.truncated = graph.truncated;
  out.markings_explored = graph.markings.size();
  for (std::size_t j = 0; j < graph.markings.size(); ++j) {
    if (!pred.holds(graph.markings[j])) continue;
    SequencingTable table;
    table.initial = graph.markings.front();
    table.critical = true;
    for (std::size_t cur = j; cur != 0;) {
      const auto& edge = graph.edges[*discovered_by[cur]];
      table.rows.push_back({edge.transition, graph.markings[cur], situation_label(net, edge.transition)});
      cur = edge.from;
    }
    std::reverse(table.rows.begin(), table.rows.end());
    out.tables.push_back(std::move(table));
  }
  sort_tables(out.tables);
  return out;
}

CriticalSearch find_critical_all_paths(const PetriNet& net, const Marking& m0, const CriticalPredicate& pred,
                                       const ExplorationBounds& bounds, std::size_t max_tables,
                                       const ExplorationControl& control) {
  check_bounds(bounds);
  check_predicate(net, pred);
  CompiledNet c(net);
  CriticalSearch out;
  auto start = c.encode(m0);
  if (pred.holds(m0)) {
    out.tables.push_back({m0, {}, true});
    out.markings_explored = 1;
    return out;
  }

  std::set<CompiledNet::State> on_path{start};
  std::vector<SequencingRow> rows;
  std::function<void(const CompiledNet::State&)> extend = [&](const CompiledNet::State& s) {
    if (out.truncated.cancelled || out.truncated.tables) return;
    if (interrupted(control)) {
      out.truncated.cancelled = true;
      return;
    }
    ++out.markings_explored;
    for (std::size_t t = 0; t < c.transition_count(); ++t) {
      if (!c.enabled(s, t)) continue;
      if (rows.size() >= bounds.max_depth) {
        out.truncated.depth = true;
        return;
      }
      auto next = c.fire(s, t);
      if (std::any_of(next.begin(), next.end(), [&](long long n) { return n > bounds.max_tokens; })) {
        out.truncated.tokens = true;
        continue;
      }
      if (on_path.count(next)) continue;
      auto m = c.decode(next);
      rows.push_back({c.transition_id(t), m, situation_label(net, c.transition_id(t))});
      if (pred.holds(m)) {
        if (out.tables.size() >= max_tables) {
          out.truncated.tables = true;
          rows.pop_back();
          return;
        }
        out.tables.push_back({m0, rows, true});
      } else {
        on_path.insert(next);
        extend(next);
        on_path.erase(next);
      }
      rows.pop_back();
    }
  };
  extend(start);
  sort_tables(out.tables);
  return out;
}

std::optional<std::string> replay_mismatch(const PetriNet& net, const SequencingTable& table) {
  try {
    Marking cur = table.initial;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& row = table.rows[i];
      cur = fire(net, cur, row.transition);
      if (!(cur == row.marking)) {
        return "row " + std::to_string(i + 1) + " (" + row.transition + "): expected " + row.marking.to_string() +
               ", replay gives " + cur.to_string();
      }
    }
  } catch (const Error& e) {
    return std::string(e.what());
  }
  return std::nullopt;
}

}  // namespace railsafe::petri
