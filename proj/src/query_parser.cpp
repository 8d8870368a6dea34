#include <cctype>

#include "railsafe/query.hpp"
#include "railsafe/text.hpp"

namespace railsafe::query {

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::eq: return "=";
    case CompareOp::ne: return "!=";
    case CompareOp::lt: return "<";
    case CompareOp::le: return "<=";
    case CompareOp::gt: return ">";
    case CompareOp::ge: return ">=";
  }
  return "";
}

bool compare(long long lhs, CompareOp op, long long rhs) {
  switch (op) {
    case CompareOp::eq: return lhs == rhs;
    case CompareOp::ne: return lhs != rhs;
    case CompareOp::lt: return lhs < rhs;
    case CompareOp::le: return lhs <= rhs;
    case CompareOp::gt: return lhs > rhs;
    case CompareOp::ge: return lhs >= rhs;
  }
  return false;
}

std::string_view to_string(Projection p) {
  switch (p) {
    case Projection::ids: return "ids";
    case Projection::summaries: return "summaries";
    case Projection::full: return "full";
  }
  return "";
}

std::optional<Projection> parse_projection(std::string_view text) {
  if (text == "ids" || text == "ids-only") return Projection::ids;
  if (text == "summaries") return Projection::summaries;
  if (text == "full") return Projection::full;
  return std::nullopt;
}

Expr Expr::make_atom(Atom a) {
  Expr e;
  e.atom = std::move(a);
  return e;
}

Expr Expr::all_of(std::vector<Expr> operands) {
  Expr e;
  e.kind = Kind::all_of;
  e.operands = std::move(operands);
  return e;
}

Expr Expr::any_of(std::vector<Expr> operands) {
  Expr e;
  e.kind = Kind::any_of;
  e.operands = std::move(operands);
  return e;
}

Expr Expr::negate(Expr operand) {
  Expr e;
  e.kind = Kind::negate;
  e.operands.push_back(std::move(operand));
  return e;
}

namespace {

constexpr std::string_view kActorCount = "actors.trains";

struct Token {
  enum class Kind { word, string, number, cmp, lparen, rparen, end } kind;
  std::string text;
  SourcePosition pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      SourcePosition pos{line_, col_};
      if (i_ >= s_.size()) {
        out.push_back({Token::Kind::end, "", pos});
        return out;
      }
      char c = s_[i_];
      if (c == '(' || c == ')') {
        advance();
        out.push_back({c == '(' ? Token::Kind::lparen : Token::Kind::rparen, std::string(1, c), pos});
      } else if (c == '"') {
        out.push_back({Token::Kind::string, read_string(pos), pos});
      } else if (c == '<' || c == '>' || c == '=' || c == '!') {
        std::string op(1, c);
        advance();
        if (i_ < s_.size() && s_[i_] == '=') {
          op += '=';
          advance();
        }
        if (op == "!" || op == "==") {
          throw Error(ErrorCode::syntax_error, "unknown operator '" + op + "'", {"=", "!=", "<", "<=", ">", ">="}, pos);
        }
        out.push_back({Token::Kind::cmp, op, pos});
      } else if (word_char(c)) {
        std::string w;
        while (i_ < s_.size() && word_char(s_[i_])) {
          w += s_[i_];
          advance();
        }
        bool numeric = w.find_first_not_of("0123456789") == std::string::npos;
        out.push_back({numeric ? Token::Kind::number : Token::Kind::word, w, pos});
      } else {
        throw Error(ErrorCode::syntax_error, std::string("unexpected character '") + c + "'", {}, pos);
      }
    }
  }

 private:
  static bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
  }

  void advance() {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_space() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) advance();
  }

  std::string read_string(SourcePosition start) {
    advance();
    std::string out;
    while (i_ < s_.size()) {
      char c = s_[i_];
      advance();
      if (c == '"') return out;
      if (c == '\\') {
        if (i_ >= s_.size()) break;
        out += s_[i_];
        advance();
      } else {
        out += c;
      }
    }
    throw Error(ErrorCode::syntax_error, "unterminated string", {"'\"'"}, start);
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : t_(std::move(tokens)) {}

  QueryAst run() {
    QueryAst ast;
    if (peek().kind == Token::Kind::end) return ast;
    ast.root = parse_or();
    if (peek().kind != Token::Kind::end) fail({"'and'", "'or'", "end of input"});
    return ast;
  }

 private:
  const Token& peek() const { return t_[pos_]; }
  bool keyword(std::string_view kw) const { return peek().kind == Token::Kind::word && text::iequals(peek().text, kw); }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const auto& t = peek();
    std::string found = t.kind == Token::Kind::end ? "end of input" : "'" + t.text + "'";
    std::string list;
    for (const auto& e : expected) list += (list.empty() ? "" : ", ") + e;
    throw Error(ErrorCode::syntax_error, "expected " + list + " but found " + found, std::move(expected), t.pos);
  }

  void expect_keyword(std::string_view kw) {
    if (!keyword(kw)) fail({"'" + std::string(kw) + "'"});
    ++pos_;
  }

  std::string expect_string() {
    if (peek().kind != Token::Kind::string) fail({"quoted string"});
    return t_[pos_++].text;
  }

  Expr parse_or() {
    Expr first = parse_and();
    if (!keyword("or")) return first;
    std::vector<Expr> ops{std::move(first)};
    while (keyword("or")) {
      ++pos_;
      ops.push_back(parse_and());
    }
    return Expr::any_of(std::move(ops));
  }

  Expr parse_and() {
    Expr first = parse_not();
    if (!keyword("and")) return first;
    std::vector<Expr> ops{std::move(first)};
    while (keyword("and")) {
      ++pos_;
      ops.push_back(parse_not());
    }
    return Expr::all_of(std::move(ops));
  }

  Expr parse_not() {
    if (keyword("not")) {
      ++pos_;
      return Expr::negate(parse_not());
    }
    if (peek().kind == Token::Kind::lparen) {
      ++pos_;
      Expr e = parse_or();
      if (peek().kind != Token::Kind::rparen) fail({"')'", "'and'", "'or'"});
      ++pos_;
      return e;
    }
    return Expr::make_atom(parse_atom());
  }

  Atom parse_atom() {
    static const std::vector<std::string> kAtomStart = {"parameter id", "'actors.trains'", "'has'", "'status'",
                                                        "'system'", "'not'", "'('"};
    if (peek().kind != Token::Kind::word) fail(kAtomStart);
    const Token& head = peek();
    Atom a;
    if (text::iequals(head.text, kActorCount)) {
      ++pos_;
      if (peek().kind != Token::Kind::cmp) fail({"comparison operator"});
      const auto& op = peek().text;
      a.kind = Atom::Kind::actor_count;
      a.op = op == "=" ? CompareOp::eq : op == "!=" ? CompareOp::ne : op == "<" ? CompareOp::lt
           : op == "<=" ? CompareOp::le : op == ">" ? CompareOp::gt : CompareOp::ge;
      ++pos_;
      if (peek().kind != Token::Kind::number) fail({"integer"});
      auto n = text::parse_int(peek().text);
      if (!n) fail({"integer"});
      a.count = *n;
      ++pos_;
      return a;
    }
    if (keyword("has")) {
      ++pos_;
      expect_keyword("critical");
      a.kind = Atom::Kind::has_critical;
      return a;
    }
    if (keyword("status")) {
      ++pos_;
      expect_keyword("is");
      auto s = peek().kind == Token::Kind::word ? parse_status(text::to_lower(peek().text)) : std::nullopt;
      if (!s) fail({"'draft'", "'validated'"});
      ++pos_;
      a.kind = Atom::Kind::status_is;
      a.status = *s;
      return a;
    }
    if (keyword("system")) {
      ++pos_;
      expect_keyword("is");
      a.kind = Atom::Kind::system_is;
      a.term = expect_string();
      return a;
    }
    auto param = parse_parameter(head.text);
    if (!param) {
      const Token& next = t_[pos_ + 1];
      bool looks_like_param = next.kind == Token::Kind::word &&
                              (text::iequals(next.text, "has") || text::iequals(next.text, "isa"));
      if (looks_like_param) {
        throw Error(ErrorCode::unknown_parameter, "unknown parameter '" + head.text + "'", {}, head.pos);
      }
      fail(kAtomStart);
    }
    ++pos_;
    if (keyword("has")) a.kind = Atom::Kind::param_has;
    else if (keyword("isa")) a.kind = Atom::Kind::param_isa;
    else fail({"'has'", "'isa'"});
    ++pos_;
    a.parameter = *param;
    a.term = expect_string();
    return a;
  }

  std::vector<Token> t_;
  std::size_t pos_ = 0;
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + '"';
}

std::string print_expr(const Expr& e) {
  auto operand = [](const Expr& o) {
    bool compound = o.kind == Expr::Kind::all_of || o.kind == Expr::Kind::any_of;
    return compound ? "(" + print_expr(o) + ")" : print_expr(o);
  };
  switch (e.kind) {
    case Expr::Kind::atom: return print_atom(e.atom);
    case Expr::Kind::negate: return "not " + operand(e.operands.front());
    case Expr::Kind::all_of:
    case Expr::Kind::any_of: {
      std::string sep = e.kind == Expr::Kind::all_of ? " and " : " or ";
      std::string out;
      for (const auto& o : e.operands) out += (out.empty() ? "" : sep) + operand(o);
      return out;
    }
  }
  return "";
}

}  // namespace

QueryAst parse_query(std::string_view text) { return Parser(Lexer(text).run()).run(); }

std::string print_atom(const Atom& a) {
  switch (a.kind) {
    case Atom::Kind::param_has: return std::string(to_string(a.parameter)) + " has " + quote(a.term);
    case Atom::Kind::param_isa: return std::string(to_string(a.parameter)) + " isa " + quote(a.term);
    case Atom::Kind::actor_count:
      return std::string(kActorCount) + " " + std::string(to_string(a.op)) + " " + std::to_string(a.count);
    case Atom::Kind::has_critical: return "has critical";
    case Atom::Kind::status_is: return "status is " + std::string(to_string(a.status));
    case Atom::Kind::system_is: return "system is " + quote(a.term);
  }
  return "";
}

std::string print_query(const QueryAst& ast) { return ast.root ? print_expr(*ast.root) : std::string(); }

}  // namespace railsafe::query
