#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>

#include "json.hpp"
#include "taskcl/errors.hpp"
#include "taskcl/syntax.hpp"

namespace taskcl {

bool is_arith_op(const std::string& name) { return name == "+" || name == "-" || name == "*"; }

namespace {

enum class Tok { Ident, Int, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
  bool adjacent;  // no whitespace before this token

  bool is_sym(std::string_view s) const { return kind == Tok::Sym && text == s; }
  bool is_kw(std::string_view s) const { return kind == Tok::Ident && text == s; }
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  bool adjacent = false;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      adjacent = false;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      adjacent = false;
      continue;
    }
    Token t{Tok::Sym, "", line, col, adjacent};
    std::size_t len = 1;
    if (ident_start(c)) {
      while (i + len < src.size() && ident_char(src[i + len])) ++len;
      t.kind = Tok::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i + len < src.size() && std::isdigit(static_cast<unsigned char>(src[i + len]))) ++len;
      t.kind = Tok::Int;
    } else {
      static const char* two[] = {"->", ">=", "<=", "!="};
      bool matched = false;
      for (const char* s : two)
        if (src.substr(i, 2) == s) matched = true;
      if (matched) {
        len = 2;
      } else if (std::string_view("(),.:+&|*!\\=<>-").find(c) == std::string_view::npos) {
        throw ParseError(line, col, "a token (unexpected character '" + std::string(1, c) + "')");
      }
    }
    t.text = std::string(src.substr(i, len));
    out.push_back(std::move(t));
    advance(len);
    adjacent = true;
  }
  out.push_back(Token{Tok::End, "", line, col, adjacent});
  return out;
}

bool is_upper_var(const std::string& name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name[0]));
}

const char* comparison_name(const std::string& sym) {
  if (sym == ">=") return "geq";
  if (sym == ">") return "gt";
  if (sym == "<=") return "leq";
  if (sym == "<") return "lt";
  if (sym == "=") return "eq";
  if (sym == "!=") return "neq";
  return nullptr;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  std::vector<AgentDecl> program() {
    std::vector<AgentDecl> decls;
    while (peek().kind != Tok::End) {
      const Token& name = peek();
      if (name.kind != Tok::Ident || keyword(name.text)) fail("an agent name");
      next();
      expect(":");
      free_.clear();
      Formula f = formula();
      expect(".");
      for (auto it = free_.rbegin(); it != free_.rend(); ++it) f = place(f, *it);
      decls.push_back(AgentDecl{name.text, f});
    }
    return decls;
  }

  Formula query() {
    free_.clear();
    Formula f = formula();
    if (peek().is_sym(".")) next();
    expect_end();
    for (auto it = free_.rbegin(); it != free_.rend(); ++it)
      f = Formula::cex(*it, abstract_name(f, *it));
    return f;
  }

  Term whole_term(std::vector<std::string>* free_vars) {
    free_.clear();
    Term t = term();
    expect_end();
    if (free_vars) *free_vars = free_;
    return t;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& expected) const {
    throw ParseError(peek().line, peek().col, expected);
  }

  void expect(std::string_view sym) {
    if (!peek().is_sym(sym)) fail("'" + std::string(sym) + "'");
    next();
  }

  void expect_close(const Token& open) {
    if (!peek().is_sym(")"))
      throw ParseError(open.line, open.col, "')' to close this parenthesis");
    next();
  }

  void expect_end() {
    if (peek().kind != Tok::End) fail("end of input");
  }

  static bool keyword(const std::string& s) { return s == "forall" || s == "exists"; }

  // ---- formulas ----------------------------------------------------------

  Formula formula() {
    Formula lhs = choice();
    if (peek().is_sym("->")) {
      next();
      return Formula::impl(lhs, formula());
    }
    return lhs;
  }

  Formula choice() {
    Formula lhs = por();
    std::string op;
    while (peek().is_sym("+") || peek().is_sym("&")) {
      if (!op.empty() && op != peek().text) fail("parentheses when mixing '+' and '&'");
      op = next().text;
      Formula rhs = por();
      lhs = op == "+" ? Formula::cor(lhs, rhs) : Formula::cand(lhs, rhs);
    }
    return lhs;
  }

  Formula por() {
    Formula lhs = pand();
    while (peek().is_sym("|")) {
      next();
      lhs = Formula::por(lhs, pand());
    }
    return lhs;
  }

  Formula pand() {
    Formula lhs = unary();
    while (peek().is_sym("*")) {
      next();
      lhs = Formula::pand(lhs, unary());
    }
    return lhs;
  }

  Formula unary() {
    if (peek().is_sym("!")) {
      next();
      return Formula::bang(unary());
    }
    if (peek().is_kw("forall") || peek().is_kw("exists")) {
      const bool universal = next().text == "forall";
      std::vector<std::string> names;
      while (peek().kind == Tok::Ident && !keyword(peek().text)) names.push_back(next().text);
      if (names.empty()) fail("a bound variable name");
      expect(".");
      for (const auto& n : names) scope_.push_back(n);
      Formula body = formula();
      for (std::size_t i = 0; i < names.size(); ++i) scope_.pop_back();
      for (auto it = names.rbegin(); it != names.rend(); ++it)
        body = universal ? Formula::call(*it, body) : Formula::cex(*it, body);
      return body;
    }
    return primary();
  }

  Formula primary() {
    if (peek().is_sym("(")) {
      const std::size_t save = pos_;
      const std::size_t free_save = free_.size();
      const std::size_t scope_save = scope_.size();
      try {
        const Token& open = next();
        Formula f = formula();
        expect_close(open);
        if (!comparison_name(peek().text) || peek().kind != Tok::Sym) return f;
      } catch (const ParseError&) {
        pos_ = save;
        free_.resize(free_save);
        scope_.resize(scope_save);
        try {
          return atom();
        } catch (const ParseError&) {
          pos_ = save;
          free_.resize(free_save);
          scope_.resize(scope_save);
          const Token& open = next();
          Formula f = formula();
          expect_close(open);
          return f;
        }
      }
      // `(t) >= u`: reparse the parenthesized part as a term.
      pos_ = save;
      free_.resize(free_save);
    }
    return atom();
  }

  Formula atom() {
    if (!starts_atomic(peek(), true)) fail("a formula");
    Term t = app();
    if (peek().kind == Tok::Sym) {
      if (const char* cmp = comparison_name(peek().text)) {
        next();
        Term rhs = app();
        t = Term::apply(Term::constant(cmp), {t, rhs});
      }
    }
    return Formula::atom(t);
  }

  // ---- terms -------------------------------------------------------------

  static bool starts_atomic(const Token& t, bool first) {
    if (t.kind == Tok::Ident) return !keyword(t.text);
    if (t.kind == Tok::Int) return true;
    return t.is_sym("(") || t.is_sym("\\") || (first && t.is_sym("-"));
  }

  Term term() {
    Term lhs = mul();
    while (peek().is_sym("+") || peek().is_sym("-")) {
      std::string op = next().text;
      lhs = Term::apply(Term::constant(op), {lhs, mul()});
    }
    return lhs;
  }

  Term mul() {
    Term lhs = app();
    while (peek().is_sym("*")) {
      next();
      lhs = Term::apply(Term::constant("*"), {lhs, app()});
    }
    return lhs;
  }

  Term app() {
    if (!starts_atomic(peek(), true)) fail("a term");
    Term head = atomic(true);
    while (starts_atomic(peek(), false)) head = Term::app(head, atomic(false));
    return head;
  }

  Term atomic(bool allow_negative) {
    const Token& t = peek();
    if (allow_negative && peek().is_sym("-") && peek(1).kind == Tok::Int && peek(1).adjacent) {
      next();
      return integer(next(), true);
    }
    if (t.kind == Tok::Int) return integer(next(), false);
    if (peek().is_sym("(")) {
      const Token& open = next();
      Term inner = term();
      expect_close(open);
      return inner;
    }
    if (peek().is_sym("\\")) {
      next();
      std::vector<std::string> names;
      while (peek().kind == Tok::Ident && !keyword(peek().text)) names.push_back(next().text);
      if (names.empty()) fail("a lambda binder");
      expect(".");
      for (const auto& n : names) scope_.push_back(n);
      Term body = term();
      for (std::size_t i = 0; i < names.size(); ++i) scope_.pop_back();
      for (auto it = names.rbegin(); it != names.rend(); ++it) body = Term::lam(*it, body);
      return body;
    }
    if (t.kind != Tok::Ident) fail("a term");
    const Token& name = next();
    Term head = resolve(name.text);
    if (peek().is_sym("(") && peek().adjacent) {
      const Token& open = next();
      std::vector<Term> args{term()};
      while (peek().is_sym(",")) {
        next();
        args.push_back(term());
      }
      expect_close(open);
      head = Term::apply(head, args);
    }
    return head;
  }

  Term integer(const Token& tok, bool negative) {
    std::string digits = negative ? "-" + tok.text : tok.text;
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || p != digits.data() + digits.size())
      throw ParseError(tok.line, tok.col, "an integer in signed 64-bit range");
    return Term::integer(v);
  }

  Term resolve(const std::string& name) {
    for (std::size_t i = scope_.size(); i-- > 0;)
      if (scope_[i] == name)
        return Term::bound(static_cast<std::uint32_t>(scope_.size() - 1 - i), name);
    if (is_upper_var(name) &&
        std::find(free_.begin(), free_.end(), name) == free_.end())
      free_.push_back(name);
    return Term::constant(name);
  }

  // ---- implicit quantification --------------------------------------------

  static Term abstract_const(const Term& t, const std::string& name, std::uint32_t depth) {
    switch (t.kind()) {
      case TermKind::Const:
        return t.name() == name ? Term::bound(depth, name) : t;
      case TermKind::Bound:
        return t.index() >= depth ? Term::bound(t.index() + 1, t.name()) : t;
      case TermKind::App:
        return Term::app(abstract_const(t.fun(), name, depth), abstract_const(t.arg(), name, depth));
      case TermKind::Lam:
        return Term::lam(t.name(), abstract_const(t.body(), name, depth + 1));
      default:
        return t;
    }
  }

  static Formula abstract_name(const Formula& f, const std::string& name) {
    return map_atoms(f, [&](const Term& t, std::uint32_t depth) {
      return abstract_const(t, name, depth);
    });
  }

  static bool mentions(const Term& t, const std::string& name) {
    switch (t.kind()) {
      case TermKind::Const:
        return t.name() == name;
      case TermKind::App:
        return mentions(t.fun(), name) || mentions(t.arg(), name);
      case TermKind::Lam:
        return mentions(t.body(), name);
      default:
        return false;
    }
  }

  static bool mentions(const Formula& f, const std::string& name) {
    bool found = false;
    map_atoms(f, [&](const Term& t, std::uint32_t) {
      found = found || mentions(t, name);
      return t;
    });
    return found;
  }

  // Closes `name` at the smallest enclosing `!`, or one side of a `*`/`&`
  // holding every occurrence; otherwise at `f` itself.
  static Formula place(const Formula& f, const std::string& name) {
    if (f.is(Op::Bang)) return Formula::bang(place(f.body(), name));
    if (f.is(Op::PAnd) || f.is(Op::CAnd)) {
      const bool l = mentions(f.lhs(), name);
      const bool r = mentions(f.rhs(), name);
      if (l && !r) return Formula::binary(f.op(), place(f.lhs(), name), f.rhs());
      if (r && !l) return Formula::binary(f.op(), f.lhs(), place(f.rhs(), name));
    }
    return Formula::call(name, abstract_name(f, name));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> scope_;
  std::vector<std::string> free_;
};

}  // namespace

std::vector<AgentDecl> parse_program(std::string_view text) { return Parser(text).program(); }

Formula parse_query(std::string_view text) { return Parser(text).query(); }

Term parse_term(std::string_view text, std::vector<std::string>* free_vars) {
  return Parser(text).whole_term(free_vars);
}

Term parse_closed_term(std::string_view text) {
  std::vector<std::string> free;
  Term t;
  try {
    t = parse_term(text, &free);
  } catch (const ParseError& e) {
    throw BadTerm(std::string("unparsable term: ") + e.what());
  }
  if (!free.empty()) throw BadTerm("term is not closed: free variable " + free.front());
  return t;
}

MoveScript parse_moves(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(1, static_cast<int>(e.byte), "valid JSON");
  }
  if (!doc.is_object() || !doc.contains("moves") || !doc["moves"].is_array())
    throw ParseError(1, 1, "an object with a \"moves\" array");
  MoveScript script;
  for (const auto& m : doc["moves"]) {
    if (!m.is_object()) throw ParseError(1, 1, "a move object");
    MoveEntry e;
    const bool has_pick = m.contains("pick");
    const bool has_term = m.contains("term");
    if (has_pick == has_term) throw ParseError(1, 1, "exactly one of \"pick\" or \"term\"");
    if (has_pick) {
      if (!m["pick"].is_number_integer() || m["pick"].get<long long>() < 0)
        throw ParseError(1, 1, "a non-negative integer \"pick\"");
      e.payload = MoveEntry::Pick{m["pick"].get<int>()};
    } else {
      if (!m["term"].is_string()) throw ParseError(1, 1, "a string \"term\"");
      e.payload = MoveEntry::TermText{m["term"].get<std::string>()};
    }
    if (m.contains("expected_site")) {
      if (!m["expected_site"].is_string()) throw ParseError(1, 1, "a string \"expected_site\"");
      e.expected_site = m["expected_site"].get<std::string>();
    }
    script.entries.push_back(std::move(e));
  }
  return script;
}

}  // namespace taskcl
