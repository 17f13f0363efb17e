#include "critex/parse.hpp"

#include <cctype>
#include <optional>

namespace critex {
namespace {

enum class Tok { Ident, Int, Plus, Minus, Star, Slash, Caret, LParen, RParen, Semi, End };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_ws();
    const int line = line_, col = col_;
    if (pos_ >= src_.size()) return {Tok::End, "", line, col};
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string id;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        id.push_back(take());
      return {Tok::Ident, std::move(id), line, col};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        num.push_back(take());
      if (pos_ < src_.size() && src_[pos_] == '.')
        throw ParseError("decimal literals are not supported; use p/q rationals", line_, col_);
      return {Tok::Int, std::move(num), line, col};
    }
    take();
    switch (c) {
      case '+': return {Tok::Plus, "+", line, col};
      case '-': return {Tok::Minus, "-", line, col};
      case '*': return {Tok::Star, "*", line, col};
      case '/': return {Tok::Slash, "/", line, col};
      case '^': return {Tok::Caret, "^", line, col};
      case '(': return {Tok::LParen, "(", line, col};
      case ')': return {Tok::RParen, ")", line, col};
      case ';': return {Tok::Semi, ";", line, col};
      default: throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else {
        break;
      }
    }
  }

  char take() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> names)
      : lex_(src), names_(names.begin(), names.end()) {
    advance();
  }

  // expr: ['+'|'-'] term (('+'|'-') term)*
  Poly parse_expr() {
    bool neg = false;
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      if (cur_.kind == Tok::Minus) neg = !neg;
      advance();
    }
    Poly acc = parse_term();
    if (neg) acc = -acc;
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const bool minus = cur_.kind == Tok::Minus;
      advance();
      Poly t = parse_term();
      if (minus)
        acc -= t;
      else
        acc += t;
    }
    return acc;
  }

  const Token& current() const { return cur_; }
  void advance() { cur_ = lex_.next(); }

  void expect(Tok k, const char* what) {
    if (cur_.kind != k) throw ParseError(std::string("expected ") + what, cur_.line, cur_.col);
    advance();
  }

  void set_names(std::vector<std::string> names) { names_ = std::move(names); }

 private:
  // term: factor (('*'|'/') factor)*
  Poly parse_term() {
    Poly acc = parse_factor();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const bool divide = cur_.kind == Tok::Slash;
      const Token op = cur_;
      advance();
      Poly rhs = parse_factor();
      if (divide) {
        if (rhs.total_degree() > 0)
          throw ParseError("division only by nonzero constants", op.line, op.col);
        if (rhs.is_zero()) throw ParseError("division by zero", op.line, op.col);
        Monomial one(acc.nvars(), 0u);
        const Rational* c = rhs.coeff(one);
        acc = acc * (Rational(1) / *c);
      } else {
        acc = acc * rhs;
      }
    }
    return acc;
  }

  // factor: '-' factor | power
  Poly parse_factor() {
    if (cur_.kind == Tok::Minus) {
      advance();
      return -parse_factor();
    }
    return parse_power();
  }

  // power: primary ['^' INT]
  Poly parse_power() {
    Poly base = parse_primary();
    if (cur_.kind == Tok::Caret) {
      advance();
      if (cur_.kind != Tok::Int)
        throw ParseError("exponent must be a nonnegative integer", cur_.line, cur_.col);
      const unsigned long e = std::stoul(cur_.text);
      if (e > 64) throw ParseError("exponent too large", cur_.line, cur_.col);
      advance();
      return base.pow(static_cast<unsigned>(e));
    }
    return base;
  }

  Poly parse_primary() {
    const int nv = static_cast<int>(names_.size());
    if (cur_.kind == Tok::Int) {
      Rational c(cur_.text);
      c.canonicalize();
      advance();
      return Poly::constant(nv, c);
    }
    if (cur_.kind == Tok::Ident) {
      for (int i = 0; i < nv; ++i) {
        if (names_[i] == cur_.text) {
          advance();
          return Poly::variable(nv, i);
        }
      }
      throw ParseError("unknown variable '" + cur_.text + "'", cur_.line, cur_.col);
    }
    if (cur_.kind == Tok::LParen) {
      advance();
      Poly inner = parse_expr();
      expect(Tok::RParen, "')'");
      return inner;
    }
    throw ParseError("expected a number, variable or '('", cur_.line, cur_.col);
  }

  Lexer lex_;
  Token cur_;
  std::vector<std::string> names_;
};

}  // namespace

Poly parse_polynomial(std::string_view text, std::span<const std::string> var_names) {
  Parser p(text, var_names);
  Poly result = p.parse_expr();
  if (p.current().kind != Tok::End)
    throw ParseError("trailing input after polynomial", p.current().line, p.current().col);
  return result;
}

ParsedProblem parse_problem(std::string_view text) {
  ParsedProblem out;
  Parser p(text, {});
  bool vars_seen = false;
  while (p.current().kind != Tok::End) {
    const Token head = p.current();
    if (head.kind != Tok::Ident)
      throw ParseError("expected 'vars', 'objective' or 'constraint'", head.line, head.col);
    if (head.text == "vars") {
      if (vars_seen) throw ParseError("duplicate vars statement", head.line, head.col);
      p.advance();
      while (p.current().kind == Tok::Ident) {
        for (const auto& n : out.var_names)
          if (n == p.current().text)
            throw ParseError("duplicate variable '" + p.current().text + "'", p.current().line,
                             p.current().col);
        out.var_names.push_back(p.current().text);
        p.advance();
      }
      if (out.var_names.empty())
        throw ParseError("vars statement declares no variables", head.line, head.col);
      p.expect(Tok::Semi, "';'");
      p.set_names(out.var_names);
      vars_seen = true;
      continue;
    }
    if (!vars_seen) throw ParseError("vars statement must come first", head.line, head.col);
    if (head.text == "objective") {
      if (out.has_objective) throw ParseError("duplicate objective", head.line, head.col);
      p.advance();
      out.objective = p.parse_expr();
      p.expect(Tok::Semi, "';'");
      out.has_objective = true;
      continue;
    }
    if (head.text == "constraint") {
      p.advance();
      out.constraints.push_back(p.parse_expr());
      p.expect(Tok::Semi, "';'");
      continue;
    }
    throw ParseError("unknown statement '" + head.text + "'", head.line, head.col);
  }
  if (!vars_seen) throw ParseError("missing vars statement", 1, 1);
  if (!out.has_objective) throw ParseError("missing objective statement", 1, 1);
  if (out.constraints.size() >= out.var_names.size())
    throw ParseError("need fewer constraints than variables", 1, 1);
  return out;
}

}  // namespace critex
