#include <cctype>
#include <cmath>
#include <charconv>
#include <limits>
#include <optional>

#include "ghg/error.hpp"
#include "ghg/expr.hpp"

namespace ghg {

namespace {

std::optional<Function> lookup_function(std::string_view name) {
  if (name == "sin") return Function::sin;
  if (name == "cos") return Function::cos;
  if (name == "exp") return Function::exp;
  if (name == "tanh") return Function::tanh;
  if (name == "bump") return Function::bump;
  return std::nullopt;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  Parser(std::string_view text, const std::set<std::string, std::less<>>& vars)
      : text_(text), vars_(vars) {}

  Expr run() {
    Expr e = expr();
    skip_space();
    if (pos_ < text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
    throw ParseError(what, at);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])) != 0) ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Expr expr() {
    Expr lhs = term();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      Expr rhs = term();
      lhs = c == '+' ? Expr::add(std::move(lhs), std::move(rhs))
                     : Expr::sub(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr term() {
    if (peek() == '-') {
      ++pos_;
      return Expr::neg(term());
    }
    Expr lhs = factor();
    for (char c = peek(); c == '*' || c == '/'; c = peek()) {
      ++pos_;
      Expr rhs = factor();
      lhs = c == '*' ? Expr::mul(std::move(lhs), std::move(rhs))
                     : Expr::div(std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr factor() {
    Expr b = base();
    if (peek() != '^') return b;
    ++pos_;
    skip_space();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '-') fail("negative exponent");
    if (pos_ >= text_.size() || !is_digit(text_[pos_]))
      fail("exponent must be a nonnegative integer literal");
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E'))
      fail_at("fractional exponent", start);
    unsigned k = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, k);
    if (ec != std::errc() || ptr != text_.data() + pos_) fail_at("exponent out of range", start);
    return Expr::pow(std::move(b), k);
  }

  Expr base() {
    const char c = peek();
    if (c == '\0') fail("unexpected end of input");
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (c == '-') {
      ++pos_;
      return Expr::neg(factor());
    }
    if (is_digit(c) || c == '.') return number();
    if (is_ident_start(c)) return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && is_digit(text_[p])) {
        pos_ = p;
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(v))
      fail_at("malformed number", start);
    return Expr::constant(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    if (peek() == '(') {
      auto f = lookup_function(name);
      if (!f) fail_at("unknown function '" + std::string(name) + "'", start);
      ++pos_;
      Expr arg = expr();
      expect(')');
      return Expr::call(*f, std::move(arg));
    }
    if (vars_.find(name) == vars_.end())
      fail_at("unknown identifier '" + std::string(name) + "'", start);
    return Expr::variable(std::string(name));
  }

  std::string_view text_;
  const std::set<std::string, std::less<>>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const std::set<std::string, std::less<>>& vars) {
  return Parser(text, vars).run();
}

}  // namespace ghg
