#pragma once

// Tokenizer shared by the constraint and task-statement parsers.

#include <cstdint>
#include <string>
#include <string_view>

#include "gswcast/constraint.hpp"
#include "gswcast/error.hpp"

namespace gswcast::detail {

enum class Tok { Ident, Int, Real, String, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier / symbol / unescaped string body / numeric text
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const noexcept { return cur_; }
  Token next() {
    Token t = cur_;
    advance();
    return t;
  }

  bool is_keyword(std::string_view kw) const noexcept { return cur_.kind == Tok::Ident && iequals(cur_.text, kw); }
  bool is_symbol(std::string_view s) const noexcept { return cur_.kind == Tok::Symbol && cur_.text == s; }

  void expect_keyword(std::string_view kw) {
    if (!is_keyword(kw)) throw SyntaxError(cur_.pos, std::string(kw));
    advance();
  }
  void expect_symbol(std::string_view s) {
    if (!is_symbol(s)) throw SyntaxError(cur_.pos, "'" + std::string(s) + "'");
    advance();
  }
  std::string expect_ident(std::string_view what) {
    if (cur_.kind != Tok::Ident) throw SyntaxError(cur_.pos, std::string(what));
    return next().text;
  }
  std::int64_t expect_int(std::string_view what) {
    bool neg = false;
    std::size_t pos = cur_.pos;
    if (is_symbol("-")) {
      neg = true;
      advance();
    }
    if (cur_.kind != Tok::Int) throw SyntaxError(pos, std::string(what));
    std::int64_t v = 0;
    try {
      v = std::stoll(cur_.text);
    } catch (const std::exception&) {
      throw SyntaxError(pos, std::string(what) + " within 64-bit range");
    }
    advance();
    return neg ? -v : v;
  }
  double expect_number(std::string_view what) {
    std::size_t pos = cur_.pos;
    bool neg = false;
    if (is_symbol("-")) {
      neg = true;
      advance();
    }
    if (cur_.kind != Tok::Int && cur_.kind != Tok::Real) throw SyntaxError(pos, std::string(what));
    double v = std::stod(cur_.text);
    advance();
    return neg ? -v : v;
  }

  static bool iequals(std::string_view a, std::string_view b) noexcept {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      char x = a[i], y = b[i];
      if (x >= 'a' && x <= 'z') x = static_cast<char>(x - 32);
      if (y >= 'a' && y <= 'z') y = static_cast<char>(y - 32);
      if (x != y) return false;
    }
    return true;
  }

 private:
  static bool ident_start(char c) noexcept {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool ident_char(char c) noexcept { return ident_start(c) || (c >= '0' && c <= '9') || c == '.'; }
  static bool digit(char c) noexcept { return c >= '0' && c <= '9'; }

  void advance() {
    while (i_ < src_.size() && (src_[i_] == ' ' || src_[i_] == '\t' || src_[i_] == '\n' || src_[i_] == '\r')) ++i_;
    cur_ = Token{};
    cur_.pos = i_;
    if (i_ >= src_.size()) return;
    const char c = src_[i_];
    if (ident_start(c)) {
      std::size_t j = i_;
      while (j < src_.size() && ident_char(src_[j])) ++j;
      cur_.kind = Tok::Ident;
      cur_.text = std::string(src_.substr(i_, j - i_));
      i_ = j;
    } else if (digit(c)) {
      std::size_t j = i_;
      bool real = false;
      while (j < src_.size() && digit(src_[j])) ++j;
      if (j < src_.size() && src_[j] == '.') {
        real = true;
        ++j;
        while (j < src_.size() && digit(src_[j])) ++j;
      }
      if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
        if (k < src_.size() && digit(src_[k])) {
          real = true;
          j = k;
          while (j < src_.size() && digit(src_[j])) ++j;
        }
      }
      cur_.kind = real ? Tok::Real : Tok::Int;
      cur_.text = std::string(src_.substr(i_, j - i_));
      i_ = j;
    } else if (c == '\'') {
      std::string body;
      std::size_t j = i_ + 1;
      for (;;) {
        if (j >= src_.size()) throw SyntaxError(i_, "closing quote");
        if (src_[j] == '\'') {
          if (j + 1 < src_.size() && src_[j + 1] == '\'') {
            body.push_back('\'');
            j += 2;
            continue;
          }
          ++j;
          break;
        }
        body.push_back(src_[j++]);
      }
      cur_.kind = Tok::String;
      cur_.text = std::move(body);
      i_ = j;
    } else {
      static constexpr std::string_view two[] = {"<=", ">=", "!=", "<>"};
      for (auto s : two) {
        if (src_.substr(i_, 2) == s) {
          cur_.kind = Tok::Symbol;
          cur_.text = std::string(s);
          i_ += 2;
          return;
        }
      }
      if (std::string_view("()=<>,*-").find(c) == std::string_view::npos) {
        throw SyntaxError(i_, "a token");
      }
      cur_.kind = Tok::Symbol;
      cur_.text = std::string(1, c);
      ++i_;
    }
  }

  std::string_view src_;
  std::size_t i_ = 0;
  Token cur_;
};

/// Parses one constraint expression starting at the lexer's cursor and
/// stops at the first token that cannot continue it.
Constraint parse_constraint_expr(Lexer& lex);

}  // namespace gswcast::detail
