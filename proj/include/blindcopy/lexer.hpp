#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "blindcopy/text.hpp"

namespace blindcopy::detail {

struct Lexer {
  std::string_view text;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line, col, msg);
  }

  void advance() {
    if (pos < text.size() && text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_ws() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '#') {
        while (pos < text.size() && text[pos] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool done() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      advance();
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  bool eat_word(std::string_view word) {
    skip_ws();
    size_t p = pos;
    for (char c : word) {
      if (p >= text.size() || text[p] != c) return false;
      ++p;
    }
    if (p < text.size()) {
      char c = text[p];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') return false;
    }
    while (pos < p) advance();
    return true;
  }

  std::string ident() {
    skip_ws();
    if (pos >= text.size()) fail("expected identifier");
    if (text[pos] == '"') {
      advance();
      std::string out;
      while (pos < text.size() && text[pos] != '"') {
        out += text[pos];
        advance();
      }
      if (pos >= text.size()) fail("unterminated quoted identifier");
      advance();
      if (out.empty()) fail("empty quoted identifier");
      return out;
    }
    char c = text[pos];
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_')
      fail("expected identifier");
    std::string out;
    while (pos < text.size()) {
      c = text[pos];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        out += c;
        advance();
      } else {
        break;
      }
    }
    return out;
  }

  int number() {
    skip_ws();
    if (pos >= text.size() ||
        !std::isdigit(static_cast<unsigned char>(text[pos])))
      fail("expected number");
    int out = 0;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      out = out * 10 + (text[pos] - '0');
      advance();
    }
    return out;
  }
};

bool is_variable_name(const std::string& s, int* index);

}  // namespace blindcopy::detail
