// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "mexec/error.hpp"

namespace mexec {

enum class TokenKind { Identifier, IntLiteral, RealLiteral, Punct, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  double value = 0.0;
  SourcePos pos{};

  bool is(std::string_view punct) const {
    return kind == TokenKind::Punct && text == punct;
  }
  bool is_word(std::string_view word) const {
    return kind == TokenKind::Identifier && text == word;
  }
  std::string describe() const {
    if (kind == TokenKind::End) return "end of input";
    return "'" + text + "'";
  }
};

namespace detail {

inline constexpr std::string_view kPuncts[] = {
    "<<", ">>", "<=", ">=", "==", "!=", "+=", "-=", "*=", "/=", "++", "--",
    "&&", "||", "(", ")", "{", "}", ",", ";", "=", "<", ">", "+", "-", "*",
    "/", "%", "^", "&", "|", "~", "!"};

}  // namespace detail

// Splits source text into tokens. Handles // and /* */ comments, decimal
// reals with exponents, and 0x hex integers.
inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  int col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
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
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      SourcePos start{line, col};
      advance(2);
      while (i < src.size() && src.substr(i, 2) != "*/") advance(1);
      if (i >= src.size()) throw SyntaxError(start, "'*/'", "end of input");
      advance(2);
      continue;
    }

    Token tok;
    tok.pos = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      tok.kind = TokenKind::Identifier;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() &&
         std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      if (c == '0' && i + 1 < src.size() && (src[i + 1] == 'x' || src[i + 1] == 'X')) {
        j = i + 2;
        while (j < src.size() && std::isxdigit(static_cast<unsigned char>(src[j]))) ++j;
        if (j == i + 2) throw SyntaxError(tok.pos, "hex digits", "'" + std::string(src.substr(i, 2)) + "'");
        unsigned long long v = 0;
        auto res = std::from_chars(src.data() + i + 2, src.data() + j, v, 16);
        if (res.ec != std::errc()) {
          throw SyntaxError(tok.pos, "hex literal below 2^64", std::string(src.substr(i, j - i)));
        }
        tok.kind = TokenKind::IntLiteral;
        tok.value = static_cast<double>(v);
      } else {
        bool is_real = false;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        if (j < src.size() && src[j] == '.') {
          is_real = true;
          ++j;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
        if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
          if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
            is_real = true;
            j = k;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
          }
        }
        std::string lexeme(src.substr(i, j - i));
        tok.kind = is_real ? TokenKind::RealLiteral : TokenKind::IntLiteral;
        tok.value = std::strtod(lexeme.c_str(), nullptr);
      }
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    bool matched = false;
    for (std::string_view p : detail::kPuncts) {
      if (src.substr(i, p.size()) == p) {
        tok.kind = TokenKind::Punct;
        tok.text = std::string(p);
        advance(p.size());
        out.push_back(std::move(tok));
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw SyntaxError(tok.pos, "a token", "'" + std::string(1, c) + "'");
    }
  }
  Token end;
  end.kind = TokenKind::End;
  end.pos = {line, col};
  out.push_back(end);
  return out;
}

}  // namespace mexec
