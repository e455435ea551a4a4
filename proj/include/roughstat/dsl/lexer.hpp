#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "roughstat/common.hpp"

namespace roughstat::dsl {

/// Lex and parse failures. `position` is a 1-based byte offset into the source.
class DslError : public Error {
 public:
  DslError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class LexError : public DslError {
 public:
  LexError(std::string offending, std::size_t position)
      : DslError("unexpected character '" + offending + "'", position),
        offending_(std::move(offending)) {}

  const std::string& offending() const { return offending_; }

 private:
  std::string offending_;
};

enum class TokenKind {
  Number,
  Identifier,
  Keyword,   // if then else
  Operator,  // + - * / ^ % < <= > >= == !=
  Logical,   // and or not
  LParen,
  RParen,
  Comma,
  End,
};

std::string to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::End;
  std::string lexeme;
  std::size_t position = 0;  // 1-based byte offset

  bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
};

/// Whitespace and '#' line comments are skipped; the result ends with End.
std::vector<Token> tokenize(std::string_view source);

}  // namespace roughstat::dsl
