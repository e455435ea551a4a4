#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "roughstat/dsl/ast.hpp"
#include "roughstat/dsl/lexer.hpp"
#include "roughstat/dsl/program.hpp"

namespace roughstat::dsl {

class ParseError : public DslError {
 public:
  using DslError::DslError;
};

/// Recursive descent over
///
///   expr     := "if" orcond "then" expr "else" expr | orcond
///   orcond   := andcond { "or" andcond }
///   andcond  := notcond { "and" notcond }
///   notcond  := "not" notcond | compare
///   compare  := sum [ relop sum ]
///   sum      := term { ("+" | "-") term }
///   term     := factor { ("*" | "/" | "%") factor }
///   factor   := "-" factor | power
///   power    := base [ "^" factor ]
///   base     := number | "k" | "x" | ident "(" expr { "," expr } ")" | "(" expr ")"
///
/// so -x^2 reads as -(x^2) and 2^-x as 2^(-x). Operand types are checked
/// while parsing.
Expr parse_expression(const std::vector<Token>& tokens);

/// Numeric program from a token stream.
SequenceProgram parse(const std::vector<Token>& tokens);

/// Numeric program from source text. A line "#@domain LO HI" sets the domain hint.
SequenceProgram parse_program(std::string_view source);

/// Boolean expression over k, used as an index set.
SequenceProgram parse_predicate(std::string_view source);

/// Reads a ".seq" file: UTF-8, one expression, '#' comments.
SequenceProgram load_program_file(const std::filesystem::path& path);

}  // namespace roughstat::dsl
