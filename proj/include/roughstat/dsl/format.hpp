#pragma once

#include <string>

#include "roughstat/dsl/ast.hpp"
#include "roughstat/dsl/program.hpp"

namespace roughstat::dsl {

/// Canonical text with the fewest parentheses the grammar needs;
/// parsing the result yields a structurally equal tree.
std::string format(const Expr& expr);
std::string format(const SequenceProgram& program);

/// Shortest decimal text that reads back to exactly `value`.
std::string format_number(double value);

}  // namespace roughstat::dsl
