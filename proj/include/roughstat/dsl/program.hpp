#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "roughstat/density.hpp"
#include "roughstat/dsl/ast.hpp"
#include "roughstat/sequence.hpp"

namespace roughstat::dsl {

/// Invalid use of a well-formed program (wrong result type, target using k,
/// unknown built-in, unreadable file).
class ProgramError : public Error {
 public:
  using Error::Error;
};

enum class EvalError { DivisionByZero, Domain, NonInteger, NotANumber };

std::string to_string(EvalError e);

/// A finite real, +/-infinity, or an evaluation error. Booleans are 0/1.
class EvalResult {
 public:
  static EvalResult of(double v) { return EvalResult(v, std::nullopt); }
  static EvalResult failure(EvalError e) { return EvalResult(0.0, e); }

  bool ok() const { return !error_; }
  double value() const { return value_; }
  EvalError error() const { return *error_; }
  std::optional<double> as_optional() const {
    return ok() ? std::optional<double>(value_) : std::nullopt;
  }

 private:
  EvalResult(double v, std::optional<EvalError> e) : value_(v), error_(e) {}
  double value_;
  std::optional<EvalError> error_;
};

struct Interval {
  double lo;
  double hi;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

namespace detail {
struct Bytecode;
}

/// A parsed family (k, x) -> f_k(x), or a target x -> f(x) when the index
/// variable is absent. Immutable and safe to share across threads.
class SequenceProgram {
 public:
  SequenceProgram(Expr ast, std::string source, std::optional<Interval> domain_hint = std::nullopt);

  const Expr& ast() const { return ast_; }
  const std::string& source() const { return source_; }
  bool uses_index() const { return uses_index_; }
  ValueType type() const { return ast_.type(); }
  const std::optional<Interval>& domain_hint() const { return domain_hint_; }

  EvalResult evaluate(Index k, double x) const;

  /// The scalar sequence k -> f_k(x); evaluation errors read as nullopt.
  ScalarSequenceView at(double x, Index max_index = ScalarSequenceView::unbounded) const;

 private:
  Expr ast_;
  std::string source_;
  std::optional<Interval> domain_hint_;
  bool uses_index_;
  std::shared_ptr<const detail::Bytecode> code_;
};

/// IEEE binary64 evaluation; integer exponents use exponentiation by squaring.
EvalResult evaluate(const SequenceProgram& program, Index k, double x);

/// Membership test for a boolean program over k; evaluation errors read as
/// non-membership.
IndexPredicate index_predicate(const SequenceProgram& program);

/// alpha * f + beta * g as a program (negative coefficients become negation).
SequenceProgram linear_combination(double alpha, const SequenceProgram& f, double beta,
                                   const SequenceProgram& g);

std::vector<std::string> builtin_program_names();

/// "example21" = if issquare(k) then k else 1/(1 + x^k), domain [0, 1].
SequenceProgram builtin_program(std::string_view name);

}  // namespace roughstat::dsl
