#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "roughstat/dsl/format.hpp"
#include "roughstat/dsl/program.hpp"

namespace roughstat::dsl {
namespace detail {

enum class Op : std::uint8_t {
  Const,
  LoadK,
  LoadX,
  Neg,
  Not,
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Pow,
  Cmp,
  Call,
  Jump,
  JumpIfFalse,      // pops the condition
  JumpIfFalseKeep,  // short-circuit and: keeps a false operand as the result
  JumpIfTrueKeep,   // short-circuit or
};

struct Instr {
  Op op;
  std::uint8_t sub = 0;  // CompareOp or Builtin
  std::uint32_t target = 0;
  double value = 0.0;
};

/// Postfix code with forward jumps for conditionals and short-circuit logic.
struct Bytecode {
  std::vector<Instr> code;
  std::size_t max_depth = 0;
};

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

class Compiler {
 public:
  Bytecode run(const Expr& e) {
    emit(e);
    out_.max_depth = max_depth_;
    return std::move(out_);
  }

 private:
  void push(Instr i, int delta) {
    out_.code.push_back(i);
    depth_ += delta;
    if (depth_ > static_cast<long>(max_depth_)) max_depth_ = static_cast<std::size_t>(depth_);
  }

  std::size_t here() const { return out_.code.size(); }

  void patch(std::size_t at) { out_.code[at].target = static_cast<std::uint32_t>(here()); }

  void emit(const Expr& e) {
    std::visit(
        overloaded{
            [&](const Literal& l) { push({Op::Const, 0, 0, l.value}, +1); },
            [&](const VariableRef& v) {
              push({v.which == Variable::K ? Op::LoadK : Op::LoadX}, +1);
            },
            [&](const Unary& u) {
              emit(u.operand);
              push({u.op == UnaryOp::Neg ? Op::Neg : Op::Not}, 0);
            },
            [&](const Binary& b) {
              if (b.op == BinaryOp::And || b.op == BinaryOp::Or) {
                emit(b.lhs);
                const auto jump = here();
                push({b.op == BinaryOp::And ? Op::JumpIfFalseKeep : Op::JumpIfTrueKeep}, -1);
                emit(b.rhs);
                patch(jump);
                return;
              }
              emit(b.lhs);
              emit(b.rhs);
              push({arith(b.op)}, -1);
            },
            [&](const Comparison& c) {
              emit(c.lhs);
              emit(c.rhs);
              push({Op::Cmp, static_cast<std::uint8_t>(c.op)}, -1);
            },
            [&](const Conditional& c) {
              emit(c.cond);
              const auto to_else = here();
              push({Op::JumpIfFalse}, -1);
              emit(c.then_branch);
              const auto to_end = here();
              push({Op::Jump}, -1);  // only one branch leaves a value
              patch(to_else);
              emit(c.else_branch);
              patch(to_end);
            },
            [&](const Call& c) {
              for (const auto& a : c.args) emit(a);
              push({Op::Call, static_cast<std::uint8_t>(c.fn)},
                   1 - static_cast<int>(c.args.size()));
            },
        },
        e.node().value);
  }

  static Op arith(BinaryOp op) {
    switch (op) {
      case BinaryOp::Add: return Op::Add;
      case BinaryOp::Sub: return Op::Sub;
      case BinaryOp::Mul: return Op::Mul;
      case BinaryOp::Div: return Op::Div;
      case BinaryOp::Mod: return Op::Mod;
      case BinaryOp::Pow: return Op::Pow;
      default: return Op::Add;
    }
  }

  Bytecode out_;
  long depth_ = 0;
  std::size_t max_depth_ = 0;
};

bool is_integer(double v) { return std::isfinite(v) && std::floor(v) == v; }

// Exact for every integer-valued double: t = m * 2^e with m odd is a square
// iff e is even and m is a square.
bool is_perfect_square(double t) {
  if (t == 0.0) return true;
  int exp2 = 0;
  const double frac = std::frexp(t, &exp2);  // t = frac * 2^exp2, frac in [0.5, 1)
  auto mant = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  int e = exp2 - 53;
  const int tz = std::countr_zero(mant);
  mant >>= tz;
  e += tz;
  if (e % 2 != 0) return false;
  auto root = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(mant)));
  while (root * root > mant) --root;
  while ((root + 1) * (root + 1) <= mant) ++root;
  return root * root == mant;
}

}  // namespace

}  // namespace detail

std::string to_string(EvalError e) {
  switch (e) {
    case EvalError::DivisionByZero: return "division by zero";
    case EvalError::Domain: return "argument outside function domain";
    case EvalError::NonInteger: return "non-integer argument";
    case EvalError::NotANumber: return "result is not a number";
  }
  return "evaluation error";
}

namespace {

EvalResult power(double base, double exponent) {
  constexpr double kTwo63 = 9223372036854775808.0;
  if (detail::is_integer(exponent) && std::abs(exponent) < kTwo63) {
    auto n = static_cast<std::uint64_t>(std::abs(exponent));
    double result = 1.0;
    double b = base;
    while (n != 0) {
      if ((n & 1U) != 0) result *= b;
      n >>= 1U;
      if (n != 0) b *= b;
    }
    if (exponent < 0) {
      if (result == 0.0) return EvalResult::failure(EvalError::DivisionByZero);
      result = 1.0 / result;
    }
    if (std::isnan(result)) return EvalResult::failure(EvalError::NotANumber);
    return EvalResult::of(result);
  }
  double magnitude = base;
  if (base < 0.0) {
    if (!detail::is_integer(exponent)) return EvalResult::failure(EvalError::Domain);
    magnitude = -base;  // |exponent| >= 2^63 is even
  }
  if (magnitude == 0.0) {
    if (exponent > 0.0) return EvalResult::of(0.0);
    return EvalResult::failure(EvalError::DivisionByZero);
  }
  const double result = std::exp(exponent * std::log(magnitude));
  if (std::isnan(result)) return EvalResult::failure(EvalError::NotANumber);
  return EvalResult::of(result);
}

EvalResult apply_builtin(Builtin fn, const double* args) {
  const double a = args[0];
  switch (fn) {
    case Builtin::Abs: return EvalResult::of(std::abs(a));
    case Builtin::Sqrt:
      if (a < 0.0) return EvalResult::failure(EvalError::Domain);
      return EvalResult::of(std::sqrt(a));
    case Builtin::Min: return EvalResult::of(args[1] < a ? args[1] : a);
    case Builtin::Max: return EvalResult::of(a < args[1] ? args[1] : a);
    case Builtin::Floor: return EvalResult::of(std::floor(a));
    case Builtin::Exp: return EvalResult::of(std::exp(a));
    case Builtin::Ln:
      if (!(a > 0.0)) return EvalResult::failure(EvalError::Domain);
      return EvalResult::of(std::log(a));
    case Builtin::IsSquare:
      if (!detail::is_integer(a) || a < 0.0) return EvalResult::failure(EvalError::NonInteger);
      return EvalResult::of(detail::is_perfect_square(a) ? 1.0 : 0.0);
  }
  return EvalResult::failure(EvalError::Domain);
}

bool compare(CompareOp op, double a, double b) {
  switch (op) {
    case CompareOp::Lt: return a < b;
    case CompareOp::Le: return a <= b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Ge: return a >= b;
    case CompareOp::Eq: return a == b;
    case CompareOp::Ne: return a != b;
  }
  return false;
}

EvalResult run(const detail::Bytecode& bc, double k, double x) {
  using detail::Op;
  thread_local std::vector<double> stack;
  stack.resize(bc.max_depth + 1);
  std::size_t sp = 0;  // number of live slots
  const auto& code = bc.code;
  std::size_t pc = 0;
  while (pc < code.size()) {
    const auto& in = code[pc];
    switch (in.op) {
      case Op::Const: stack[sp++] = in.value; break;
      case Op::LoadK: stack[sp++] = k; break;
      case Op::LoadX: stack[sp++] = x; break;
      case Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
      case Op::Not: stack[sp - 1] = stack[sp - 1] != 0.0 ? 0.0 : 1.0; break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
      case Op::Mod:
      case Op::Pow: {
        const double b = stack[--sp];
        const double a = stack[sp - 1];
        double r = 0.0;
        if (in.op == Op::Add) {
          r = a + b;
        } else if (in.op == Op::Sub) {
          r = a - b;
        } else if (in.op == Op::Mul) {
          r = a * b;
        } else if (in.op == Op::Div) {
          if (b == 0.0) return EvalResult::failure(EvalError::DivisionByZero);
          r = a / b;
        } else if (in.op == Op::Mod) {
          if (!detail::is_integer(a) || !detail::is_integer(b))
            return EvalResult::failure(EvalError::NonInteger);
          if (b == 0.0) return EvalResult::failure(EvalError::DivisionByZero);
          r = std::fmod(a, b);
        } else {
          const auto p = power(a, b);
          if (!p.ok()) return p;
          r = p.value();
        }
        if (std::isnan(r)) return EvalResult::failure(EvalError::NotANumber);
        stack[sp - 1] = r;
        break;
      }
      case Op::Cmp: {
        const double b = stack[--sp];
        stack[sp - 1] = compare(static_cast<CompareOp>(in.sub), stack[sp - 1], b) ? 1.0 : 0.0;
        break;
      }
      case Op::Call: {
        const auto fn = static_cast<Builtin>(in.sub);
        const auto arity = static_cast<std::size_t>(info(fn).arity);
        sp -= arity;
        const auto r = apply_builtin(fn, &stack[sp]);
        if (!r.ok()) return r;
        if (std::isnan(r.value())) return EvalResult::failure(EvalError::NotANumber);
        stack[sp++] = r.value();
        break;
      }
      case Op::Jump: pc = in.target; continue;
      case Op::JumpIfFalse:
        if (stack[--sp] == 0.0) {
          pc = in.target;
          continue;
        }
        break;
      case Op::JumpIfFalseKeep:
        if (stack[sp - 1] == 0.0) {
          pc = in.target;
          continue;
        }
        --sp;
        break;
      case Op::JumpIfTrueKeep:
        if (stack[sp - 1] != 0.0) {
          pc = in.target;
          continue;
        }
        --sp;
        break;
    }
    ++pc;
  }
  return EvalResult::of(stack[0]);
}

}  // namespace

SequenceProgram::SequenceProgram(Expr ast, std::string source, std::optional<Interval> domain_hint)
    : ast_(std::move(ast)),
      source_(std::move(source)),
      domain_hint_(domain_hint),
      uses_index_(ast_.uses(Variable::K)),
      code_(std::make_shared<const detail::Bytecode>(detail::Compiler().run(ast_))) {}

EvalResult SequenceProgram::evaluate(Index k, double x) const {
  return run(*code_, static_cast<double>(k), x);
}

ScalarSequenceView SequenceProgram::at(double x, Index max_index) const {
  return ScalarSequenceView(
      [code = code_, x](Index k) { return run(*code, static_cast<double>(k), x).as_optional(); },
      max_index);
}

EvalResult evaluate(const SequenceProgram& program, Index k, double x) {
  return program.evaluate(k, x);
}

IndexPredicate index_predicate(const SequenceProgram& program) {
  if (program.type() != ValueType::Boolean)
    throw ProgramError("index set must be a boolean expression over k");
  if (program.ast().uses(Variable::X)) throw ProgramError("index set must not reference x");
  return IndexPredicate(
      [program](Index k) {
        const auto r = program.evaluate(k, 0.0);
        return r.ok() && r.value() != 0.0;
      },
      program.source());
}

namespace {

Expr scaled(double c, const Expr& e) {
  const Expr product = Expr::binary(BinaryOp::Mul, Expr::literal(std::abs(c)), e);
  return std::signbit(c) ? Expr::unary(UnaryOp::Neg, product) : product;
}

}  // namespace

SequenceProgram linear_combination(double alpha, const SequenceProgram& f, double beta,
                                   const SequenceProgram& g) {
  if (f.type() != ValueType::Number || g.type() != ValueType::Number)
    throw ProgramError("linear combination needs numeric programs");
  Expr sum = Expr::binary(BinaryOp::Add, scaled(alpha, f.ast()), scaled(beta, g.ast()));
  std::optional<Interval> domain;
  if (f.domain_hint() && g.domain_hint()) {
    domain = Interval{std::max(f.domain_hint()->lo, g.domain_hint()->lo),
                      std::min(f.domain_hint()->hi, g.domain_hint()->hi)};
  } else {
    domain = f.domain_hint() ? f.domain_hint() : g.domain_hint();
  }
  std::string source = format(sum);
  return SequenceProgram(std::move(sum), std::move(source), domain);
}

}  // namespace roughstat::dsl
