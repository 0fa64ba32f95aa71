#pragma once

#include <cstddef>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sbe {

/// Parse failure: carries the byte offset into the source and the set of
/// tokens that would have been accepted at that position.
struct ParseError : std::runtime_error {
  ParseError(std::string msg, std::size_t off, std::set<std::string> exp)
      : std::runtime_error(std::move(msg)), offset(off), expected(std::move(exp)) {}
  std::size_t offset;
  std::set<std::string> expected;
};

/// Domain failure during evaluation (sqrt of a negative, log of a
/// non-positive, division by zero, non-integer power of a negative base,
/// or a non-finite intermediate). Carries the offending subexpression.
struct EvalError : std::runtime_error {
  EvalError(std::string msg, std::string sub)
      : std::runtime_error(std::move(msg)), subexpr(std::move(sub)) {}
  std::string subexpr;
};

/// Immutable arithmetic expression over variables x1..x9 and u.
///
/// Grammar (whitespace insignificant):
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := "-" factor | power
///   power  := atom ("^" factor)?          -- right associative
///   atom   := number | ident | ident "(" expr ("," expr)* ")" | "(" expr ")"
///
/// Functions: abs, sin, cos, sqrt, log, exp (unary); min, max (n-ary, >= 2).
/// Precedence: ^  >  unary minus  >  * /  >  + -.
class Expr {
 public:
  Expr() = default;

  static Expr parse(std::string_view source);

  /// Evaluate at state x (size >= the highest x-index used) and control u.
  double eval(std::span<const double> x, double u) const;
  double eval(std::initializer_list<double> x, double u) const {
    return eval(std::span<const double>(x.begin(), x.size()), u);
  }

  /// Canonical text form; re-parsing it yields a structurally equal tree.
  std::string str() const;

  /// Highest state-variable index referenced (0 when none).
  int max_var() const;
  bool uses_u() const;
  bool empty() const { return nodes_.empty(); }

  bool operator==(const Expr& other) const;

 private:
  enum class Op : std::uint8_t {
    Const, VarX, VarU,
    Neg, Abs, Sin, Cos, Sqrt, Log, Exp,
    Add, Sub, Mul, Div, Pow,
    Min, Max,
  };
  struct Node {
    Op op;
    double value = 0.0;            // Const
    int var = 0;                   // VarX index (1-based)
    std::vector<std::uint32_t> kids;
  };

  // nodes_ is in topological order; back() is the root.
  std::vector<Node> nodes_;

  double eval_node(std::uint32_t i, std::span<const double> x, double u) const;
  void print_node(std::uint32_t i, int parent_level, std::string& out) const;
  friend class ExprParser;
};

}  // namespace sbe
