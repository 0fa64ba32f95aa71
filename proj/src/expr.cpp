#include "sbe/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

namespace sbe {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

}  // namespace

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  Expr run() {
    Expr e;
    std::uint32_t root = parse_expr(e);
    skip_ws();
    if (pos_ != src_.size())
      fail("unexpected trailing input", {"+", "-", "*", "/", "^", "end of input"});
    (void)root;
    if (e.nodes_.empty()) fail("empty expression", {"number", "identifier", "(", "-"});
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what, std::set<std::string> expected) {
    throw ParseError("syntax error at offset " + std::to_string(pos_) + ": " + what,
                     pos_, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) { ++pos_; return true; }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  std::uint32_t add(Expr& e, Expr::Node n) {
    e.nodes_.push_back(std::move(n));
    return static_cast<std::uint32_t>(e.nodes_.size() - 1);
  }

  std::uint32_t parse_expr(Expr& e) {
    std::uint32_t lhs = parse_term(e);
    for (;;) {
      if (eat('+')) {
        std::uint32_t rhs = parse_term(e);
        lhs = add(e, {Expr::Op::Add, 0, 0, {lhs, rhs}});
      } else if (eat('-')) {
        std::uint32_t rhs = parse_term(e);
        lhs = add(e, {Expr::Op::Sub, 0, 0, {lhs, rhs}});
      } else {
        return lhs;
      }
    }
  }

  std::uint32_t parse_term(Expr& e) {
    std::uint32_t lhs = parse_factor(e);
    for (;;) {
      if (eat('*')) {
        std::uint32_t rhs = parse_factor(e);
        lhs = add(e, {Expr::Op::Mul, 0, 0, {lhs, rhs}});
      } else if (eat('/')) {
        std::uint32_t rhs = parse_factor(e);
        lhs = add(e, {Expr::Op::Div, 0, 0, {lhs, rhs}});
      } else {
        return lhs;
      }
    }
  }

  // factor := "-" factor | power; power := atom ("^" factor)?
  // Exponentiation binds tighter than unary minus: -2^2 == -(2^2).
  std::uint32_t parse_factor(Expr& e) {
    if (eat('-')) {
      std::uint32_t kid = parse_factor(e);
      return add(e, {Expr::Op::Neg, 0, 0, {kid}});
    }
    std::uint32_t base = parse_atom(e);
    if (eat('^')) {
      std::uint32_t exp = parse_factor(e);
      return add(e, {Expr::Op::Pow, 0, 0, {base, exp}});
    }
    return base;
  }

  std::uint32_t parse_atom(Expr& e) {
    skip_ws();
    if (pos_ >= src_.size())
      fail("unexpected end of input", {"number", "identifier", "(", "-"});
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      std::uint32_t inner = parse_expr(e);
      if (!eat(')')) fail("missing ')'", {")"});
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number(e);
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident(e);
    fail(std::string("unexpected character '") + c + "'", {"number", "identifier", "(", "-"});
  }

  std::uint32_t parse_number(Expr& e) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = mark;  // "2e" is the number 2 followed by identifier 'e' -> error later
      }
    }
    double v = std::strtod(std::string(src_.substr(start, pos_ - start)).c_str(), nullptr);
    return add(e, {Expr::Op::Const, v, 0, {}});
  }

  std::uint32_t parse_ident(Expr& e) {
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name(src_.substr(start, pos_ - start));

    if (name == "u") return add(e, {Expr::Op::VarU, 0, 0, {}});
    if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9')
      return add(e, {Expr::Op::VarX, 0, name[1] - '0', {}});

    static const std::map<std::string, Expr::Op> kUnary = {
        {"abs", Expr::Op::Abs}, {"sin", Expr::Op::Sin},  {"cos", Expr::Op::Cos},
        {"sqrt", Expr::Op::Sqrt}, {"log", Expr::Op::Log}, {"exp", Expr::Op::Exp}};
    const bool is_min = name == "min";
    const bool is_max = name == "max";
    auto uit = kUnary.find(name);
    if (uit == kUnary.end() && !is_min && !is_max) {
      pos_ = start;
      fail("unknown identifier '" + name + "'",
           {"x1..x9", "u", "abs", "sin", "cos", "sqrt", "log", "exp", "min", "max"});
    }
    if (!eat('(')) fail("expected '(' after function name", {"("});
    std::vector<std::uint32_t> args;
    args.push_back(parse_expr(e));
    while (eat(',')) args.push_back(parse_expr(e));
    if (!eat(')')) fail("missing ')' in argument list", {")", ","});

    if (uit != kUnary.end()) {
      if (args.size() != 1) {
        pos_ = start;
        fail(name + " expects exactly 1 argument", {"1 argument"});
      }
      return add(e, {uit->second, 0, 0, std::move(args)});
    }
    if (args.size() < 2) {
      pos_ = start;
      fail(name + " expects at least 2 arguments", {">= 2 arguments"});
    }
    return add(e, {is_min ? Expr::Op::Min : Expr::Op::Max, 0, 0, std::move(args)});
  }
};

Expr Expr::parse(std::string_view source) { return ExprParser(source).run(); }

double Expr::eval(std::span<const double> x, double u) const {
  if (nodes_.empty()) throw EvalError("evaluating empty expression", "");
  return eval_node(static_cast<std::uint32_t>(nodes_.size() - 1), x, u);
}

double Expr::eval_node(std::uint32_t i, std::span<const double> x, double u) const {
  const Node& n = nodes_[i];
  auto sub = [&](int k) { return eval_node(n.kids[k], x, u); };
  auto domain_error = [&](const char* what) -> double {
    std::string s;
    print_node(i, 0, s);
    throw EvalError(std::string(what) + " in '" + s + "'", s);
  };
  double r;
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::VarX:
      if (static_cast<std::size_t>(n.var) > x.size())
        domain_error("state variable out of range");
      return x[n.var - 1];
    case Op::VarU: return u;
    case Op::Neg: return -sub(0);
    case Op::Abs: return std::fabs(sub(0));
    case Op::Sin: return std::sin(sub(0));
    case Op::Cos: return std::cos(sub(0));
    case Op::Sqrt: {
      double a = sub(0);
      if (a < 0) return domain_error("square root of negative value");
      return std::sqrt(a);
    }
    case Op::Log: {
      double a = sub(0);
      if (a <= 0) return domain_error("log of non-positive value");
      return std::log(a);
    }
    case Op::Exp:
      r = std::exp(sub(0));
      if (!std::isfinite(r)) return domain_error("overflow");
      return r;
    case Op::Add: return sub(0) + sub(1);
    case Op::Sub: return sub(0) - sub(1);
    case Op::Mul: return sub(0) * sub(1);
    case Op::Div: {
      double den = sub(1);
      if (den == 0.0) return domain_error("division by zero");
      r = sub(0) / den;
      if (!std::isfinite(r)) return domain_error("overflow");
      return r;
    }
    case Op::Pow: {
      double a = sub(0), b = sub(1);
      if (a < 0 && !is_integer(b)) return domain_error("non-integer power of negative base");
      if (a == 0 && b < 0) return domain_error("zero raised to negative power");
      r = std::pow(a, b);
      if (!std::isfinite(r)) return domain_error("overflow");
      return r;
    }
    case Op::Min: {
      r = sub(0);
      for (std::size_t k = 1; k < n.kids.size(); ++k) r = std::min(r, sub(static_cast<int>(k)));
      return r;
    }
    case Op::Max: {
      r = sub(0);
      for (std::size_t k = 1; k < n.kids.size(); ++k) r = std::max(r, sub(static_cast<int>(k)));
      return r;
    }
  }
  throw EvalError("corrupt expression node", "");
}

namespace {
// Precedence levels used when printing: additive 1, multiplicative 2,
// unary minus 3, power 4, atom 5.
int level_of(int op_class) { return op_class; }
}  // namespace

void Expr::print_node(std::uint32_t i, int parent_level, std::string& out) const {
  const Node& n = nodes_[i];
  auto wrap = [&](int own_level, auto&& body) {
    bool paren = own_level < parent_level;
    if (paren) out += '(';
    body();
    if (paren) out += ')';
  };
  switch (n.op) {
    case Op::Const: out += format_double(n.value); return;
    case Op::VarX: out += 'x'; out += static_cast<char>('0' + n.var); return;
    case Op::VarU: out += 'u'; return;
    case Op::Neg:
      wrap(level_of(3), [&] { out += '-'; print_node(n.kids[0], 3, out); });
      return;
    case Op::Add:
      wrap(1, [&] { print_node(n.kids[0], 1, out); out += " + "; print_node(n.kids[1], 2, out); });
      return;
    case Op::Sub:
      wrap(1, [&] { print_node(n.kids[0], 1, out); out += " - "; print_node(n.kids[1], 2, out); });
      return;
    case Op::Mul:
      wrap(2, [&] { print_node(n.kids[0], 2, out); out += "*"; print_node(n.kids[1], 3, out); });
      return;
    case Op::Div:
      wrap(2, [&] { print_node(n.kids[0], 2, out); out += "/"; print_node(n.kids[1], 3, out); });
      return;
    case Op::Pow:
      // right associative: left child needs full parenthesization below atom level
      wrap(4, [&] { print_node(n.kids[0], 5, out); out += "^"; print_node(n.kids[1], 4, out); });
      return;
    case Op::Abs: case Op::Sin: case Op::Cos: case Op::Sqrt: case Op::Log: case Op::Exp: {
      const char* name = n.op == Op::Abs ? "abs" : n.op == Op::Sin ? "sin"
                        : n.op == Op::Cos ? "cos" : n.op == Op::Sqrt ? "sqrt"
                        : n.op == Op::Log ? "log" : "exp";
      out += name; out += '(';
      print_node(n.kids[0], 0, out);
      out += ')';
      return;
    }
    case Op::Min: case Op::Max: {
      out += (n.op == Op::Min) ? "min(" : "max(";
      for (std::size_t k = 0; k < n.kids.size(); ++k) {
        if (k) out += ", ";
        print_node(n.kids[k], 0, out);
      }
      out += ')';
      return;
    }
  }
}

std::string Expr::str() const {
  std::string out;
  if (!nodes_.empty()) print_node(static_cast<std::uint32_t>(nodes_.size() - 1), 0, out);
  return out;
}

int Expr::max_var() const {
  int m = 0;
  for (const Node& n : nodes_)
    if (n.op == Op::VarX) m = std::max(m, n.var);
  return m;
}

bool Expr::uses_u() const {
  for (const Node& n : nodes_)
    if (n.op == Op::VarU) return true;
  return false;
}

bool Expr::operator==(const Expr& other) const {
  // Structural comparison via canonical subtree equality, independent of
  // node-vector layout.
  std::string a = str(), b = other.str();
  return a == b;
}

}  // namespace sbe
