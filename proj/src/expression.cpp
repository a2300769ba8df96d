// SPDX-License-Identifier: Apache-2.0
#include "speccalc/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "speccalc/errors.hpp"

namespace speccalc {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, IntPow, Log, Exp, Sqrt, Sin, Cos, Upper };

struct Expression::Node {
  Op op = Op::Const;
  Complex value{};
  long exponent = 0;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, std::vector<NodePtr> args = {}, Complex value = {}) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->args = std::move(args);
  n->value = value;
  return n;
}

bool is_constant(const NodePtr& n) {
  if (n->op == Op::Var) return false;
  for (const auto& a : n->args) {
    if (!is_constant(a)) return false;
  }
  return true;
}

Complex int_pow(Complex base, long k) {
  if (k < 0) return 1.0 / int_pow(base, -k);
  Complex result = 1.0;
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

Complex eval(const Expression::Node& n, Complex z) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return z;
    case Op::Add: return eval(*n.args[0], z) + eval(*n.args[1], z);
    case Op::Sub: return eval(*n.args[0], z) - eval(*n.args[1], z);
    case Op::Mul: return eval(*n.args[0], z) * eval(*n.args[1], z);
    case Op::Div: return eval(*n.args[0], z) / eval(*n.args[1], z);
    case Op::Neg: return -eval(*n.args[0], z);
    case Op::IntPow: return int_pow(eval(*n.args[0], z), n.exponent);
    case Op::Pow: {
      const Complex base = eval(*n.args[0], z);
      const Complex p = eval(*n.args[1], z);
      if (base == 0.0) return p.real() > 0.0 ? Complex(0.0) : Complex(kInf);
      return std::exp(p * std::log(base));
    }
    case Op::Log: return std::log(eval(*n.args[0], z));
    case Op::Exp: return std::exp(eval(*n.args[0], z));
    case Op::Sqrt: return std::sqrt(eval(*n.args[0], z));
    case Op::Sin: return std::sin(eval(*n.args[0], z));
    case Op::Cos: return std::cos(eval(*n.args[0], z));
    case Op::Upper: return z.imag() > 0.0 ? eval(*n.args[0], z) : eval(*n.args[1], z);
  }
  return 0.0;
}

class Parser {
public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at offset " + std::to_string(pos_) + " in '" + s_ + "'");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool starts_primary() {
    skip();
    if (pos_ >= s_.size()) return false;
    const char c = s_[pos_];
    return std::isalnum(static_cast<unsigned char>(c)) || c == '(' || c == '.';
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::Add, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(Op::Sub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::Mul, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make(Op::Div, {lhs, unary()});
      } else if (starts_primary()) {
        lhs = make(Op::Mul, {lhs, power()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    NodePtr exponent = unary();
    if (is_constant(exponent)) {
      const Complex p = eval(*exponent, 0.0);
      const double r = std::round(p.real());
      if (p.imag() == 0.0 && p.real() == r && std::abs(r) <= 1e6) {
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::IntPow;
        n->exponent = static_cast<long>(r);
        n->args = {base};
        return n;
      }
    }
    return make(Op::Pow, {base, exponent});
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Op::Const, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "z") return make(Op::Var);
      if (name == "i") return make(Op::Const, {}, Complex(0.0, 1.0));
      if (name == "pi") return make(Op::Const, {}, kPi);
      const Op op = function_op(name);
      expect('(');
      std::vector<NodePtr> args{expr()};
      if (op == Op::Upper) {
        expect(',');
        args.push_back(expr());
      }
      expect(')');
      return make(op, std::move(args));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Op function_op(const std::string& name) {
    if (name == "log") return Op::Log;
    if (name == "exp") return Op::Exp;
    if (name == "sqrt") return Op::Sqrt;
    if (name == "sin") return Op::Sin;
    if (name == "cos") return Op::Cos;
    if (name == "upper") return Op::Upper;
    fail("unknown identifier '" + name + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(e.text_).parse();
  return e;
}

Complex Expression::operator()(Complex z) const {
  if (!root_) throw PreconditionError("evaluating an empty expression");
  return eval(*root_, z);
}

}  // namespace speccalc
