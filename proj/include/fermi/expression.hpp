#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fermi/taylor.hpp"

namespace fermi {

// Parsed dispersion relation e(k1, k2). Grammar: numbers, the variables k1 and
// k2, + - * / ^, unary minus, parentheses and cos, sin, sqrt, exp, log.
// Evaluation is generic over the scalar so the same tree serves plain values,
// Hessians and power series.
class Expression {
 public:
  static Expression parse(const std::string& text);

  const std::string& source() const { return source_; }

  template <class T>
  T eval(const T& k1, const T& k2) const {
    return eval_node<T>(root_, k1, k2);
  }

 private:
  enum class Op { constant, var1, var2, neg, add, sub, mul, div, pow, pow_int, cos, sin, sqrt, exp, log };

  struct Node {
    Op op = Op::constant;
    double value = 0.0;
    int exponent = 0;
    int lhs = -1;
    int rhs = -1;
  };

  template <class T>
  T eval_node(int idx, const T& k1, const T& k2) const;

  friend class ExpressionParser;

  std::string source_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

template <class T>
T Expression::eval_node(int idx, const T& k1, const T& k2) const {
  using std::cos;
  using std::exp;
  using std::log;
  using std::pow;
  using std::sin;
  using std::sqrt;
  const Node& nd = nodes_[static_cast<std::size_t>(idx)];
  switch (nd.op) {
    case Op::constant:
      return constant_like(k1, nd.value);
    case Op::var1:
      return k1;
    case Op::var2:
      return k2;
    case Op::neg:
      return -eval_node<T>(nd.lhs, k1, k2);
    case Op::add:
      return eval_node<T>(nd.lhs, k1, k2) + eval_node<T>(nd.rhs, k1, k2);
    case Op::sub:
      return eval_node<T>(nd.lhs, k1, k2) - eval_node<T>(nd.rhs, k1, k2);
    case Op::mul:
      return eval_node<T>(nd.lhs, k1, k2) * eval_node<T>(nd.rhs, k1, k2);
    case Op::div:
      return eval_node<T>(nd.lhs, k1, k2) / eval_node<T>(nd.rhs, k1, k2);
    case Op::pow:
      return pow(eval_node<T>(nd.lhs, k1, k2), eval_node<T>(nd.rhs, k1, k2));
    case Op::pow_int: {
      T base = eval_node<T>(nd.lhs, k1, k2);
      int e = nd.exponent < 0 ? -nd.exponent : nd.exponent;
      T acc = constant_like(k1, 1.0);
      while (e > 0) {
        if (e & 1) acc = acc * base;
        e >>= 1;
        if (e > 0) base = base * base;
      }
      if (nd.exponent < 0) return constant_like(k1, 1.0) / acc;
      return acc;
    }
    case Op::cos:
      return cos(eval_node<T>(nd.lhs, k1, k2));
    case Op::sin:
      return sin(eval_node<T>(nd.lhs, k1, k2));
    case Op::sqrt:
      return sqrt(eval_node<T>(nd.lhs, k1, k2));
    case Op::exp:
      return exp(eval_node<T>(nd.lhs, k1, k2));
    case Op::log:
      return log(eval_node<T>(nd.lhs, k1, k2));
  }
  return k1;
}

}  // namespace fermi
