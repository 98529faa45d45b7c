#include "fermi/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "fermi/errors.hpp"

namespace fermi {

// Recursive descent:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | '+' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
class ExpressionParser {
 public:
  explicit ExpressionParser(const std::string& text) : s_(text) {}

  Expression run() {
    Expression e;
    e.source_ = s_;
    out_ = &e;
    e.root_ = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("expression: " + msg + " at offset " + std::to_string(pos_) + " in '" + s_ + "'");
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int add_node(Op op, int lhs = -1, int rhs = -1, double value = 0.0) {
    Expression::Node n;
    n.op = op;
    n.lhs = lhs;
    n.rhs = rhs;
    n.value = value;
    out_->nodes_.push_back(n);
    return static_cast<int>(out_->nodes_.size()) - 1;
  }

  int expr() {
    int lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = add_node(Op::add, lhs, term());
      } else if (accept('-')) {
        lhs = add_node(Op::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  int term() {
    int lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = add_node(Op::mul, lhs, unary());
      } else if (accept('/')) {
        lhs = add_node(Op::div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  int unary() {
    if (accept('-')) return add_node(Op::neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  int power() {
    int base = atom();
    if (!accept('^')) return base;
    int exponent = unary();
    const auto& en = out_->nodes_[static_cast<std::size_t>(exponent)];
    if (en.op == Op::constant && std::floor(en.value) == en.value && std::fabs(en.value) <= 64.0) {
      int n = add_node(Op::pow_int, base);
      out_->nodes_.back().exponent = static_cast<int>(en.value);
      return n;
    }
    return add_node(Op::pow, base, exponent);
  }

  int atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return add_node(Op::constant, -1, -1, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string id = s_.substr(start, pos_ - start);
      if (id == "k1" || id == "x") return add_node(Op::var1);
      if (id == "k2" || id == "y") return add_node(Op::var2);
      if (id == "pi") return add_node(Op::constant, -1, -1, M_PI);
      Op fn;
      if (id == "cos") {
        fn = Op::cos;
      } else if (id == "sin") {
        fn = Op::sin;
      } else if (id == "sqrt") {
        fn = Op::sqrt;
      } else if (id == "exp") {
        fn = Op::exp;
      } else if (id == "log") {
        fn = Op::log;
      } else {
        pos_ = start;
        fail("unknown identifier '" + id + "'");
      }
      if (!accept('(')) fail("expected '(' after " + id);
      int arg = expr();
      if (!accept(')')) fail("expected ')'");
      return add_node(fn, arg);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string s_;
  std::size_t pos_ = 0;
  Expression* out_ = nullptr;
};

Expression Expression::parse(const std::string& text) { return ExpressionParser(text).run(); }

}  // namespace fermi
