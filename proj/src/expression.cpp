#include "fractal_calc/expression.hpp"

#include "fractal_calc/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace fcalc {

struct Expression::Node {
  enum class Op { number, var, neg, add, sub, mul, div, pow, call };
  Op op = Op::number;
  double value = 0.0;
  char var = 0;
  double (*fn)(double) = nullptr;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

unsigned var_bit(char v) {
  switch (v) {
    case 't': return 1u;
    case 'S': return 2u;
    case 'x': return 4u;
    case 'y': return 8u;
  }
  return 0u;
}

struct Function {
  const char* name;
  double (*fn)(double);
};

const Function kFunctions[] = {
    {"exp", [](double v) { return std::exp(v); }},
    {"sin", [](double v) { return std::sin(v); }},
    {"cos", [](double v) { return std::cos(v); }},
    {"log", [](double v) { return std::log(v); }},
    {"ln", [](double v) { return std::log(v); }},
    {"sqrt", [](double v) { return std::sqrt(v); }},
    {"abs", [](double v) { return std::fabs(v); }},
};

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return root;
  }

  unsigned used() const { return used_; }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ArgumentError("expression \"" + std::string(s_) + "\": " + msg + " at offset " +
                        std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(Node::Op op, NodePtr l, NodePtr r) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = {std::move(l), std::move(r)};
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) lhs = binary(Node::Op::add, lhs, term());
      else if (eat('-')) lhs = binary(Node::Op::sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) lhs = binary(Node::Op::mul, lhs, unary());
      else if (eat('/')) lhs = binary(Node::Op::div, lhs, unary());
      else return lhs;
    }
  }

  // -a^b parses as -(a^b)
  NodePtr unary() {
    if (eat('-')) {
      auto n = std::make_shared<Node>();
      n->op = Node::Op::neg;
      n->args = {unary()};
      return n;
    }
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) return binary(Node::Op::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (eat('(')) {
      NodePtr inner = expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    double v = 0.0;
    const char* begin = s_.data() + pos_;
    const auto res = std::from_chars(begin, s_.data() + s_.size(), v);
    if (res.ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(res.ptr - begin);
    auto n = std::make_shared<Node>();
    n->value = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string_view name = s_.substr(start, pos_ - start);
    auto n = std::make_shared<Node>();
    if (name == "pi" || name == "e") {
      n->value = name == "pi" ? std::numbers::pi : std::numbers::e;
      return n;
    }
    if (name.size() == 1 && var_bit(name[0]) != 0) {
      n->op = Node::Op::var;
      n->var = name[0];
      used_ |= var_bit(name[0]);
      return n;
    }
    for (const auto& f : kFunctions) {
      if (name == f.name) {
        n->op = Node::Op::call;
        n->fn = f.fn;
        if (eat('(')) {
          n->args = {expr()};
          if (!eat(')')) fail("expected ')'");
        } else {
          // ln4/ln3 reads as ln(4)/ln(3)
          n->args = {power()};
        }
        return n;
      }
    }
    pos_ = start;
    fail("unknown identifier \"" + std::string(name) + "\"");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  unsigned used_ = 0;
};

double eval(const Node& n, const Variables& v) {
  switch (n.op) {
    case Node::Op::number: return n.value;
    case Node::Op::var:
      switch (n.var) {
        case 't': return v.t;
        case 'S': return v.S;
        case 'x': return v.x;
        default: return v.y;
      }
    case Node::Op::neg: return -eval(*n.args[0], v);
    case Node::Op::add: return eval(*n.args[0], v) + eval(*n.args[1], v);
    case Node::Op::sub: return eval(*n.args[0], v) - eval(*n.args[1], v);
    case Node::Op::mul: return eval(*n.args[0], v) * eval(*n.args[1], v);
    case Node::Op::div: return eval(*n.args[0], v) / eval(*n.args[1], v);
    case Node::Op::pow: return std::pow(eval(*n.args[0], v), eval(*n.args[1], v));
    case Node::Op::call: return n.fn(eval(*n.args[0], v));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Parser p(text);
  Expression e;
  e.root_ = p.parse();
  e.text_ = std::string(text);
  e.used_ = p.used();
  return e;
}

double Expression::operator()(const Variables& vars) const { return eval(*root_, vars); }

bool Expression::uses(char variable) const { return (used_ & var_bit(variable)) != 0; }

double evaluate_constant(std::string_view text) {
  const Expression e = Expression::parse(text);
  for (char v : {'t', 'S', 'x', 'y'}) {
    if (e.uses(v)) throw ArgumentError("expression \"" + std::string(text) + "\" must be constant");
  }
  const double value = e({});
  if (!std::isfinite(value)) {
    throw ArgumentError("expression \"" + std::string(text) + "\" is not finite");
  }
  return value;
}

}  // namespace fcalc
