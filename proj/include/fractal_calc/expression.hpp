#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace fcalc {

// Bindings for the free variables of an expression.
struct Variables {
  double t = 0.0;
  double S = 0.0;
  double x = 0.0;
  double y = 0.0;
};

// Numbers, t S x y, pi e, + - * / ^ (right-associative), unary minus, and
// exp sin cos log ln sqrt abs. A function name may also be applied without
// parentheses to a power term. Throws ArgumentError on malformed input.
class Expression {
 public:
  struct Node;

  static Expression parse(std::string_view text);

  double operator()(const Variables& vars) const;
  bool uses(char variable) const;
  const std::string& text() const { return text_; }

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  unsigned used_ = 0;
};

// Parses and evaluates an expression with no free variables.
double evaluate_constant(std::string_view text);

}  // namespace fcalc
