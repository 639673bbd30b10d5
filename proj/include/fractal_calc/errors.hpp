#pragma once

#include <stdexcept>
#include <string>

namespace fcalc {

// Parameter or value outside the domain of a curve, staircase or conjugate.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite sums, zero denominators and similar numeric breakdowns.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A refinement loop ran out of budget before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double lower, double upper)
      : std::runtime_error(what), lower_(lower), upper_(upper) {}

  double lower() const { return lower_; }
  double upper() const { return upper_; }

 private:
  double lower_;
  double upper_;
};

// Bisection could not start: R(alpha) - 1 has the same sign at both ends.
class BracketError : public std::runtime_error {
 public:
  BracketError(const std::string& what, double r_low, double r_high)
      : std::runtime_error(what), r_low_(r_low), r_high_(r_high) {}

  double ratio_at_low() const { return r_low_; }
  double ratio_at_high() const { return r_high_; }

 private:
  double r_low_;
  double r_high_;
};

}  // namespace fcalc
