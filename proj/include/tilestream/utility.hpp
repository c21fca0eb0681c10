#ifndef TILESTREAM_UTILITY_HPP_
#define TILESTREAM_UTILITY_HPP_

#include <string>

namespace tilestream {

// User utility U(rate). Every shipped kind is strictly increasing and
// evaluable at rate 0 (the log kind is log1p for that reason). Concavity
// holds for linear, log, and power with exponent <= 1; power utilities with
// a larger exponent can be constructed but are rejected by the relaxed
// solver.
class Utility {
 public:
  static Utility linear(double a = 1.0, double b = 0.0);
  static Utility power(double exponent);
  static Utility log();

  double operator()(double rate_mbps) const;
  // One-sided derivative used for ascent directions.
  double slope(double rate_mbps) const;

  bool concave() const;
  std::string name() const;
  // "linear", "linear:a:b", "power:e", "log".
  static Utility parse(const std::string& text);

 private:
  enum class Kind { kLinear, kPower, kLog };
  Utility(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_;  // linear slope or power exponent
  double b_;  // linear intercept
};

}  // namespace tilestream

#endif  // TILESTREAM_UTILITY_HPP_
