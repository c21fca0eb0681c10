#include "tilestream/utility.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tilestream {

Utility Utility::linear(double a, double b) {
  if (!(a > 0.0)) throw std::invalid_argument("linear utility needs positive slope");
  return Utility(Kind::kLinear, a, b);
}

Utility Utility::power(double exponent) {
  if (!(exponent > 0.0)) throw std::invalid_argument("power utility needs positive exponent");
  return Utility(Kind::kPower, exponent, 0.0);
}

Utility Utility::log() { return Utility(Kind::kLog, 0.0, 0.0); }

double Utility::operator()(double rate_mbps) const {
  switch (kind_) {
    case Kind::kLinear:
      return a_ * rate_mbps + b_;
    case Kind::kPower:
      return std::pow(rate_mbps, a_);
    case Kind::kLog:
      return std::log1p(rate_mbps);
  }
  return 0.0;
}

double Utility::slope(double rate_mbps) const {
  switch (kind_) {
    case Kind::kLinear:
      return a_;
    case Kind::kPower:
      if (rate_mbps <= 0.0) return a_ >= 1.0 ? 0.0 : 1e12;
      return a_ * std::pow(rate_mbps, a_ - 1.0);
    case Kind::kLog:
      return 1.0 / (1.0 + rate_mbps);
  }
  return 0.0;
}

bool Utility::concave() const {
  switch (kind_) {
    case Kind::kLinear:
    case Kind::kLog:
      return true;
    case Kind::kPower:
      return a_ <= 1.0;
  }
  return false;
}

std::string Utility::name() const {
  std::ostringstream out;
  switch (kind_) {
    case Kind::kLinear:
      if (a_ == 1.0 && b_ == 0.0) return "linear";
      out << "linear:" << a_ << ":" << b_;
      return out.str();
    case Kind::kPower:
      out << "power:" << a_;
      return out.str();
    case Kind::kLog:
      return "log";
  }
  return "?";
}

Utility Utility::parse(const std::string& text) {
  if (text == "linear") return linear();
  if (text == "log") return log();
  if (text.rfind("power:", 0) == 0) return power(std::stod(text.substr(6)));
  if (text.rfind("linear:", 0) == 0) {
    const auto rest = text.substr(7);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) return linear(std::stod(rest));
    return linear(std::stod(rest.substr(0, colon)), std::stod(rest.substr(colon + 1)));
  }
  throw std::invalid_argument("unknown utility: " + text);
}

}  // namespace tilestream
