#include "optstab/extended_real.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace optstab {

ExtendedReal::ExtendedReal(double v) : v_(v) {
  if (std::isnan(v)) throw std::domain_error("ExtendedReal: NaN is not an extended real");
}

double ExtendedReal::finite() const {
  if (!is_finite()) throw std::domain_error("ExtendedReal: value " + str() + " is not finite");
  return v_;
}

ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
  if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
    throw std::domain_error("ExtendedReal: +inf + -inf is undefined");
  return ExtendedReal(a.v_ + b.v_);
}

ExtendedReal operator*(double alpha, ExtendedReal x) {
  if (std::isnan(alpha)) throw std::domain_error("ExtendedReal: NaN scalar");
  if (alpha == 0.0) return ExtendedReal(0.0);
  if (x.is_finite() && std::isfinite(alpha)) return ExtendedReal(alpha * x.v_);
  if (x.v_ == 0.0) return ExtendedReal(0.0);
  return ExtendedReal(alpha * x.v_);
}

std::string ExtendedReal::str() const {
  if (is_pos_inf()) return "inf";
  if (is_neg_inf()) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v_);
  return buf;
}

ExtendedReal max(ExtendedReal a, ExtendedReal b) { return a < b ? b : a; }
ExtendedReal min(ExtendedReal a, ExtendedReal b) { return b < a ? b : a; }

ExtendedReal sup_of(std::span<const ExtendedReal> xs) {
  ExtendedReal s = ExtendedReal::neg_inf();
  for (auto x : xs) s = max(s, x);
  return s;
}

ExtendedReal inf_of(std::span<const ExtendedReal> xs) {
  ExtendedReal s = ExtendedReal::pos_inf();
  for (auto x : xs) s = min(s, x);
  return s;
}

ExtendedReal parse_extended(const std::string& text) {
  if (text == "inf" || text == "+inf") return ExtendedReal::pos_inf();
  if (text == "-inf") return ExtendedReal::neg_inf();
  std::size_t used = 0;
  double v = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("parse_extended: trailing characters in '" + text + "'");
  return ExtendedReal(v);
}

}  // namespace optstab
