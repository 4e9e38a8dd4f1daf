#pragma once

#include <compare>
#include <limits>
#include <ostream>
#include <span>
#include <string>

namespace optstab {

/// A value in [-inf, +inf].  NaN is not representable; constructing one
/// throws.  Comparison is the exact floating order extended by
/// -inf < r < +inf, never a tolerance.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  ExtendedReal(double v);  // NOLINT(google-explicit-constructor)

  static constexpr ExtendedReal pos_inf() { return ExtendedReal(Raw{}, std::numeric_limits<double>::infinity()); }
  static constexpr ExtendedReal neg_inf() { return ExtendedReal(Raw{}, -std::numeric_limits<double>::infinity()); }

  [[nodiscard]] constexpr double value() const { return v_; }
  [[nodiscard]] constexpr bool is_finite() const { return v_ - v_ == 0.0; }
  [[nodiscard]] constexpr bool is_pos_inf() const { return v_ == std::numeric_limits<double>::infinity(); }
  [[nodiscard]] constexpr bool is_neg_inf() const { return v_ == -std::numeric_limits<double>::infinity(); }

  /// Finite value, or throws std::domain_error.
  [[nodiscard]] double finite() const;

  friend constexpr std::strong_ordering operator<=>(ExtendedReal a, ExtendedReal b) {
    if (a.v_ < b.v_) return std::strong_ordering::less;
    if (a.v_ > b.v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) { return a.v_ == b.v_; }

  ExtendedReal operator-() const { return ExtendedReal(Raw{}, -v_); }

  /// Throws std::domain_error on (+inf) + (-inf).
  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b);
  friend ExtendedReal operator-(ExtendedReal a, ExtendedReal b) { return a + (-b); }

  /// Scalar product with the convention 0 * (+-inf) = 0.
  friend ExtendedReal operator*(double alpha, ExtendedReal x);

  [[nodiscard]] std::string str() const;
  friend std::ostream& operator<<(std::ostream& os, ExtendedReal x) { return os << x.str(); }

 private:
  struct Raw {};
  constexpr ExtendedReal(Raw, double v) : v_(v) {}
  double v_ = 0.0;
};

ExtendedReal max(ExtendedReal a, ExtendedReal b);
ExtendedReal min(ExtendedReal a, ExtendedReal b);

/// sup of an empty collection is -inf.
ExtendedReal sup_of(std::span<const ExtendedReal> xs);
/// inf of an empty collection is +inf.
ExtendedReal inf_of(std::span<const ExtendedReal> xs);

/// Parses "inf", "+inf", "-inf" or a decimal literal.
ExtendedReal parse_extended(const std::string& text);

}  // namespace optstab
