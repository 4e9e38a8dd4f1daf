#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

#include "optstab/extended_real.hpp"

namespace optstab {

using Point = Eigen::VectorXd;

/// A magnitude function S: X -> [-inf, inf]; gauges, norms and star-body
/// functions all fit this shape.
using Magnitude = std::function<ExtendedReal(const Point&)>;

/// Structural shape of a distance, used by the set module to select closed
/// forms.  Anything not listed is treated as a black box.
enum class DistanceKind { generic, euclidean, absolute };

/// Properties an instance claims; tests check the claims on sampled triples.
struct DistanceProperties {
  bool symmetric = false;
  bool nonnegative = false;
  bool triangle = false;
  bool zero_on_diagonal = false;
};

/// d: X x X -> [-inf, inf] with no axioms imposed.
class PseudoDistance {
 public:
  using Fn = std::function<ExtendedReal(const Point&, const Point&)>;

  PseudoDistance(std::string name, Fn fn, std::optional<Eigen::Index> ambient_dim = std::nullopt,
                 DistanceProperties props = {}, DistanceKind kind = DistanceKind::generic);

  /// Throws InputError when either point has the wrong dimension.
  [[nodiscard]] ExtendedReal operator()(const Point& x, const Point& y) const;

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] std::optional<Eigen::Index> ambient_dim() const { return dim_; }
  [[nodiscard]] const DistanceProperties& properties() const { return props_; }
  [[nodiscard]] DistanceKind kind() const { return kind_; }
  [[nodiscard]] bool is_metric() const {
    return props_.symmetric && props_.nonnegative && props_.triangle && props_.zero_on_diagonal;
  }

 private:
  std::string name_;
  Fn fn_;
  std::optional<Eigen::Index> dim_;
  DistanceProperties props_;
  DistanceKind kind_;
};

inline ExtendedReal eval_distance(const PseudoDistance& d, const Point& x, const Point& y) { return d(x, y); }

/// Euclidean metric; dimension checked when given.
PseudoDistance euclidean_distance(std::optional<Eigen::Index> dim = std::nullopt);
/// |x - y| on the real line.
PseudoDistance absolute_distance();

/// Electron energy levels on {1, 2, ...}: d(x, y) = E(y) - E(x) with
/// E(n) = -13.6 / n^2 (eV).  Negative when the jump releases energy.
PseudoDistance energy_ladder_distance();
double energy_level(double n);

/// d(x, y) = S(x - y).
PseudoDistance magnitude_distance(std::string name, Magnitude s, std::optional<Eigen::Index> dim = std::nullopt,
                                  DistanceProperties props = {});
/// d(x, y) = S(y - x).
PseudoDistance reversed_magnitude_distance(std::string name, Magnitude s,
                                           std::optional<Eigen::Index> dim = std::nullopt,
                                           DistanceProperties props = {});

/// d == +inf everywhere.
PseudoDistance constant_distance(ExtendedReal value);

/// S(-x).
ExtendedReal conjugate_gauge(const Magnitude& s, const Point& x);
Magnitude conjugate(Magnitude s);

Magnitude euclidean_norm();

}  // namespace optstab
