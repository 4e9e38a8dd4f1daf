#include "optstab/distances.hpp"

#include <cmath>
#include <utility>

#include "optstab/errors.hpp"

namespace optstab {

PseudoDistance::PseudoDistance(std::string name, Fn fn, std::optional<Eigen::Index> ambient_dim,
                               DistanceProperties props, DistanceKind kind)
    : name_(std::move(name)), fn_(std::move(fn)), dim_(ambient_dim), props_(props), kind_(kind) {
  if (dim_ && *dim_ <= 0) throw InputError("PseudoDistance: ambient dimension must be positive");
}

ExtendedReal PseudoDistance::operator()(const Point& x, const Point& y) const {
  if (x.size() != y.size())
    throw InputError("distance '" + name_ + "': dimension mismatch " + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()));
  if (dim_ && x.size() != *dim_)
    throw InputError("distance '" + name_ + "': expected dimension " + std::to_string(*dim_) + ", got " +
                     std::to_string(x.size()));
  return fn_(x, y);
}

namespace {
constexpr DistanceProperties kMetric{true, true, true, true};
}

PseudoDistance euclidean_distance(std::optional<Eigen::Index> dim) {
  return PseudoDistance(
      "euclidean", [](const Point& x, const Point& y) { return ExtendedReal((x - y).norm()); }, dim, kMetric,
      DistanceKind::euclidean);
}

PseudoDistance absolute_distance() {
  return PseudoDistance(
      "absolute", [](const Point& x, const Point& y) { return ExtendedReal(std::abs(x[0] - y[0])); }, 1, kMetric,
      DistanceKind::absolute);
}

double energy_level(double n) { return -13.6 / (n * n); }

PseudoDistance energy_ladder_distance() {
  // E(y) - E(x) = 13.6 (1/x^2 - 1/y^2); written this way d(1,2) rounds to 10.2.
  return PseudoDistance(
      "energy_ladder",
      [](const Point& x, const Point& y) {
        const double a = x[0], b = y[0];
        if (a < 1 || b < 1 || a != std::floor(a) || b != std::floor(b))
          throw InputError("energy_ladder: levels are positive integers");
        return ExtendedReal(13.6 * (1.0 / (a * a) - 1.0 / (b * b)));
      },
      1, DistanceProperties{false, false, true, true});
}

PseudoDistance magnitude_distance(std::string name, Magnitude s, std::optional<Eigen::Index> dim,
                                  DistanceProperties props) {
  return PseudoDistance(
      std::move(name), [s = std::move(s)](const Point& x, const Point& y) { return s(x - y); }, dim, props);
}

PseudoDistance reversed_magnitude_distance(std::string name, Magnitude s, std::optional<Eigen::Index> dim,
                                           DistanceProperties props) {
  return PseudoDistance(
      std::move(name), [s = std::move(s)](const Point& x, const Point& y) { return s(y - x); }, dim, props);
}

PseudoDistance constant_distance(ExtendedReal value) {
  return PseudoDistance("constant(" + value.str() + ")", [value](const Point&, const Point&) { return value; });
}

ExtendedReal conjugate_gauge(const Magnitude& s, const Point& x) { return s(-x); }

Magnitude conjugate(Magnitude s) {
  return [s = std::move(s)](const Point& x) { return s(-x); };
}

Magnitude euclidean_norm() {
  return [](const Point& x) { return ExtendedReal(x.norm()); };
}

}  // namespace optstab
