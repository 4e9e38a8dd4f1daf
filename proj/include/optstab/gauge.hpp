#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "optstab/distances.hpp"

namespace optstab {

/// Absolute bisection tolerance for membership-oracle gauges.
inline constexpr double kGaugeTolerance = 1e-10;

/// C = {x : a_i . x <= b_i}; rows of `normals` are the a_i.
struct HalfspaceBody {
  Eigen::MatrixXd normals;
  Eigen::VectorXd offsets;
};

/// C = conv(vertices).  Supported in dimensions 1 and 2.
struct VertexBody {
  std::vector<Point> vertices;
};

/// C = {x : ||x||_p <= radius}, p >= 1 (p = inf allowed).
struct NormBallBody {
  Eigen::Index dim = 0;
  double radius = 1.0;
  double p = 2.0;
};

/// C given by a membership test; C must lie in the ball of `bounding_radius`.
struct OracleBody {
  Eigen::Index dim = 0;
  std::function<bool(const Point&)> contains;
  double bounding_radius = 1.0;
};

/// A convex set containing the origin, used to build a Minkowski gauge.
class GaugeSet {
 public:
  using Body = std::variant<HalfspaceBody, VertexBody, NormBallBody, OracleBody>;

  /// Throws InvalidGaugeError when 0 is not in C.
  explicit GaugeSet(Body body);

  [[nodiscard]] const Body& body() const { return body_; }
  [[nodiscard]] Eigen::Index dim() const { return dim_; }
  [[nodiscard]] bool contains(const Point& x, double slack = 1e-12) const;

  /// M_C(x) = inf{mu >= 0 : x in mu C}.
  [[nodiscard]] ExtendedReal gauge(const Point& x) const;
  [[nodiscard]] Magnitude as_magnitude() const;

  /// Halfspace form of the body when one is available (halfspace bodies and
  /// vertex bodies in dimension <= 2).
  [[nodiscard]] const HalfspaceBody* halfspaces() const { return hs_ ? &*hs_ : nullptr; }

 private:
  Body body_;
  Eigen::Index dim_ = 0;
  std::optional<HalfspaceBody> hs_;
};

/// Closed form for halfspace bodies with b >= 0:
/// max(0, max_i a_i.x / b_i), where rows with b_i = 0 and a_i.x > 0 give +inf.
ExtendedReal halfspace_gauge(const HalfspaceBody& body, const Point& x);

/// Bracketing plus bisection on a membership oracle.
ExtendedReal oracle_gauge(const OracleBody& body, const Point& x, double tol = kGaugeTolerance);

/// 2-D convex hull (counter-clockwise, collinear points dropped).
std::vector<Point> convex_hull_2d(std::vector<Point> pts);

/// Halfspaces of conv(vertices) in dimension 1 or 2, including degenerate
/// hulls (segments, single points).
HalfspaceBody hull_halfspaces(const std::vector<Point>& vertices);

/// Vertices of a bounded polytope {x : a_i . x <= b_i} by enumerating
/// n-subsets of active rows.
std::vector<Point> polytope_vertices(const HalfspaceBody& h);

inline ExtendedReal minkowski_gauge(const GaugeSet& c, const Point& x) { return c.gauge(x); }

/// The segment [-2, 1] x {0} in the plane.
GaugeSet segment_gauge_set();

}  // namespace optstab
