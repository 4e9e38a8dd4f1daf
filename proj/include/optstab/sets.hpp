#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "optstab/distances.hpp"

namespace optstab {

/// 1-D interval; endpoints may be infinite (then they count as open).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = true;
  bool hi_closed = true;

  [[nodiscard]] bool contains(double t) const {
    return (lo_closed ? t >= lo : t > lo) && (hi_closed ? t <= hi : t < hi);
  }
};

struct FiniteCloud {
  std::vector<Point> points;
};

/// Sorted, pairwise disjoint intervals on the real line.
struct IntervalUnion {
  std::vector<Interval> pieces;
};

/// The segment {s e_axis : s in [lo, hi]} (upper end possibly open) of a
/// truncated sequence space R^dim.
struct AxisSegment {
  Eigen::Index axis = 0;
  double lo = 0.0;
  double hi = 1.0;
  bool hi_closed = true;
};

struct AxisSegments {
  Eigen::Index dim = 0;
  std::vector<AxisSegment> segments;
};

/// Closed Euclidean ball; optional closed-form metadata for implicit sets.
struct BallDescriptor {
  Point center;
  double radius = 0.0;
};

struct Box {
  Point lo;
  Point hi;
};

/// A set known through a membership test and a sampler of its members.
struct ImplicitSampled {
  Eigen::Index dim = 0;
  std::function<bool(const Point&)> contains;
  std::function<Point(std::mt19937_64&)> sample;
  Point witness;
  std::optional<BallDescriptor> ball;
  std::optional<Box> bounds;
  /// Exact Euclidean distance from a point to the set, when known.
  std::function<double(const Point&)> distance_to;
  bool convex = false;
  /// For polytopes: the vertices whose hull is the set.
  std::vector<Point> vertices;
  std::string tag;
};

/// {particular + kernel * z : lo <= z <= hi}; kernel columns orthonormal.
/// An affine subspace truncated by a box in kernel coordinates.
struct AffineSlab {
  Point particular;
  Eigen::MatrixXd kernel;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

/// Nonempty subset of the ambient space.  Construction validates the
/// representation invariants and certifies a member point.
class SetModel {
 public:
  using Variant = std::variant<FiniteCloud, IntervalUnion, AxisSegments, ImplicitSampled, AffineSlab>;

  SetModel(Variant v);  // NOLINT(google-explicit-constructor)
  SetModel(FiniteCloud v) : SetModel(Variant(std::move(v))) {}        // NOLINT
  SetModel(IntervalUnion v) : SetModel(Variant(std::move(v))) {}      // NOLINT
  SetModel(AxisSegments v) : SetModel(Variant(std::move(v))) {}       // NOLINT
  SetModel(ImplicitSampled v) : SetModel(Variant(std::move(v))) {}    // NOLINT
  SetModel(AffineSlab v) : SetModel(Variant(std::move(v))) {}         // NOLINT

  [[nodiscard]] const Variant& variant() const { return v_; }
  [[nodiscard]] Eigen::Index dim() const { return dim_; }
  [[nodiscard]] const Point& witness() const { return witness_; }
  [[nodiscard]] bool contains(const Point& x, double tol = 1e-12) const;
  [[nodiscard]] std::optional<Box> bounding_box() const;

  template <class T>
  [[nodiscard]] const T* get() const {
    return std::get_if<T>(&v_);
  }

 private:
  Variant v_;
  Eigen::Index dim_ = 0;
  Point witness_;
};

/// Convenience constructors.
SetModel cloud(std::vector<Point> pts);
SetModel cloud_1d(std::initializer_list<double> xs);
SetModel interval_union(std::vector<Interval> pieces);
Point pt(std::initializer_list<double> xs);

enum class EvalMode { exact, sampled };
std::string to_string(EvalMode m);

/// forward: d(x, a) as written; reversed: d(a, x).
enum class Orientation { forward, reversed };

struct DistanceOptions {
  std::size_t budget = 4096;
  std::uint64_t seed = 0x5eed;
  Orientation orientation = Orientation::forward;
};

/// value plus how it was obtained.  Sampled point-to-set values are upper
/// bounds of the infimum; sampled Hausdorff values are lower bounds of the
/// supremum when the inner distance is exact.
struct DistanceReport {
  ExtendedReal value;
  EvalMode mode = EvalMode::exact;
  std::size_t sample_budget = 0;
  ExtendedReal certified_error = 0.0;
};

/// Deterministic sample of members: structural points first (endpoints,
/// corners, the witness), then draws from a generator seeded with `seed`.
/// The first k points for budget n are the points for budget k.
std::vector<Point> sample_points(const SetModel& a, std::size_t budget, std::uint64_t seed);

DistanceReport point_set_distance(const PseudoDistance& d, const Point& x, const SetModel& a,
                                  const DistanceOptions& opt = {});
DistanceReport set_set_distance(const PseudoDistance& d, const SetModel& a, const SetModel& b,
                                const DistanceOptions& opt = {});
DistanceReport asym_hausdorff(const PseudoDistance& d, const SetModel& a, const SetModel& b,
                              const DistanceOptions& opt = {});
DistanceReport hausdorff(const PseudoDistance& d, const SetModel& a, const SetModel& b,
                         const DistanceOptions& opt = {});

/// Members p of `probe` with d(p, A) <= r.  Possibly empty.
std::vector<Point> ball_around_set(const PseudoDistance& d, const SetModel& a, double r,
                                   std::span<const Point> probe, const DistanceOptions& opt = {});

/// Exact Euclidean distance from x to an affine slab.
double slab_distance(const AffineSlab& s, const Point& x);
/// Exact Euclidean distance from x to an axis-segment union.
double axis_segments_distance(const AxisSegments& s, const Point& x);
/// Exact distance on the line from t to an interval union.
double interval_union_distance(const IntervalUnion& u, double t);
/// Corners of the kernel-coordinate box of a slab (2^k points).
std::vector<Point> slab_corners(const AffineSlab& s);

}  // namespace optstab
