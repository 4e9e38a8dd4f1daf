#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "optstab/gauge.hpp"
#include "optstab/sets.hpp"

namespace optstab {

inline constexpr double kLadderTolerance = 1e-6;

/// Convex set C: the whole space, a closed box, a closed ball or a polytope.
using ConvexRegion = std::variant<std::monostate, Box, BallDescriptor, HalfspaceBody>;

/// A twice differentiable objective on an open box U with a convex set C and
/// a base point y0 in C and U.
struct SmoothProblem {
  std::string name;
  Eigen::Index dim = 1;
  std::function<double(const Point&)> f;
  std::function<Point(const Point&)> gradient;
  /// ||f''(x)||; finite differences of the gradient when empty.
  std::function<double(const Point&)> hessian_norm;
  /// Open box; unbounded sides use infinite coordinates.  Whole space if empty.
  std::optional<Box> u;
  ConvexRegion c;
  Point y0;
  /// sup of ||f''|| over B(y0, t) intersected with C and U, when known.
  std::function<double(double)> radial_sup;
  /// A declared finite bound s = sup of ||f''|| over C and U.
  std::optional<double> hessian_bound;
};

bool in_region(const SmoothProblem& p, const Point& x);
double hessian_norm_at(const SmoothProblem& p, const Point& x);

struct HessianSup {
  double value = 0.0;
  EvalMode mode = EvalMode::exact;
};

struct LadderLevel {
  std::size_t k = 0;
  double lambda = 0.0;
  double t = 0.0;
  bool covers_all = false;
  bool verified = false;
  double worst_ratio = 0.0;
  std::size_t pairs = 0;
  std::size_t points = 0;
};

struct LadderResult {
  std::vector<LadderLevel> levels;
  double s0 = 0.0;
  std::optional<double> s;
  EvalMode mode = EvalMode::exact;
  std::size_t coverage_probes = 0;
  std::size_t coverage_hits = 0;
  bool all_verified = true;
};

struct LadderOptions {
  std::size_t pairs = 10000;
  std::size_t sup_samples = 1000;
  int refine_rounds = 5;
  std::uint64_t seed = 0x1add;
  std::size_t coverage_probes = 200;
};

/// Radial Hessian supremum phi(t) with a memo that keeps it nondecreasing
/// in t.  Not safe for concurrent use.
class LadderSolver {
 public:
  explicit LadderSolver(SmoothProblem p, LadderOptions opt = {});

  [[nodiscard]] const SmoothProblem& problem() const { return p_; }
  HessianSup hessian_sup(double t);
  /// t > 0 with |phi(t) - lambda| <= kLadderTolerance.
  double solve_radius(double lambda, double t_hint = 1.0);
  LadderResult build_ladder(std::span<const double> lambdas);

 private:
  double sampled_sup(double t);
  std::optional<double> region_radius() const;
  std::vector<Point> sample_region(double t, std::size_t n, std::uint64_t seed) const;
  LadderLevel verify_level(std::size_t k, double lambda, double t, bool covers_all);

  SmoothProblem p_;
  LadderOptions opt_;
  std::map<double, double> memo_;
};

HessianSup hessian_sup(const SmoothProblem& p, double t);
double solve_radius(const SmoothProblem& p, double lambda, double t_hint = 1.0);
LadderResult build_ladder(const SmoothProblem& p, std::span<const double> lambdas, const LadderOptions& opt = {});

/// x^4 / 12 on the line, y0 = 0: ||f''(x)|| = x^2.
SmoothProblem quartic_problem();
/// e^x + e^-x on the line, y0 = 0: ||f''(x)|| = 2 cosh x.
SmoothProblem cosh_problem();
/// (a/2) x^2 on the line: constant Hessian norm a.
SmoothProblem quadratic_problem(double a);
/// ||x||^4 / 12 on the plane restricted to a box C.
SmoothProblem quartic_plane_problem(Box c, Point y0);

}  // namespace optstab
