#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "optstab/sets.hpp"

namespace optstab {

/// |f(x) - f(y)| <= lambda * d(x, y).
struct Lipschitz {
  double lambda = 0.0;
};

/// Lipschitz on each box, with a constant depending on the box.
struct LipschitzLocal {
  std::function<double(const Box&)> lambda_of;
};

/// d(x, y) < delta(eps) implies |f(x) - f(y)| < eps.  `omega`, when given,
/// is a modulus in the other direction: |f(x) - f(y)| <= omega(d(x, y)).
struct Uniform {
  std::function<double(double)> delta;
  std::function<double(double)> omega;
};

struct ContinuousOnly {};

using Regularity = std::variant<Lipschitz, LipschitzLocal, Uniform, ContinuousOnly>;

std::string regularity_name(const Regularity& r);

enum class ValueMode { sup, inf };
std::string to_string(ValueMode m);

struct OptValue {
  ExtendedReal value;
  std::optional<Point> witness;
  EvalMode mode = EvalMode::exact;
};

/// A real-valued objective plus what is known about its regularity.
struct ObjectiveFn {
  std::string name;
  std::function<double(const Point&)> eval;
  Regularity regularity = ContinuousOnly{};
  /// Exact sup or inf over sets the objective understands; nullopt
  /// otherwise.  A witness is reported only when the value is attained.
  std::function<std::optional<OptValue>(const SetModel&, ValueMode)> extremum;
  /// delta such that d(a, x) < delta implies |f(x) - f(a)| < eps.
  std::function<double(const Point&, double)> local_delta;

  /// Evaluates and rejects non-finite values.
  double operator()(const Point& x) const;
};

ObjectiveFn negate(const ObjectiveFn& f);
ObjectiveFn with_regularity(ObjectiveFn f, Regularity r);

/// Piecewise-linear function of one variable through (xs[i], ys[i]), constant
/// beyond the first and last breakpoints.  Lipschitz with the largest slope.
ObjectiveFn piecewise_linear(std::vector<double> xs, std::vector<double> ys, std::string name = "piecewise_linear");

/// f(x) = c . x + c0.
ObjectiveFn linear_objective(Eigen::VectorXd c, double c0 = 0.0);

/// f(x) = ||x - center||, 1-Lipschitz for the Euclidean metric.
ObjectiveFn distance_objective(Point center);

ObjectiveFn constant_objective(double c);

/// f(x) = x' Q x + c . x + c0 with Q symmetric.  Exact extrema over segments
/// (one-dimensional slabs); Lipschitz on boxes.
ObjectiveFn quadratic_objective(Eigen::MatrixXd q, Eigen::VectorXd c, double c0 = 0.0);

struct OptOptions {
  std::size_t budget = 4096;
  std::uint64_t seed = 0x5eed;
};

OptValue sup_over(const ObjectiveFn& f, const SetModel& a, const OptOptions& opt = {});
OptValue inf_over(const ObjectiveFn& f, const SetModel& a, const OptOptions& opt = {});
/// Over an explicit list of points; the empty list gives -inf / +inf.
OptValue sup_over(const ObjectiveFn& f, std::span<const Point> pts);
OptValue inf_over(const ObjectiveFn& f, std::span<const Point> pts);

inline constexpr double kOptTolerance = 1e-9;

struct StabilityRow {
  std::size_t pair_id = 0;
  ExtendedReal d_h;
  EvalMode d_h_mode = EvalMode::exact;
  ExtendedReal sup_a, sup_b;
  ExtendedReal inf_a, inf_b;
  ExtendedReal delta_used;
  ExtendedReal bound;
  ExtendedReal slack;
  std::string verdict;
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  bool all_pass = true;
  std::string regularity;
};

struct StabilityOptions {
  /// Run even for continuous-only objectives and report jumps.
  bool diagnostic = false;
  double tol = kOptTolerance;
  DistanceOptions distance;
  OptOptions opt;
};

/// For each pair (A, A'), compares the change of SUP_f and INF_f with what the
/// regularity of f allows given D_H(A, A').
StabilityReport check_finite_stability(const ObjectiveFn& f, const PseudoDistance& d,
                                       std::span<const std::pair<SetModel, SetModel>> pairs, double eps,
                                       const StabilityOptions& opt = {});

/// Points a_0, a_1, ... of A along which f (or -f in inf mode) is unbounded
/// above.
struct UnboundednessCertificate {
  std::function<Point(std::size_t)> witness;
  std::size_t max_steps = 4096;
};

struct EscapeRow {
  std::size_t candidate = 0;
  ExtendedReal d_asy;
  ExtendedReal value;
  std::string verdict;
};

struct EscapeReport {
  Point witness;
  double witness_value = 0.0;
  double delta = 0.0;
  std::vector<EscapeRow> rows;
  bool all_pass = true;
};

/// Given SUP_f(A) = +inf (or INF_f(A) = -inf), finds a in A with f(a) > mu + eps
/// and delta from continuity at a, then checks each candidate A' with
/// D_asyH(A, A') < delta for SUP_f(A') > mu (resp. INF_f(A') < mu).
EscapeReport check_infinite_escape(const ObjectiveFn& f, const PseudoDistance& d, const SetModel& a, double mu,
                                   std::span<const SetModel> candidates,
                                   const std::optional<UnboundednessCertificate>& cert, double eps = 1.0,
                                   ValueMode mode = ValueMode::sup, const DistanceOptions& dopt = {});

/// SUP_f(A') <= SUP_f(A) + eps and SUP_f(A') > -inf whenever D_H(A, A') < delta
/// and delta belongs to eps under the modulus of f.
bool domain_transfer_check(const ObjectiveFn& f, const PseudoDistance& d, const SetModel& a, double delta,
                           const SetModel& b, double eps, const DistanceOptions& dopt = {});

struct MinimizerDemo {
  double eps = 0.0;
  std::vector<double> argmin_a;
  std::vector<double> argmin_shifted;
  ExtendedReal hausdorff_argmin;
  ExtendedReal asym_argmin;
  ExtendedReal hausdorff_sets;
};

/// f(t) = |sin t| on [-20, 20], A = [0, pi] against A' = [-eps, pi - eps].
MinimizerDemo minimizer_set_instability_demo(double eps = 0.1);

}  // namespace optstab
