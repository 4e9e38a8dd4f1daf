#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optstab/optima.hpp"

namespace optstab {

/// Parameters are points of some R^p.
using Param = Eigen::VectorXd;

enum class AdmissibleClass { all_nonempty, nonempty_bounded, ball_closure };

/// t -> A_t together with a distance on the parameters.
struct ParamFamily {
  PseudoDistance d_i;
  std::function<SetModel(const Param&)> member;
  /// Distance on the ambient space of the members.
  PseudoDistance d_x = euclidean_distance();
  AdmissibleClass admissible = AdmissibleClass::all_nonempty;
  /// r_{A_t} for the ball-closure class.
  std::function<double(const Param&)> ball_radius{};
  /// alpha_{t,s} with D_H(A_t, A_s) <= alpha_{t,s} d_I(t, s).
  std::function<double(const Param&, const Param&)> hausdorff_rate{};
  /// A single alpha valid for every pair, when known.
  std::optional<double> global_rate{};
};

ParamFamily constant_family(SetModel a, PseudoDistance d_i);

struct ValueFunction {
  ValueMode mode = ValueMode::inf;
  ParamFamily family;
  ObjectiveFn objective;
};

OptValue eval_value_function(const ValueFunction& v, const Param& t, const OptOptions& opt = {});

struct DeltaLevel {
  double delta = 0.0;
  std::size_t probes_within = 0;
  ExtendedReal worst;
  bool passed = false;
};

/// Result of a geometric delta search.  verdict is "holds" when some level
/// passed with at least one probe, "inconclusive" otherwise.
struct LimsupReport {
  double eps = 0.0;
  std::optional<double> delta;
  std::string verdict;
  std::vector<DeltaLevel> levels;
  /// Largest |phi(t) - phi(t0)| among probes within the reported delta,
  /// when an objective was supplied.
  std::optional<ExtendedReal> value_jump;
  /// Set when the objective does not meet the hypotheses of the continuity
  /// result, so a value jump is not a failure of set convergence.
  std::string regularity_flag;
};

inline constexpr int kDeltaLevels = 20;

/// Largest delta in {eps, eps/2, ..., eps/2^20} with D_H(A_t0, A_t) < eps for
/// every probe with d_I(t0, t) < delta.
LimsupReport empirical_hausdorff_limsup(const ParamFamily& f, const Param& t0, std::span<const Param> probes,
                                        double eps, const DistanceOptions& dopt = {},
                                        const std::optional<ValueFunction>& value = std::nullopt);

/// Same search applied to |phi(t) - phi(t0)| < eps.
LimsupReport empirical_value_continuity(const ValueFunction& v, const Param& t0, std::span<const Param> probes,
                                        double eps, const OptOptions& opt = {});

struct LipschitzRow {
  Param t, s;
  ExtendedReal d_i;
  ExtendedReal bound;
  ExtendedReal observed;
  ExtendedReal slack;
  bool pass = true;
};

struct LipschitzReport {
  std::vector<LipschitzRow> rows;
  bool all_pass = true;
  /// alpha * Lambda when both are global.
  std::optional<double> global_constant;
  /// sup of observed / d_I over pairs with positive finite d_I.
  double worst_ratio = 0.0;
};

/// |phi(t) - phi(s)| <= alpha_{t,s} Lambda_{t,s} d_I(t, s) + tol on every pair.
LipschitzReport certify_value_lipschitz(const ValueFunction& v, std::span<const std::pair<Param, Param>> pairs,
                                        double tol = 1e-9, const OptOptions& opt = {});

}  // namespace optstab
