#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "optstab/gauge.hpp"
#include "optstab/ladder.hpp"
#include "optstab/optima.hpp"
#include "optstab/parametric.hpp"
#include "optstab/scheme.hpp"

namespace optstab {

/// Breakpoints of block k of the ce33 objective: 2k+1, 2k+1+1/(2k),
/// 2k+1+1/k, 2k+2, carrying the values 0, -1, 1, 0.
std::vector<double> ce33_breakpoints(int k);

/// Piecewise-linear f on the line, zero outside the blocks k = 2..K.
/// Continuous but not uniformly continuous; declared continuous-only.
ObjectiveFn ce33_objective(int k_max);
/// Union of [2k, 2k+1] for k = 2..K.
SetModel ce33_set(int k_max);
/// As ce33_set, with block j widened to [2j, 2j+1+1/j].
SetModel ce33_perturbed(int k_max, int j);
/// t = 0 gives A, t > 0 gives A_j with j = round(1/t).
ParamFamily ce33_family(int k_max);

/// f_k(t) = 0 on [0, 1], sin(2 pi / (1 + 1/k - t)) on [1, 1 + 1/k).
double ce34_piece(int k, double t);
/// f(x) = f_k(x_{k-1}) on the k-th axis of R^K; zero at the origin.
ObjectiveFn ce34_objective(int k_max);
/// Union of [0, e_k] for k = 1..K.
SetModel ce34_set(int k_max);
/// As ce34_set with axis j replaced by the half-open [0, (1 + 1/j) e_j).
SetModel ce34_perturbed(int k_max, int j);

/// f(x1, x2) = g(x2) for a unit step g; discontinuous in the norm but
/// uniformly continuous under the segment gauge.
ObjectiveFn gauge_step_objective();

/// Quantity an instance reproduces on construction.
struct Golden {
  std::string quantity;
  ExtendedReal expected;
  ExtendedReal computed;
  double tol = 0.0;
  bool pass = false;
};

struct InstanceCatalogEntry {
  std::string name;
  std::string description;
  std::optional<PseudoDistance> distance;
  std::optional<ObjectiveFn> objective;
  std::vector<std::pair<std::string, SetModel>> sets;
  std::optional<ParamFamily> family;
  std::optional<GaugeSet> gauge;
  std::optional<SmoothProblem> smooth;
  std::vector<Golden> goldens;

  [[nodiscard]] bool self_test() const;
  [[nodiscard]] const SetModel& set(const std::string& label) const;
};

/// Named numeric parameters, e.g. {"K", 60}, {"j", 10}.
using InstanceParams = std::map<std::string, double>;

/// Throws CatalogError for unknown names.
InstanceCatalogEntry build(const std::string& name, const InstanceParams& params = {});
std::vector<std::string> catalog_names();
std::string describe_instance(const std::string& name);

}  // namespace optstab
