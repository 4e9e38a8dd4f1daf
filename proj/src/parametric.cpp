#include "optstab/parametric.hpp"

#include <cmath>

#include "optstab/errors.hpp"

namespace optstab {

namespace {

double abs_diff(ExtendedReal a, ExtendedReal b) {
  if (a.is_finite() && b.is_finite()) return std::abs(a.value() - b.value());
  return a == b ? 0.0 : std::numeric_limits<double>::infinity();
}

LimsupReport delta_search(const PseudoDistance& d_i, const Param& t0, std::span<const Param> probes, double eps,
                          const std::function<ExtendedReal(const Param&)>& quantity) {
  if (!(eps > 0.0)) throw InputError("delta search: eps must be positive");
  LimsupReport rep;
  rep.eps = eps;
  std::vector<ExtendedReal> dist(probes.size()), q(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    dist[i] = d_i(t0, probes[i]);
    q[i] = quantity(probes[i]);
  }
  double delta = eps;
  for (int level = 0; level <= kDeltaLevels; ++level, delta /= 2.0) {
    DeltaLevel row;
    row.delta = delta;
    row.worst = ExtendedReal::neg_inf();
    for (std::size_t i = 0; i < probes.size(); ++i) {
      if (!(dist[i] < ExtendedReal(delta))) continue;
      ++row.probes_within;
      row.worst = max(row.worst, q[i]);
    }
    row.passed = row.probes_within > 0 && row.worst < ExtendedReal(eps);
    rep.levels.push_back(row);
    if (row.passed) {
      rep.delta = delta;
      break;
    }
  }
  rep.verdict = rep.delta ? "holds" : "inconclusive";
  return rep;
}

}  // namespace

ParamFamily constant_family(SetModel a, PseudoDistance d_i) {
  ParamFamily f{.d_i = std::move(d_i), .member = [a](const Param&) { return a; }};
  f.hausdorff_rate = [](const Param&, const Param&) { return 0.0; };
  f.global_rate = 0.0;
  return f;
}

OptValue eval_value_function(const ValueFunction& v, const Param& t, const OptOptions& opt) {
  const SetModel a = v.family.member(t);
  return v.mode == ValueMode::sup ? sup_over(v.objective, a, opt) : inf_over(v.objective, a, opt);
}

LimsupReport empirical_hausdorff_limsup(const ParamFamily& f, const Param& t0, std::span<const Param> probes,
                                        double eps, const DistanceOptions& dopt,
                                        const std::optional<ValueFunction>& value) {
  const SetModel base = f.member(t0);
  auto rep = delta_search(f.d_i, t0, probes, eps,
                          [&](const Param& t) { return hausdorff(f.d_x, base, f.member(t), dopt).value; });
  if (value) {
    const auto phi0 = eval_value_function(*value, t0).value;
    ExtendedReal jump = 0.0;
    const double within = rep.delta.value_or(eps);
    for (const auto& t : probes)
      if (f.d_i(t0, t) < ExtendedReal(within)) jump = max(jump, abs_diff(eval_value_function(*value, t).value, phi0));
    rep.value_jump = jump;
    if (std::holds_alternative<ContinuousOnly>(value->objective.regularity))
      rep.regularity_flag = "objective '" + value->objective.name +
                            "' is not uniformly continuous; the value-function continuity hypotheses fail on f, "
                            "not on set convergence";
  }
  return rep;
}

LimsupReport empirical_value_continuity(const ValueFunction& v, const Param& t0, std::span<const Param> probes,
                                        double eps, const OptOptions& opt) {
  const auto phi0 = eval_value_function(v, t0, opt).value;
  return delta_search(v.family.d_i, t0, probes, eps, [&](const Param& t) {
    return ExtendedReal(abs_diff(eval_value_function(v, t, opt).value, phi0));
  });
}

LipschitzReport certify_value_lipschitz(const ValueFunction& v, std::span<const std::pair<Param, Param>> pairs,
                                        double tol, const OptOptions& opt) {
  const auto& fam = v.family;
  if (!fam.hausdorff_rate && !fam.global_rate)
    throw HypothesisError("certify_value_lipschitz: family carries no Hausdorff rate");
  const auto* global = std::get_if<Lipschitz>(&v.objective.regularity);
  const auto* local = std::get_if<LipschitzLocal>(&v.objective.regularity);
  if (!global && !local) throw HypothesisError("certify_value_lipschitz: objective carries no Lipschitz constant");

  LipschitzReport rep;
  if (global && fam.global_rate) rep.global_constant = *fam.global_rate * global->lambda;
  for (const auto& [t, s] : pairs) {
    LipschitzRow row;
    row.t = t;
    row.s = s;
    row.d_i = fam.d_i(t, s);
    const SetModel at = fam.member(t), as = fam.member(s);
    double lambda = 0.0;
    if (global) {
      lambda = global->lambda;
    } else {
      auto bt = at.bounding_box(), bs = as.bounding_box();
      if (!bt || !bs) throw HypothesisError("certify_value_lipschitz: local constant needs bounded members");
      lambda = local->lambda_of(Box{bt->lo.cwiseMin(bs->lo), bt->hi.cwiseMax(bs->hi)});
    }
    const double alpha = fam.hausdorff_rate ? fam.hausdorff_rate(t, s) : *fam.global_rate;
    row.bound = (alpha * lambda) * row.d_i;
    auto phi = [&](const SetModel& a) {
      return v.mode == ValueMode::sup ? sup_over(v.objective, a, opt).value : inf_over(v.objective, a, opt).value;
    };
    row.observed = abs_diff(phi(at), phi(as));
    row.slack = row.bound + ExtendedReal(tol) - row.observed;
    row.pass = row.slack >= ExtendedReal(0.0);
    if (row.d_i.is_finite() && row.d_i.value() > 0.0 && row.observed.is_finite())
      rep.worst_ratio = std::max(rep.worst_ratio, row.observed.value() / row.d_i.value());
    rep.all_pass = rep.all_pass && row.pass;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace optstab
