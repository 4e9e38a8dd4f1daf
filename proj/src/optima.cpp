#include "optstab/optima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "optstab/errors.hpp"

namespace optstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
  Point x;
  double value;
  bool attained;
};

std::optional<OptValue> pick(const std::vector<Candidate>& cands, ValueMode mode) {
  if (cands.empty()) return std::nullopt;
  const bool want_max = mode == ValueMode::sup;
  const Candidate* best = nullptr;
  for (const auto& c : cands) {
    if (!best || (want_max ? c.value > best->value : c.value < best->value) ||
        (c.value == best->value && c.attained && !best->attained))
      best = &c;
  }
  OptValue out{best->value, std::nullopt, EvalMode::exact};
  if (best->attained && std::isfinite(best->value)) out.witness = best->x;
  return out;
}

OptValue extreme_over_points(const ObjectiveFn& f, std::span<const Point> pts, ValueMode mode) {
  OptValue out{mode == ValueMode::sup ? ExtendedReal::neg_inf() : ExtendedReal::pos_inf(), std::nullopt,
               EvalMode::exact};
  for (const auto& p : pts) {
    const double v = f(p);
    if (mode == ValueMode::sup ? ExtendedReal(v) > out.value : ExtendedReal(v) < out.value) {
      out.value = v;
      out.witness = p;
    }
  }
  return out;
}

OptValue extreme_over(const ObjectiveFn& f, const SetModel& a, ValueMode mode, const OptOptions& opt) {
  if (f.extremum) {
    if (auto v = f.extremum(a, mode)) return *v;
  }
  if (const auto* c = a.get<FiniteCloud>()) return extreme_over_points(f, c->points, mode);
  auto pts = sample_points(a, opt.budget, opt.seed);
  auto out = extreme_over_points(f, pts, mode);
  out.mode = EvalMode::sampled;
  return out;
}

double abs_diff(ExtendedReal a, ExtendedReal b) {
  if (a.is_finite() && b.is_finite()) return std::abs(a.value() - b.value());
  if (a == b) return 0.0;
  return kInf;
}

std::optional<Box> union_box(const SetModel& a, const SetModel& b) {
  auto ba = a.bounding_box(), bb = b.bounding_box();
  if (!ba || !bb) return std::nullopt;
  return Box{ba->lo.cwiseMin(bb->lo), ba->hi.cwiseMax(bb->hi)};
}

std::optional<double> lipschitz_constant(const ObjectiveFn& f, const SetModel& a, const SetModel& b) {
  if (const auto* l = std::get_if<Lipschitz>(&f.regularity)) return l->lambda;
  if (const auto* l = std::get_if<LipschitzLocal>(&f.regularity)) {
    auto box = union_box(a, b);
    if (!box) throw HypothesisError("local Lipschitz constant needs bounded sets");
    return l->lambda_of(*box);
  }
  return std::nullopt;
}

// Candidate points for a 1-D objective over one interval piece, given
// the interior breakpoints that matter.
void interval_candidates(const Interval& iv, const std::vector<double>& breaks,
                         const std::function<double(double)>& g, std::vector<Candidate>& out) {
  for (double b : breaks)
    if (b > iv.lo && b < iv.hi) out.push_back({pt({b}), g(b), true});
  if (std::isfinite(iv.lo)) out.push_back({pt({iv.lo}), g(iv.lo), iv.lo_closed});
  if (std::isfinite(iv.hi)) out.push_back({pt({iv.hi}), g(iv.hi), iv.hi_closed});
}

}  // namespace

std::string regularity_name(const Regularity& r) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Lipschitz>) return "lipschitz";
        if constexpr (std::is_same_v<T, LipschitzLocal>) return "lipschitz_local";
        if constexpr (std::is_same_v<T, Uniform>) return "uniform";
        return "continuous_only";
      },
      r);
}

std::string to_string(ValueMode m) { return m == ValueMode::sup ? "sup" : "inf"; }

double ObjectiveFn::operator()(const Point& x) const {
  const double v = eval(x);
  if (!std::isfinite(v)) throw InconsistencyError("objective '" + name + "' returned a non-finite value");
  return v;
}

ObjectiveFn negate(const ObjectiveFn& f) {
  ObjectiveFn g;
  g.name = "-" + f.name;
  g.eval = [e = f.eval](const Point& x) { return -e(x); };
  g.regularity = f.regularity;
  if (f.extremum) {
    g.extremum = [h = f.extremum](const SetModel& a, ValueMode m) -> std::optional<OptValue> {
      auto v = h(a, m == ValueMode::sup ? ValueMode::inf : ValueMode::sup);
      if (v) v->value = -v->value;
      return v;
    };
  }
  g.local_delta = f.local_delta;
  return g;
}

ObjectiveFn with_regularity(ObjectiveFn f, Regularity r) {
  f.regularity = std::move(r);
  return f;
}

ObjectiveFn piecewise_linear(std::vector<double> xs, std::vector<double> ys, std::string name) {
  if (xs.empty() || xs.size() != ys.size()) throw InputError("piecewise_linear: need matching nonempty breakpoints");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (!(xs[i] < xs[i + 1])) throw InputError("piecewise_linear: breakpoints must increase");
  double lambda = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    lambda = std::max(lambda, std::abs((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])));

  auto g = [xs, ys](double t) {
    if (t <= xs.front()) return ys.front();
    if (t >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin());
    if (xs[i - 1] == t) return ys[i - 1];
    const double w = (t - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
  };

  ObjectiveFn f;
  f.name = std::move(name);
  f.eval = [g](const Point& x) {
    if (x.size() != 1) throw InputError("piecewise_linear: expects points on the line");
    return g(x[0]);
  };
  f.regularity = Lipschitz{lambda};
  f.extremum = [g, xs, ys](const SetModel& a, ValueMode m) -> std::optional<OptValue> {
    const auto* u = a.get<IntervalUnion>();
    if (!u) return std::nullopt;
    std::vector<Candidate> cands;
    for (const auto& iv : u->pieces) {
      interval_candidates(iv, xs, g, cands);
      // constant tails: any point of the piece beyond the breakpoints
      if (iv.lo < xs.front()) {
        const double t = std::isfinite(iv.lo) ? iv.lo : std::min(xs.front(), iv.hi) - 1.0;
        if (iv.contains(t)) cands.push_back({pt({t}), ys.front(), true});
      }
      if (iv.hi > xs.back()) {
        const double t = std::isfinite(iv.hi) ? iv.hi : std::max(xs.back(), iv.lo) + 1.0;
        if (iv.contains(t)) cands.push_back({pt({t}), ys.back(), true});
      }
    }
    return pick(cands, m);
  };
  return f;
}

ObjectiveFn linear_objective(Eigen::VectorXd c, double c0) {
  ObjectiveFn f;
  f.name = "linear";
  f.eval = [c, c0](const Point& x) {
    if (x.size() != c.size()) throw InputError("linear_objective: dimension mismatch");
    return c.dot(x) + c0;
  };
  f.regularity = Lipschitz{c.norm()};
  f.extremum = [c, c0](const SetModel& a, ValueMode m) -> std::optional<OptValue> {
    if (a.dim() != c.size()) throw InputError("linear_objective: dimension mismatch");
    const double sign = m == ValueMode::sup ? 1.0 : -1.0;
    if (const auto* u = a.get<IntervalUnion>()) {
      std::vector<Candidate> cands;
      for (const auto& iv : u->pieces) {
        if ((sign * c[0] > 0 && iv.hi == kInf) || (sign * c[0] < 0 && iv.lo == -kInf))
          return OptValue{sign * kInf, std::nullopt, EvalMode::exact};
        interval_candidates(iv, {}, [&](double t) { return c[0] * t + c0; }, cands);
        if (c[0] == 0.0) cands.push_back({a.witness(), c0, true});
      }
      return pick(cands, m);
    }
    if (const auto* s = a.get<AffineSlab>()) {
      Eigen::VectorXd z(s->kernel.cols());
      for (Eigen::Index j = 0; j < z.size(); ++j) {
        const double slope = c.dot(s->kernel.col(j));
        z[j] = sign * slope >= 0 ? s->hi[j] : s->lo[j];
      }
      const Point x = z.size() > 0 ? Point(s->particular + s->kernel * z) : s->particular;
      return OptValue{c.dot(x) + c0, x, EvalMode::exact};
    }
    if (const auto* im = a.get<ImplicitSampled>(); im && !im->vertices.empty()) {
      std::vector<Candidate> cands;
      for (const auto& v : im->vertices) cands.push_back({v, c.dot(v) + c0, true});
      return pick(cands, m);
    }
    if (const auto* im = a.get<ImplicitSampled>(); im && im->ball) {
      const double n = c.norm();
      const Point x = n > 0 ? Point(im->ball->center + sign * im->ball->radius * c / n) : im->ball->center;
      return OptValue{c.dot(x) + c0, x, EvalMode::exact};
    }
    if (const auto* s = a.get<AxisSegments>()) {
      std::vector<Candidate> cands;
      for (const auto& g : s->segments) {
        Point lo = Point::Zero(s->dim), hi = Point::Zero(s->dim);
        lo[g.axis] = g.lo;
        hi[g.axis] = g.hi;
        cands.push_back({lo, c.dot(lo) + c0, true});
        cands.push_back({hi, c.dot(hi) + c0, g.hi_closed});
      }
      return pick(cands, m);
    }
    return std::nullopt;
  };
  return f;
}

ObjectiveFn distance_objective(Point center) {
  ObjectiveFn f;
  f.name = "distance";
  f.eval = [center](const Point& x) {
    if (x.size() != center.size()) throw InputError("distance_objective: dimension mismatch");
    return (x - center).norm();
  };
  f.regularity = Lipschitz{1.0};
  f.extremum = [center](const SetModel& a, ValueMode m) -> std::optional<OptValue> {
    if (a.dim() != center.size()) throw InputError("distance_objective: dimension mismatch");
    if (const auto* u = a.get<IntervalUnion>()) {
      const double c = center[0];
      if (m == ValueMode::sup) {
        if (u->pieces.front().lo == -kInf || u->pieces.back().hi == kInf)
          return OptValue{ExtendedReal::pos_inf(), std::nullopt, EvalMode::exact};
        std::vector<Candidate> cands;
        for (const auto& iv : u->pieces) interval_candidates(iv, {}, [c](double t) { return std::abs(t - c); }, cands);
        return pick(cands, m);
      }
      std::vector<Candidate> cands;
      for (const auto& iv : u->pieces) {
        if (iv.contains(c)) return OptValue{0.0, pt({c}), EvalMode::exact};
        interval_candidates(iv, {}, [c](double t) { return std::abs(t - c); }, cands);
      }
      return pick(cands, m);
    }
    if (const auto* s = a.get<AffineSlab>()) {
      if (m == ValueMode::inf) {
        const Point y = center - s->particular;
        Eigen::VectorXd z = s->kernel.transpose() * y;
        z = z.cwiseMax(s->lo).cwiseMin(s->hi);
        const Point x = z.size() > 0 ? Point(s->particular + s->kernel * z) : s->particular;
        return OptValue{(x - center).norm(), x, EvalMode::exact};
      }
      if (s->kernel.cols() > 16) return std::nullopt;
      std::vector<Candidate> cands;
      for (auto& corner : slab_corners(*s)) cands.push_back({corner, (corner - center).norm(), true});
      return pick(cands, m);
    }
    if (const auto* im = a.get<ImplicitSampled>(); im && im->ball) {
      const Point off = center - im->ball->center;
      const double r = im->ball->radius, n = off.norm();
      Point dir = n > 0 ? Point(off / n) : Point(Point::Unit(center.size(), 0));
      if (m == ValueMode::sup) return OptValue{n + r, Point(im->ball->center - r * dir), EvalMode::exact};
      if (n <= r) return OptValue{0.0, center, EvalMode::exact};
      return OptValue{n - r, Point(im->ball->center + r * dir), EvalMode::exact};
    }
    if (const auto* im = a.get<ImplicitSampled>(); im && im->convex && !im->vertices.empty()) {
      if (m == ValueMode::inf && im->distance_to) {
        const double v = im->distance_to(center);
        return OptValue{v, v == 0.0 ? std::optional<Point>(center) : std::nullopt, EvalMode::exact};
      }
      if (m == ValueMode::sup) {
        std::vector<Candidate> cands;
        for (const auto& v : im->vertices) cands.push_back({v, (v - center).norm(), true});
        return pick(cands, m);
      }
    }
    return std::nullopt;
  };
  return f;
}

ObjectiveFn constant_objective(double c) {
  ObjectiveFn f;
  f.name = "constant";
  f.eval = [c](const Point&) { return c; };
  f.regularity = Lipschitz{0.0};
  f.extremum = [c](const SetModel& a, ValueMode) -> std::optional<OptValue> {
    return OptValue{c, a.witness(), EvalMode::exact};
  };
  return f;
}

ObjectiveFn quadratic_objective(Eigen::MatrixXd q, Eigen::VectorXd c, double c0) {
  if (q.rows() != q.cols() || q.rows() != c.size()) throw InputError("quadratic_objective: shape mismatch");
  q = 0.5 * (q + q.transpose()).eval();
  ObjectiveFn f;
  f.name = "quadratic";
  f.eval = [q, c, c0](const Point& x) {
    if (x.size() != c.size()) throw InputError("quadratic_objective: dimension mismatch");
    return x.dot(q * x) + c.dot(x) + c0;
  };
  const double qn = q.operatorNorm();
  f.regularity = LipschitzLocal{[qn, c](const Box& b) {
    const double r = b.lo.cwiseAbs().cwiseMax(b.hi.cwiseAbs()).norm();
    return 2.0 * qn * r + c.norm();
  }};
  f.extremum = [q, c, c0](const SetModel& a, ValueMode m) -> std::optional<OptValue> {
    const auto* s = a.get<AffineSlab>();
    if (!s || s->kernel.cols() > 1) return std::nullopt;
    auto at = [&](double z) {
      const Point x = s->kernel.cols() ? Point(s->particular + s->kernel.col(0) * z) : s->particular;
      return Candidate{x, x.dot(q * x) + c.dot(x) + c0, true};
    };
    if (s->kernel.cols() == 0) return pick({at(0.0)}, m);
    // g(z) = a2 z^2 + a1 z + a0 along the segment
    const Point dir = s->kernel.col(0);
    const double a2 = dir.dot(q * dir);
    const double a1 = 2.0 * dir.dot(q * s->particular) + c.dot(dir);
    std::vector<Candidate> cands{at(s->lo[0]), at(s->hi[0])};
    if (a2 != 0.0) {
      const double z = -a1 / (2.0 * a2);
      if (z > s->lo[0] && z < s->hi[0]) cands.push_back(at(z));
    }
    return pick(cands, m);
  };
  return f;
}

OptValue sup_over(const ObjectiveFn& f, const SetModel& a, const OptOptions& opt) {
  return extreme_over(f, a, ValueMode::sup, opt);
}

OptValue inf_over(const ObjectiveFn& f, const SetModel& a, const OptOptions& opt) {
  return extreme_over(f, a, ValueMode::inf, opt);
}

OptValue sup_over(const ObjectiveFn& f, std::span<const Point> pts) {
  return extreme_over_points(f, pts, ValueMode::sup);
}

OptValue inf_over(const ObjectiveFn& f, std::span<const Point> pts) {
  return extreme_over_points(f, pts, ValueMode::inf);
}

StabilityReport check_finite_stability(const ObjectiveFn& f, const PseudoDistance& d,
                                       std::span<const std::pair<SetModel, SetModel>> pairs, double eps,
                                       const StabilityOptions& opt) {
  if (!(eps > 0.0)) throw InputError("check_finite_stability: eps must be positive");
  const bool continuous_only = std::holds_alternative<ContinuousOnly>(f.regularity);
  if (continuous_only && !opt.diagnostic)
    throw HypothesisError("check_finite_stability: objective '" + f.name +
                          "' is only continuous; uniform continuity or a Lipschitz bound is required");

  StabilityReport rep;
  rep.regularity = continuous_only ? "continuous_only (diagnostic)" : regularity_name(f.regularity);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [a, b] = pairs[i];
    StabilityRow row;
    row.pair_id = i;
    const auto dh = hausdorff(d, a, b, opt.distance);
    row.d_h = dh.value;
    row.d_h_mode = dh.mode;
    row.sup_a = sup_over(f, a, opt.opt).value;
    row.sup_b = sup_over(f, b, opt.opt).value;
    row.inf_a = inf_over(f, a, opt.opt).value;
    row.inf_b = inf_over(f, b, opt.opt).value;
    if (!continuous_only && (!row.sup_a.is_finite() || !row.inf_a.is_finite()))
      throw HypothesisError("check_finite_stability: pair " + std::to_string(i) +
                            " has a set outside the domain of SUP_f or INF_f");
    const double diff = std::max(abs_diff(row.sup_a, row.sup_b), abs_diff(row.inf_a, row.inf_b));

    if (continuous_only) {
      row.delta_used = eps;
      row.bound = eps;
      row.slack = ExtendedReal(eps) - ExtendedReal(diff);
      row.verdict = (row.d_h < ExtendedReal(eps) && diff >= eps) ? "jump" : "ok";
    } else if (const auto* u = std::get_if<Uniform>(&f.regularity)) {
      const double delta = u->delta(eps / 2.0);
      row.delta_used = delta;
      row.bound = eps;
      row.slack = ExtendedReal(eps) - ExtendedReal(diff);
      if (row.d_h < ExtendedReal(delta))
        row.verdict = diff < eps ? "pass" : "fail";
      else
        row.verdict = "vacuous";
    } else {
      const double lambda = *lipschitz_constant(f, a, b);
      if (row.d_h.is_neg_inf() && lambda > 0.0)
        throw InconsistencyError("check_finite_stability: D_H = -inf is impossible for a Lipschitz objective");
      row.delta_used = lambda > 0.0 ? ExtendedReal(eps / lambda) : ExtendedReal::pos_inf();
      row.bound = lambda * row.d_h;
      row.slack = row.bound + ExtendedReal(opt.tol) - ExtendedReal(diff);
      row.verdict = row.slack >= ExtendedReal(0.0) ? "pass" : "fail";
    }
    if (row.verdict == "fail" || row.verdict == "jump") rep.all_pass = false;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

EscapeReport check_infinite_escape(const ObjectiveFn& f, const PseudoDistance& d, const SetModel& a, double mu,
                                   std::span<const SetModel> candidates,
                                   const std::optional<UnboundednessCertificate>& cert, double eps, ValueMode mode,
                                   const DistanceOptions& dopt) {
  if (!cert || !cert->witness)
    throw HypothesisError("check_infinite_escape: no closed-form unboundedness certificate supplied");
  if (!(eps > 0.0)) throw InputError("check_infinite_escape: eps must be positive");
  const ObjectiveFn g = mode == ValueMode::sup ? f : negate(f);
  const double target = mode == ValueMode::sup ? mu : -mu;

  EscapeReport rep;
  bool found = false;
  for (std::size_t n = 0; n < cert->max_steps && !found; ++n) {
    Point x = cert->witness(n);
    if (!a.contains(x)) throw CertificateError("check_infinite_escape: certificate point outside A");
    if (g(x) > target + eps) {
      rep.witness = std::move(x);
      found = true;
    }
  }
  if (!found) throw CertificateError("check_infinite_escape: certificate never exceeded mu + eps");
  rep.witness_value = f(rep.witness);

  if (g.local_delta) {
    rep.delta = g.local_delta(rep.witness, eps);
  } else if (const auto* l = std::get_if<Lipschitz>(&g.regularity)) {
    rep.delta = l->lambda > 0.0 ? eps / l->lambda : kInf;
  } else if (const auto* u = std::get_if<Uniform>(&g.regularity)) {
    rep.delta = u->delta(eps);
  } else {
    throw HypothesisError("check_infinite_escape: no continuity modulus available at the witness");
  }

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    EscapeRow row;
    row.candidate = i;
    row.d_asy = asym_hausdorff(d, a, candidates[i], dopt).value;
    const auto v = sup_over(g, candidates[i]).value;
    row.value = mode == ValueMode::sup ? v : -v;
    if (row.d_asy < ExtendedReal(rep.delta)) {
      row.verdict = v > ExtendedReal(target) ? "pass" : "fail";
      if (row.verdict == "fail") rep.all_pass = false;
    } else {
      row.verdict = "not_applicable";
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

bool domain_transfer_check(const ObjectiveFn& f, const PseudoDistance& d, const SetModel& a, double delta,
                           const SetModel& b, double eps, const DistanceOptions& dopt) {
  if (!(eps > 0.0) || !(delta > 0.0)) throw InputError("domain_transfer_check: eps and delta must be positive");
  double allowed = 0.0;
  if (auto lambda = lipschitz_constant(f, a, b)) {
    allowed = *lambda > 0.0 ? eps / *lambda : kInf;
  } else if (const auto* u = std::get_if<Uniform>(&f.regularity)) {
    allowed = u->delta(eps);
  } else {
    throw HypothesisError("domain_transfer_check: objective has no modulus of uniform continuity");
  }
  if (delta > allowed * (1.0 + 1e-12))
    throw HypothesisError("domain_transfer_check: delta is larger than the modulus allows for eps");
  const auto sup_a = sup_over(f, a).value;
  if (!sup_a.is_finite()) throw HypothesisError("domain_transfer_check: A is outside the domain of SUP_f");
  if (!(hausdorff(d, a, b, dopt).value < ExtendedReal(delta)))
    throw HypothesisError("domain_transfer_check: D_H(A, A') is not below delta");
  const auto sup_b = sup_over(f, b).value;
  return sup_b <= sup_a + ExtendedReal(eps) && sup_b > ExtendedReal::neg_inf();
}

MinimizerDemo minimizer_set_instability_demo(double eps) {
  if (!(eps > 0.0) || eps >= std::numbers::pi) throw InputError("minimizer demo: eps must lie in (0, pi)");
  const double pi = std::numbers::pi;
  // |sin| vanishes exactly at integer multiples of pi
  auto zeros_in = [pi](double lo, double hi) {
    std::vector<double> out;
    for (long k = static_cast<long>(std::ceil(lo / pi)); k * pi <= hi; ++k) out.push_back(k == 0 ? 0.0 : k * pi);
    return out;
  };
  MinimizerDemo demo;
  demo.eps = eps;
  demo.argmin_a = zeros_in(0.0, pi);
  demo.argmin_shifted = zeros_in(-eps, pi - eps);

  auto as_cloud = [](const std::vector<double>& xs) {
    std::vector<Point> pts;
    for (double x : xs) pts.push_back(pt({x}));
    return cloud(std::move(pts));
  };
  const auto d = absolute_distance();
  const auto za = as_cloud(demo.argmin_a), zb = as_cloud(demo.argmin_shifted);
  demo.hausdorff_argmin = hausdorff(d, za, zb).value;
  demo.asym_argmin = asym_hausdorff(d, zb, za).value;
  demo.hausdorff_sets = hausdorff(d, interval_union({{-eps, pi - eps}}), interval_union({{0.0, pi}})).value;
  return demo;
}

}  // namespace optstab
