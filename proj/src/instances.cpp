#include "optstab/instances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "optstab/errors.hpp"
#include "optstab/linear.hpp"

namespace optstab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

int param_int(const InstanceParams& p, const std::string& key, int fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  if (it->second != std::floor(it->second)) throw InputError("instance parameter '" + key + "' must be an integer");
  return static_cast<int>(it->second);
}

double param_real(const InstanceParams& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void check_ce33(int k_max, int j) {
  if (k_max < 2) throw InputError("ce33: K must be at least 2");
  if (j < 2 || j > k_max) throw InputError("ce33: j must lie in 2..K");
}

void check_ce34(int k_max, int j) {
  if (k_max < 1) throw InputError("ce34: K must be at least 1");
  if (j < 1 || j > k_max) throw InputError("ce34: j must lie in 1..K");
}

Golden golden(std::string quantity, ExtendedReal expected, ExtendedReal computed, double tol = 0.0) {
  bool pass;
  if (expected.is_finite() && computed.is_finite())
    pass = std::abs(expected.value() - computed.value()) <= tol;
  else
    pass = expected == computed;
  return {std::move(quantity), expected, computed, tol, pass};
}

// Extremum of sin(2 pi / (c - t)) for t in [a, b] (b open when !b_closed,
// b = c meaning the argument is unbounded).
struct SinePiece {
  double value;
  double t;
  bool attained;
};

SinePiece sine_extremum(int k, double a, double b, bool b_closed, ValueMode m) {
  const double c = 1.0 + 1.0 / k;
  const double theta_a = 2.0 * kPi / (c - a);
  const bool unbounded = b >= c;
  const double theta_b = unbounded ? kInf : 2.0 * kPi / (c - b);
  const double target = m == ValueMode::sup ? kPi / 2.0 : 3.0 * kPi / 2.0;
  const double ell = std::ceil((theta_a - target) / (2.0 * kPi));
  const double theta = target + 2.0 * kPi * ell;
  if (theta < theta_b || (theta == theta_b && b_closed))
    return {m == ValueMode::sup ? 1.0 : -1.0, c - 2.0 * kPi / theta, true};
  const double va = std::sin(theta_a), vb = std::sin(theta_b);
  const bool pick_a = m == ValueMode::sup ? va >= vb : va <= vb;
  return pick_a ? SinePiece{va, a, true} : SinePiece{vb, b, b_closed};
}

}  // namespace

std::vector<double> ce33_breakpoints(int k) {
  const double base = 2.0 * k + 1.0;
  return {base, base + 1.0 / (2.0 * k), base + 1.0 / k, 2.0 * k + 2.0};
}

ObjectiveFn ce33_objective(int k_max) {
  check_ce33(k_max, 2);
  std::vector<double> xs, ys;
  for (int k = 2; k <= k_max; ++k) {
    const auto b = ce33_breakpoints(k);
    xs.insert(xs.end(), b.begin(), b.end());
    ys.insert(ys.end(), {0.0, -1.0, 1.0, 0.0});
  }
  auto f = piecewise_linear(std::move(xs), std::move(ys), "ce33");
  f.regularity = ContinuousOnly{};
  return f;
}

SetModel ce33_set(int k_max) {
  check_ce33(k_max, 2);
  std::vector<Interval> pieces;
  for (int k = 2; k <= k_max; ++k) pieces.push_back({2.0 * k, 2.0 * k + 1.0});
  return interval_union(std::move(pieces));
}

SetModel ce33_perturbed(int k_max, int j) {
  check_ce33(k_max, j);
  std::vector<Interval> pieces;
  for (int k = 2; k <= k_max; ++k) pieces.push_back({2.0 * k, k == j ? ce33_breakpoints(k)[2] : 2.0 * k + 1.0});
  return interval_union(std::move(pieces));
}

ParamFamily ce33_family(int k_max) {
  check_ce33(k_max, 2);
  ParamFamily f{.d_i = absolute_distance(),
                .member =
                    [k_max](const Param& t) {
                      if (t.size() != 1 || t[0] < 0.0) throw InputError("ce33 family: parameter must be t >= 0");
                      if (t[0] == 0.0) return ce33_set(k_max);
                      const int j = std::clamp(static_cast<int>(std::lround(1.0 / t[0])), 2, k_max);
                      return ce33_perturbed(k_max, j);
                    },
                .d_x = absolute_distance()};
  return f;
}

double ce34_piece(int k, double t) {
  const double c = 1.0 + 1.0 / k;
  if (t < 0.0 || t >= c) throw InputError("ce34: coordinate outside [0, 1 + 1/k)");
  if (t <= 1.0) return 0.0;
  return std::sin(2.0 * kPi / (c - t));
}

ObjectiveFn ce34_objective(int k_max) {
  check_ce34(k_max, 1);
  ObjectiveFn f;
  f.name = "ce34";
  f.eval = [k_max](const Point& x) {
    if (x.size() != k_max) throw InputError("ce34: dimension mismatch");
    Eigen::Index axis = -1;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) continue;
      if (axis >= 0) throw InputError("ce34: point has two nonzero coordinates");
      axis = i;
    }
    return axis < 0 ? 0.0 : ce34_piece(static_cast<int>(axis) + 1, x[axis]);
  };
  f.regularity = ContinuousOnly{};
  f.extremum = [k_max](const SetModel& a, ValueMode m) -> std::optional<OptValue> {
    const auto* s = a.get<AxisSegments>();
    if (!s) return std::nullopt;
    if (s->dim != k_max) throw InputError("ce34: dimension mismatch");
    std::optional<OptValue> best;
    auto offer = [&](double value, Eigen::Index axis, double t, bool attained) {
      const bool better = !best || (m == ValueMode::sup ? ExtendedReal(value) > best->value
                                                         : ExtendedReal(value) < best->value) ||
                          (ExtendedReal(value) == best->value && attained && !best->witness);
      if (!better) return;
      std::optional<Point> w;
      if (attained) {
        w = Point::Zero(k_max);
        (*w)[axis] = t;
      }
      best = OptValue{value, w, EvalMode::exact};
    };
    for (const auto& g : s->segments) {
      const int k = static_cast<int>(g.axis) + 1;
      const double c = 1.0 + 1.0 / k;
      if (g.hi > c || (g.hi == c && g.hi_closed)) throw InputError("ce34: segment leaves the domain of f");
      if (g.lo <= 1.0) offer(0.0, g.axis, g.lo, true);
      if (g.hi > 1.0) {
        const auto p = sine_extremum(k, std::max(g.lo, 1.0), g.hi, g.hi_closed, m);
        offer(p.value, g.axis, p.t, p.attained);
      }
    }
    return best;
  };
  return f;
}

SetModel ce34_set(int k_max) {
  check_ce34(k_max, 1);
  AxisSegments s{k_max, {}};
  for (int k = 1; k <= k_max; ++k) s.segments.push_back({k - 1, 0.0, 1.0, true});
  return s;
}

SetModel ce34_perturbed(int k_max, int j) {
  check_ce34(k_max, j);
  AxisSegments s{k_max, {}};
  for (int k = 1; k <= k_max; ++k) {
    if (k == j)
      s.segments.push_back({k - 1, 0.0, 1.0 + 1.0 / k, false});
    else
      s.segments.push_back({k - 1, 0.0, 1.0, true});
  }
  return s;
}

ObjectiveFn gauge_step_objective() {
  ObjectiveFn f;
  f.name = "gauge_step";
  f.eval = [](const Point& x) {
    if (x.size() != 2) throw InputError("gauge_step: expects points in the plane");
    return x[1] >= 0.0 ? 1.0 : 0.0;
  };
  // A finite gauge distance forces equal second coordinates.
  f.regularity = Uniform{[](double) { return 1.0; }, [](double r) { return std::isfinite(r) ? 0.0 : 1.0; }};
  return f;
}

bool InstanceCatalogEntry::self_test() const {
  return std::all_of(goldens.begin(), goldens.end(), [](const Golden& g) { return g.pass; });
}

const SetModel& InstanceCatalogEntry::set(const std::string& label) const {
  for (const auto& [name_, s] : sets)
    if (name_ == label) return s;
  throw CatalogError("instance '" + name + "' has no set '" + label + "'");
}

namespace {

InstanceCatalogEntry build_ce33(const InstanceParams& p) {
  const int k_max = param_int(p, "K", 60), j = param_int(p, "j", 10);
  check_ce33(k_max, j);
  InstanceCatalogEntry e;
  e.name = "ce33";
  e.description = "f piecewise linear on the line, A = union of [2k, 2k+1], A_j widens block j by 1/j";
  e.distance = absolute_distance();
  e.objective = ce33_objective(k_max);
  e.sets = {{"A", ce33_set(k_max)}, {"A_j", ce33_perturbed(k_max, j)}};
  e.family = ce33_family(k_max);
  const auto& f = *e.objective;
  const auto& a = e.set("A");
  const auto& aj = e.set("A_j");
  e.goldens = {
      golden("INF_f(A_j)", -1.0, inf_over(f, aj).value),
      golden("SUP_f(A_j)", 1.0, sup_over(f, aj).value),
      golden("INF_f(A)", 0.0, inf_over(f, a).value),
      golden("SUP_f(A)", 0.0, sup_over(f, a).value),
      golden("D_H(A,A_j)", 1.0 / j, hausdorff(*e.distance, a, aj).value, 1e-12),
  };
  return e;
}

InstanceCatalogEntry build_ce34(const InstanceParams& p) {
  const int k_max = param_int(p, "K", 60), j = param_int(p, "j", 7);
  check_ce34(k_max, j);
  InstanceCatalogEntry e;
  e.name = "ce34";
  e.description = "axis segments [0, e_k] in R^K; A_j extends axis j to the half-open [0, (1+1/j) e_j)";
  e.distance = euclidean_distance(k_max);
  e.objective = ce34_objective(k_max);
  e.sets = {{"A", ce34_set(k_max)}, {"A_j", ce34_perturbed(k_max, j)}};
  const auto& f = *e.objective;
  const auto& a = e.set("A");
  const auto& aj = e.set("A_j");
  e.goldens = {
      golden("INF_f(A_j)", -1.0, inf_over(f, aj).value),
      golden("SUP_f(A_j)", 1.0, sup_over(f, aj).value),
      golden("INF_f(A)", 0.0, inf_over(f, a).value),
      golden("SUP_f(A)", 0.0, sup_over(f, a).value),
      golden("D_H(A,A_j)", 1.0 / j, hausdorff(*e.distance, a, aj).value, 1e-12),
  };
  return e;
}

InstanceCatalogEntry build_minset(const InstanceParams& p) {
  const double eps = param_real(p, "eps", 0.1);
  if (!(eps > 0.0 && eps < kPi / 2)) throw InputError("minset_sin: eps must lie in (0, pi/2)");
  InstanceCatalogEntry e;
  e.name = "minset_sin";
  e.description = "f(t) = |sin t| on [-20, 20], A = [0, pi], A' = [-eps, pi - eps]";
  e.distance = absolute_distance();
  ObjectiveFn f;
  f.name = "abs_sin";
  f.eval = [](const Point& x) { return std::abs(std::sin(x[0])); };
  f.regularity = Lipschitz{1.0};
  e.objective = f;
  e.sets = {{"A", interval_union({{0.0, kPi}})}, {"A_eps", interval_union({{-eps, kPi - eps}})}};
  const auto demo = minimizer_set_instability_demo(eps);
  e.goldens = {
      golden("D_H(argmin A', argmin A)", kPi, demo.hausdorff_argmin, 1e-12),
      golden("D_asyH(argmin A', argmin A)", 0.0, demo.asym_argmin),
      golden("D_H(A', A)", eps, demo.hausdorff_sets, 1e-12),
      golden("#argmin A", 2.0, static_cast<double>(demo.argmin_a.size())),
      golden("#argmin A'", 1.0, static_cast<double>(demo.argmin_shifted.size())),
  };
  return e;
}

InstanceCatalogEntry build_gauge_segment(const InstanceParams&) {
  InstanceCatalogEntry e;
  e.name = "gauge_segment";
  e.description = "C = [-2, 1] x {0}; M_C(x) = x1 on the positive axis, -x1/2 on the negative axis, +inf off it";
  e.gauge = segment_gauge_set();
  const auto m = e.gauge->as_magnitude();
  e.distance = magnitude_distance("segment_gauge", m, 2);
  e.objective = gauge_step_objective();
  e.goldens = {
      golden("M_C(3,0)", 3.0, e.gauge->gauge(pt({3, 0}))),
      golden("M_C(-4,0)", 2.0, e.gauge->gauge(pt({-4, 0}))),
      golden("M_C(1,1)", ExtendedReal::pos_inf(), e.gauge->gauge(pt({1, 1}))),
      golden("conj M_C(3,0)", 1.5, conjugate_gauge(m, pt({3, 0}))),
      golden("M_C(0,0)", 0.0, e.gauge->gauge(pt({0, 0}))),
  };
  return e;
}

InstanceCatalogEntry build_affine_whole(const InstanceParams&) {
  InstanceCatalogEntry e;
  e.name = "affine_whole";
  e.description = "A_t = {x in R^2 : x1 = t}, f = ||x||, phi_*(t) = |t|";
  Eigen::MatrixXd l(1, 2);
  l << 1, 0;
  const auto lm = decompose(l);
  const AffineFamily fam(lm, pseudo_inverse(lm));
  e.distance = euclidean_distance(2);
  e.objective = distance_objective(Point::Zero(2));
  e.family = fam.as_family(absolute_distance());
  const ValueFunction v{ValueMode::inf, *e.family, *e.objective};
  auto phi = [&](double t) { return eval_value_function(v, pt({t})).value; };
  e.sets = {{"A_0", e.family->member(pt({0.0}))}, {"A_1", e.family->member(pt({1.0}))}};
  const auto egi = restricted_inverse_egi(lm, euclidean_gauge(), euclidean_gauge());
  e.goldens = {
      golden("phi_*(-2)", 2.0, phi(-2.0), 1e-12),
      golden("phi_*(0.5)", 0.5, phi(0.5), 1e-12),
      golden("phi_*(3)", 3.0, phi(3.0), 1e-12),
      golden("D_H(A_0,A_1)", 1.0, hausdorff(*e.distance, e.set("A_0"), e.set("A_1")).value, 1e-9),
      golden("EGI constant", 1.0, egi.cert.constant, 1e-12),
  };
  return e;
}

InstanceCatalogEntry build_mixed_box(const InstanceParams&) {
  InstanceCatalogEntry e;
  e.name = "mixed_box";
  e.description = "A_t = {x in [-1,1]^2 : x1 = t}, f = x2^2 + x1, phi_*(t) = t on (-1, 1)";
  Eigen::MatrixXd l(1, 2);
  l << 1, 0;
  HalfspaceBody box;
  box.normals.resize(4, 2);
  box.normals << 1, 0, -1, 0, 0, 1, 0, -1;
  box.offsets = Eigen::Vector4d::Ones();
  const auto lm = decompose(l);
  e.distance = euclidean_distance(2);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2, 2);
  q(1, 1) = 1.0;
  e.objective = quadratic_objective(q, pt({1.0, 0.0}));
  e.family = ParamFamily{.d_i = absolute_distance(),
                         .member =
                             [lm, box](const Param& t) -> SetModel {
                               auto s = interior_slice(lm, box, t);
                               if (!s) throw InputError("mixed_box: parameter outside the open interval (-1, 1)");
                               return *s;
                             },
                         .admissible = AdmissibleClass::nonempty_bounded,
                         .global_rate = 1.0};
  const ValueFunction v{ValueMode::inf, *e.family, *e.objective};
  auto phi = [&](double t) { return eval_value_function(v, pt({t})).value; };
  e.sets = {{"A_0", e.family->member(pt({0.0}))}, {"A_0.5", e.family->member(pt({0.5}))}};
  e.goldens = {
      golden("phi_*(-0.5)", -0.5, phi(-0.5), 1e-12),
      golden("phi_*(0)", 0.0, phi(0.0), 1e-12),
      golden("phi_*(0.5)", 0.5, phi(0.5), 1e-12),
      golden("D_H(A_0,A_0.5)", 0.5, hausdorff(*e.distance, e.set("A_0"), e.set("A_0.5")).value, 1e-12),
  };
  return e;
}

InstanceCatalogEntry build_disk_polygon(const InstanceParams& p) {
  const int m = param_int(p, "m", 6);
  InstanceCatalogEntry e;
  e.name = "disk_polygon";
  e.description = "unit disk against inscribed regular m-gons, f(x) = ||(2,0) - x||";
  e.distance = euclidean_distance(2);
  e.objective = distance_objective(pt({2.0, 0.0}));
  e.sets = {{"A", disk(Point::Zero(2), 1.0)}, {"A_m", regular_polygon(m)}};
  std::vector<int> ms;
  for (int k = 3; k <= 256; ++k) ms.push_back(k);
  SchemeInstance s{.name = "disk", .f = *e.objective, .levels = build_inner_polygon_family(ms), .inner = true};
  const auto cert = run_scheme(s);
  e.goldens = {
      golden("INF_f(A)", 1.0, inf_over(*e.objective, e.set("A")).value),
      golden("INF_f(A_m)", 2.0 - std::cos(kPi / m), inf_over(*e.objective, e.set("A_m")).value, 1e-12),
      golden("h_m", 1.0 - std::cos(kPi / m), polygon_sagitta(m), 0.0),
      golden("bracket width m=256", 1.0 - std::cos(kPi / 256), cert.hi - cert.lo, 1e-12),
      golden("1 in bracket", 1.0, (cert.lo <= 1.0 && 1.0 <= cert.hi) ? 1.0 : 0.0),
  };
  return e;
}

InstanceCatalogEntry build_quartic_ladder(const InstanceParams&) {
  InstanceCatalogEntry e;
  e.name = "quartic_ladder";
  e.description = "f(x) = x^4 / 12 on the line, y0 = 0; the ladder radius for lambda is sqrt(lambda)";
  e.smooth = quartic_problem();
  LadderSolver solver(*e.smooth);
  e.goldens = {
      golden("phi(0)", 0.0, solver.hessian_sup(0.0).value),
      golden("t(1)", 1.0, solver.solve_radius(1.0), 1e-6),
      golden("t(4)", 2.0, solver.solve_radius(4.0), 1e-6),
      golden("t(10)", std::sqrt(10.0), solver.solve_radius(10.0), 1e-6),
  };
  return e;
}

InstanceCatalogEntry build_energy_ladder(const InstanceParams&) {
  InstanceCatalogEntry e;
  e.name = "energy_ladder";
  e.description = "levels n = 1, 2, ... with d(x, y) = E(y) - E(x), E(n) = -13.6 / n^2";
  e.distance = energy_ladder_distance();
  e.sets = {{"{1}", cloud_1d({1})}, {"{2}", cloud_1d({2})}, {"{2,3}", cloud_1d({2, 3})}};
  const auto& d = *e.distance;
  e.goldens = {
      golden("d(1,2)", 10.2, d(pt({1}), pt({2})), 1e-12),
      golden("d(2,1)", -10.2, d(pt({2}), pt({1})), 1e-12),
      golden("d(1,{2,3})", 10.2, point_set_distance(d, pt({1}), e.set("{2,3}")).value, 1e-12),
      golden("d({2},{1})", -10.2, set_set_distance(d, e.set("{2}"), e.set("{1}")).value, 1e-12),
  };
  return e;
}

struct CatalogRow {
  const char* name;
  InstanceCatalogEntry (*build)(const InstanceParams&);
  const char* summary;
};

constexpr CatalogRow kCatalog[] = {
    {"ce33", build_ce33, "value jumps under vanishing Hausdorff perturbation on the line (params K, j)"},
    {"ce34", build_ce34, "the same jump on bounded axis segments with sine pieces (params K, j)"},
    {"minset_sin", build_minset, "minimizer sets of |sin t| move by pi while values stay close (param eps)"},
    {"gauge_segment", build_gauge_segment, "asymmetric, partly infinite gauge of the segment [-2,1] x {0}"},
    {"affine_whole", build_affine_whole, "whole-space affine family x1 = t with f = ||x||"},
    {"mixed_box", build_mixed_box, "affine family cut by the box [-1,1]^2 with f = x2^2 + x1"},
    {"disk_polygon", build_disk_polygon, "unit disk approximated by inscribed polygons (param m)"},
    {"quartic_ladder", build_quartic_ladder, "Lipschitz ladder for x^4 / 12"},
    {"energy_ladder", build_energy_ladder, "signed, asymmetric energy differences between levels"},
};

}  // namespace

InstanceCatalogEntry build(const std::string& name, const InstanceParams& params) {
  for (const auto& row : kCatalog)
    if (name == row.name) return row.build(params);
  throw CatalogError("unknown instance '" + name + "'");
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const auto& row : kCatalog) out.emplace_back(row.name);
  return out;
}

std::string describe_instance(const std::string& name) {
  for (const auto& row : kCatalog)
    if (name == row.name) return row.summary;
  throw CatalogError("unknown instance '" + name + "'");
}

}  // namespace optstab
