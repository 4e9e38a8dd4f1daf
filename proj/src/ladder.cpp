#include "optstab/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "optstab/errors.hpp"

namespace optstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<Box> region_box(const SmoothProblem& p) {
  std::optional<Box> box;
  auto meet = [&](const Box& b) {
    if (!box) box = b;
    else box = Box{box->lo.cwiseMax(b.lo), box->hi.cwiseMin(b.hi)};
  };
  if (p.u) meet(*p.u);
  if (const auto* b = std::get_if<Box>(&p.c)) meet(*b);
  if (const auto* b = std::get_if<BallDescriptor>(&p.c)) {
    const Point r = Point::Constant(p.dim, b->radius);
    meet(Box{b->center - r, b->center + r});
  }
  if (const auto* h = std::get_if<HalfspaceBody>(&p.c)) {
    const auto verts = polytope_vertices(*h);
    if (!verts.empty()) {
      Box b{verts.front(), verts.front()};
      for (const auto& v : verts) {
        b.lo = b.lo.cwiseMin(v);
        b.hi = b.hi.cwiseMax(v);
      }
      meet(b);
    }
  }
  return box;
}

}  // namespace

bool in_region(const SmoothProblem& p, const Point& x) {
  if (x.size() != p.dim) return false;
  if (p.u && !((x.array() > p.u->lo.array()).all() && (x.array() < p.u->hi.array()).all())) return false;
  return std::visit(
      [&](const auto& c) -> bool {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, std::monostate>) return true;
        if constexpr (std::is_same_v<T, Box>) return (x.array() >= c.lo.array()).all() && (x.array() <= c.hi.array()).all();
        if constexpr (std::is_same_v<T, BallDescriptor>) return (x - c.center).norm() <= c.radius;
        if constexpr (std::is_same_v<T, HalfspaceBody>) return ((c.normals * x - c.offsets).array() <= 1e-12).all();
      },
      p.c);
}

double hessian_norm_at(const SmoothProblem& p, const Point& x) {
  if (p.hessian_norm) return p.hessian_norm(x);
  if (!p.gradient) throw InputError("hessian_norm_at: problem has neither Hessian norm nor gradient");
  Eigen::MatrixXd j(p.dim, p.dim);
  for (Eigen::Index i = 0; i < p.dim; ++i) {
    const double h = 1e-5 * (1.0 + std::abs(x[i]));
    Point a = x, b = x;
    a[i] += h;
    b[i] -= h;
    j.col(i) = (p.gradient(a) - p.gradient(b)) / (2.0 * h);
  }
  const Eigen::MatrixXd sym = 0.5 * (j + j.transpose());
  return sym.operatorNorm();
}

LadderSolver::LadderSolver(SmoothProblem p, LadderOptions opt) : p_(std::move(p)), opt_(opt) {
  if (p_.y0.size() != p_.dim) throw InputError("SmoothProblem: base point dimension mismatch");
  if (!in_region(p_, p_.y0)) throw InputError("SmoothProblem: base point must lie in C and U");
  if (!p_.gradient) throw InputError("SmoothProblem: gradient required");
}

std::optional<double> LadderSolver::region_radius() const {
  const auto box = region_box(p_);
  if (!box || !box->lo.allFinite() || !box->hi.allFinite()) return std::nullopt;
  double r = 0.0;
  for (Eigen::Index mask = 0; mask < (Eigen::Index{1} << p_.dim); ++mask) {
    Point corner(p_.dim);
    for (Eigen::Index i = 0; i < p_.dim; ++i) corner[i] = (mask >> i) & 1 ? box->hi[i] : box->lo[i];
    r = std::max(r, (corner - p_.y0).norm());
  }
  return r;
}

std::vector<Point> LadderSolver::sample_region(double t, std::size_t n, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> out;
  const double d = static_cast<double>(p_.dim);
  auto direction = [&] {
    Point v(p_.dim);
    for (Eigen::Index i = 0; i < p_.dim; ++i) v[i] = gauss(rng);
    const double nv = v.norm();
    return nv > 0 ? Point(v / nv) : Point(Point::Unit(p_.dim, 0));
  };
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const Point x = p_.y0 + t * direction();
    if (in_region(p_, x)) out.push_back(x);
  }
  for (std::size_t i = half; i < n; ++i) {
    const Point x = p_.y0 + t * std::pow(unit(rng), 1.0 / d) * direction();
    if (in_region(p_, x)) out.push_back(x);
  }
  // a small C inside a large ball: draw from the region's box as well
  if (auto box = region_box(p_); box && box->lo.allFinite() && box->hi.allFinite()) {
    const Point r = Point::Constant(p_.dim, t);
    const Point lo = box->lo.cwiseMax(p_.y0 - r), hi = box->hi.cwiseMin(p_.y0 + r);
    if ((lo.array() <= hi.array()).all())
      for (std::size_t i = 0; i < n; ++i) {
        Point x(p_.dim);
        for (Eigen::Index k = 0; k < p_.dim; ++k) x[k] = lo[k] + (hi[k] - lo[k]) * unit(rng);
        if ((x - p_.y0).norm() <= t && in_region(p_, x)) out.push_back(x);
      }
  }
  return out;
}

double LadderSolver::sampled_sup(double t) {
  Point best = p_.y0;
  double best_v = hessian_norm_at(p_, best);
  for (const auto& x : sample_region(t, 2 * opt_.sup_samples, opt_.seed)) {
    const double v = hessian_norm_at(p_, x);
    if (v > best_v) {
      best_v = v;
      best = x;
    }
  }
  double step = t / 4.0;
  for (int round = 0; round < opt_.refine_rounds && step > 0.0; ++round, step /= 2.0) {
    for (Eigen::Index i = 0; i < p_.dim; ++i)
      for (double sign : {1.0, -1.0}) {
        Point x = best;
        x[i] += sign * step;
        if ((x - p_.y0).norm() > t || !in_region(p_, x)) continue;
        const double v = hessian_norm_at(p_, x);
        if (v > best_v) {
          best_v = v;
          best = x;
        }
      }
  }
  return best_v;
}

HessianSup LadderSolver::hessian_sup(double t) {
  if (!(t >= 0.0)) throw InputError("hessian_sup: radius must be nonnegative");
  if (p_.radial_sup) return {p_.radial_sup(t), EvalMode::exact};
  if (auto it = memo_.find(t); it != memo_.end()) return {it->second, EvalMode::sampled};
  double v = t == 0.0 ? hessian_norm_at(p_, p_.y0) : sampled_sup(t);
  for (auto it = memo_.begin(); it != memo_.end() && it->first < t; ++it) v = std::max(v, it->second);
  for (auto it = memo_.upper_bound(t); it != memo_.end(); ++it) it->second = std::max(it->second, v);
  memo_[t] = v;
  return {v, EvalMode::sampled};
}

double LadderSolver::solve_radius(double lambda, double t_hint) {
  const double s0 = hessian_sup(0.0).value;
  if (!(lambda > s0)) throw HypothesisError("solve_radius: lambda must exceed the Hessian norm at y0");
  if (auto r = region_radius(); r && hessian_sup(*r).value < lambda)
    throw CertificateError("solve_radius: Hessian norm stays below lambda on the bounded region");
  double lo = 0.0, hi = std::max(t_hint, 1.0);
  int expansions = 0;
  while (hessian_sup(hi).value < lambda) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 60) throw CertificateError("solve_radius: no bracket within 60 doublings");
  }
  while (hi - lo > 1e-12 * (1.0 + hi)) {
    const double mid = 0.5 * (lo + hi);
    if (hessian_sup(mid).value < lambda) lo = mid;
    else hi = mid;
  }
  const auto at = hessian_sup(hi);
  if (at.mode == EvalMode::exact && std::abs(at.value - lambda) > kLadderTolerance * std::max(1.0, lambda))
    throw InconsistencyError("solve_radius: radial supremum jumps over lambda");
  return hi;
}

LadderLevel LadderSolver::verify_level(std::size_t k, double lambda, double t, bool covers_all) {
  LadderLevel lvl;
  lvl.k = k;
  lvl.lambda = lambda;
  lvl.t = t;
  lvl.covers_all = covers_all;
  const double radius = std::isfinite(t) ? t : 1e3;
  const bool exact = static_cast<bool>(p_.radial_sup) || (covers_all && p_.hessian_bound);
  const double inflation = exact ? 1e-6 : 1e-3;
  auto pts = sample_region(radius, 2 * opt_.pairs, opt_.seed + 17 * k + 1);
  pts.push_back(p_.y0);
  lvl.points = pts.size();
  std::size_t distinct = 0;
  for (std::size_t i = 0; i + 1 < pts.size() && lvl.pairs < opt_.pairs; i += 2) {
    const double dx = (pts[i] - pts[i + 1]).norm();
    if (dx == 0.0) continue;
    ++distinct;
    ++lvl.pairs;
    const double ratio = (p_.gradient(pts[i]) - p_.gradient(pts[i + 1])).norm() / dx;
    lvl.worst_ratio = std::max(lvl.worst_ratio, ratio);
  }
  lvl.verified = distinct > 0 && lvl.worst_ratio <= lambda * (1.0 + inflation);
  return lvl;
}

LadderResult LadderSolver::build_ladder(std::span<const double> lambdas) {
  if (lambdas.empty()) throw InputError("build_ladder: empty lambda sequence");
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
    if (!(lambdas[i] < lambdas[i + 1])) throw InputError("build_ladder: lambda sequence must increase strictly");
  LadderResult res;
  res.s0 = hessian_sup(0.0).value;
  if (!(lambdas.front() > res.s0)) throw HypothesisError("build_ladder: lambda_1 must exceed the Hessian norm at y0");
  const auto radius = region_radius();
  if (p_.hessian_bound) res.s = *p_.hessian_bound;
  else if (radius) res.s = hessian_sup(*radius).value;

  double t_prev = 0.0;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (res.s && lambdas[k] >= *res.s) {
      res.levels.push_back(verify_level(k + 1, *res.s, radius ? *radius : kInf, true));
      break;
    }
    const double t = solve_radius(lambdas[k], std::max(t_prev, 1.0));
    res.levels.push_back(verify_level(k + 1, lambdas[k], t, false));
    t_prev = t;
  }
  res.mode = p_.radial_sup ? EvalMode::exact : EvalMode::sampled;
  for (const auto& l : res.levels) res.all_verified = res.all_verified && l.verified;

  const double reach = res.levels.back().t;
  const auto probes = sample_region(std::isfinite(reach) ? reach : 1e3, opt_.coverage_probes, opt_.seed + 99);
  res.coverage_probes = probes.size();
  for (const auto& x : probes) {
    const double r = (x - p_.y0).norm();
    const bool hit = std::any_of(res.levels.begin(), res.levels.end(), [&](const LadderLevel& l) {
      return l.covers_all || r <= l.t;
    });
    if (hit) ++res.coverage_hits;
  }
  return res;
}

HessianSup hessian_sup(const SmoothProblem& p, double t) { return LadderSolver(p).hessian_sup(t); }

double solve_radius(const SmoothProblem& p, double lambda, double t_hint) {
  return LadderSolver(p).solve_radius(lambda, t_hint);
}

LadderResult build_ladder(const SmoothProblem& p, std::span<const double> lambdas, const LadderOptions& opt) {
  return LadderSolver(p, opt).build_ladder(lambdas);
}

SmoothProblem quartic_problem() {
  SmoothProblem p;
  p.name = "quartic";
  p.dim = 1;
  p.f = [](const Point& x) { return std::pow(x[0], 4) / 12.0; };
  p.gradient = [](const Point& x) { return Point::Constant(1, std::pow(x[0], 3) / 3.0); };
  p.hessian_norm = [](const Point& x) { return x[0] * x[0]; };
  p.y0 = Point::Zero(1);
  p.radial_sup = [](double t) { return t * t; };
  return p;
}

SmoothProblem cosh_problem() {
  SmoothProblem p;
  p.name = "cosh";
  p.dim = 1;
  p.f = [](const Point& x) { return std::exp(x[0]) + std::exp(-x[0]); };
  p.gradient = [](const Point& x) { return Point::Constant(1, std::exp(x[0]) - std::exp(-x[0])); };
  p.hessian_norm = [](const Point& x) { return std::exp(x[0]) + std::exp(-x[0]); };
  p.y0 = Point::Zero(1);
  p.radial_sup = [](double t) { return 2.0 * std::cosh(t); };
  return p;
}

SmoothProblem quadratic_problem(double a) {
  SmoothProblem p;
  p.name = "quadratic";
  p.dim = 1;
  p.f = [a](const Point& x) { return 0.5 * a * x[0] * x[0]; };
  p.gradient = [a](const Point& x) { return Point::Constant(1, a * x[0]); };
  p.hessian_norm = [a](const Point&) { return std::abs(a); };
  p.y0 = Point::Zero(1);
  p.radial_sup = [a](double) { return std::abs(a); };
  p.hessian_bound = std::abs(a);
  return p;
}

SmoothProblem quartic_plane_problem(Box c, Point y0) {
  SmoothProblem p;
  p.name = "quartic_plane";
  p.dim = 2;
  p.f = [](const Point& x) { return std::pow(x.squaredNorm(), 2) / 12.0; };
  p.gradient = [](const Point& x) { return Point(x.squaredNorm() * x / 3.0); };
  p.hessian_norm = [](const Point& x) { return x.squaredNorm(); };
  p.c = std::move(c);
  p.y0 = std::move(y0);
  return p;
}

}  // namespace optstab
