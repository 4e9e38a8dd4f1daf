#include "optstab/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "optstab/errors.hpp"

namespace optstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void normalize(Interval& iv) {
  if (std::isinf(iv.lo)) iv.lo_closed = false;
  if (std::isinf(iv.hi)) iv.hi_closed = false;
}

bool nonempty(const Interval& iv) {
  if (iv.lo < iv.hi) return true;
  return iv.lo == iv.hi && iv.lo_closed && iv.hi_closed;
}

double member_of(const Interval& iv) {
  if (iv.lo_closed) return iv.lo;
  if (iv.hi_closed) return iv.hi;
  if (std::isinf(iv.lo) && std::isinf(iv.hi)) return 0.0;
  if (std::isinf(iv.lo)) return iv.hi - 1.0;
  if (std::isinf(iv.hi)) return iv.lo + 1.0;
  return 0.5 * (iv.lo + iv.hi);
}

double dist_to_interval(double t, double lo, double hi) {
  if (t < lo) return lo - t;
  if (t > hi) return t - hi;
  return 0.0;
}

bool symmetric_kind(const PseudoDistance& d) {
  return d.kind() == DistanceKind::euclidean || d.kind() == DistanceKind::absolute;
}

bool line_metric(const PseudoDistance& d, const SetModel& a) {
  return a.dim() == 1 && symmetric_kind(d);
}

// Interval view of a 1-D set: interval unions as-is, clouds as points.
std::optional<std::vector<Interval>> as_intervals(const SetModel& a) {
  if (const auto* u = a.get<IntervalUnion>()) return u->pieces;
  if (const auto* c = a.get<FiniteCloud>(); c && a.dim() == 1) {
    std::vector<double> xs;
    for (const auto& p : c->points) xs.push_back(p[0]);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<Interval> out;
    for (double x : xs) out.push_back({x, x, true, true});
    return out;
  }
  return std::nullopt;
}

double intervals_distance(const std::vector<Interval>& pieces, double t) {
  if (std::isinf(t)) {
    for (const auto& iv : pieces)
      if ((t > 0 && iv.hi == kInf) || (t < 0 && iv.lo == -kInf)) return 0.0;
    return kInf;
  }
  double best = kInf;
  for (const auto& iv : pieces) best = std::min(best, dist_to_interval(t, iv.lo, iv.hi));
  return best;
}

// sup over a in A of dist(a, B) on the line.
double intervals_deviation(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  std::vector<double> gap_mids;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) gap_mids.push_back(0.5 * (b[i].hi + b[i + 1].lo));
  double best = -kInf;
  for (const auto& p : a) {
    best = std::max(best, intervals_distance(b, p.lo));
    best = std::max(best, intervals_distance(b, p.hi));
    for (double m : gap_mids)
      if (m > p.lo && m < p.hi) best = std::max(best, intervals_distance(b, m));
  }
  return best;
}

double intervals_gap(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  double best = kInf;
  for (const auto& p : a)
    for (const auto& q : b) best = std::min(best, std::max({0.0, q.lo - p.hi, p.lo - q.hi}));
  return best;
}

// sup over the segment P of dist(., B) for axis-segment unions.
double axis_deviation(const AxisSegments& a, const AxisSegments& b) {
  std::map<Eigen::Index, std::vector<const AxisSegment*>> by_axis;
  std::map<Eigen::Index, double> min_lo2;
  for (const auto& s : b.segments) {
    by_axis[s.axis].push_back(&s);
    auto [it, inserted] = min_lo2.emplace(s.axis, s.lo * s.lo);
    if (!inserted) it->second = std::min(it->second, s.lo * s.lo);
  }
  // smallest and second smallest squared offset over distinct axes
  Eigen::Index best_axis = -1;
  double v1 = kInf, v2 = kInf;
  for (auto [axis, v] : min_lo2) {
    if (v < v1) {
      v2 = v1;
      v1 = v;
      best_axis = axis;
    } else if (v < v2) {
      v2 = v;
    }
  }
  for (auto& [axis, segs] : by_axis)
    std::sort(segs.begin(), segs.end(), [](const AxisSegment* x, const AxisSegment* y) { return x->lo < y->lo; });

  double best = -kInf;
  for (const auto& p : a.segments) {
    const double c2 = (p.axis == best_axis) ? v2 : v1;
    const auto it = by_axis.find(p.axis);
    const std::vector<const AxisSegment*> empty;
    const auto& same = it == by_axis.end() ? empty : it->second;
    auto h = [&](double s) {
      double hs = kInf;
      for (const auto* q : same) hs = std::min(hs, dist_to_interval(s, q->lo, q->hi));
      const double ho = std::isinf(c2) ? kInf : std::sqrt(s * s + c2);
      return std::min(hs, ho);
    };
    std::vector<double> cand{p.lo, p.hi};
    for (std::size_t i = 0; i < same.size(); ++i) {
      cand.push_back(same[i]->lo);
      cand.push_back(same[i]->hi);
      if (same[i]->lo > 0.0 && !std::isinf(c2)) cand.push_back((same[i]->lo * same[i]->lo - c2) / (2.0 * same[i]->lo));
      if (i + 1 < same.size()) cand.push_back(0.5 * (same[i]->hi + same[i + 1]->lo));
    }
    for (double s : cand)
      if (s >= p.lo && s <= p.hi) best = std::max(best, h(s));
  }
  return best;
}

bool is_convex_target(const SetModel& b) {
  if (b.get<AffineSlab>()) return true;
  if (const auto* im = b.get<ImplicitSampled>()) return im->ball.has_value() || (im->convex && im->distance_to);
  return false;
}

std::optional<ExtendedReal> exact_point_distance(const PseudoDistance& d, const Point& x, const SetModel& a,
                                                 Orientation o) {
  if (x.size() != a.dim()) throw InputError("point_set_distance: point and set dimensions differ");
  if (const auto* c = a.get<FiniteCloud>()) {
    ExtendedReal best = ExtendedReal::pos_inf();
    for (const auto& p : c->points) best = min(best, o == Orientation::forward ? d(x, p) : d(p, x));
    return best;
  }
  if (line_metric(d, a)) {
    if (const auto* u = a.get<IntervalUnion>()) return ExtendedReal(intervals_distance(u->pieces, x[0]));
  }
  if (d.kind() == DistanceKind::euclidean) {
    if (const auto* s = a.get<AxisSegments>()) return ExtendedReal(axis_segments_distance(*s, x));
    if (const auto* s = a.get<AffineSlab>()) return ExtendedReal(slab_distance(*s, x));
    if (const auto* im = a.get<ImplicitSampled>()) {
      if (im->distance_to) return ExtendedReal(im->distance_to(x));
      if (im->ball) return ExtendedReal(std::max(0.0, (x - im->ball->center).norm() - im->ball->radius));
    }
  }
  return std::nullopt;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::string to_string(EvalMode m) { return m == EvalMode::exact ? "exact" : "sampled"; }

Point pt(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p[i++] = x;
  return p;
}

SetModel cloud(std::vector<Point> pts) { return SetModel(FiniteCloud{std::move(pts)}); }

SetModel cloud_1d(std::initializer_list<double> xs) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back(pt({x}));
  return cloud(std::move(pts));
}

SetModel interval_union(std::vector<Interval> pieces) { return SetModel(IntervalUnion{std::move(pieces)}); }

SetModel::SetModel(Variant v) : v_(std::move(v)) {
  std::visit(
      [this](auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteCloud>) {
          if (s.points.empty()) throw InputError("FiniteCloud: empty set");
          dim_ = s.points.front().size();
          for (const auto& p : s.points)
            if (p.size() != dim_) throw InputError("FiniteCloud: mixed dimensions");
          witness_ = s.points.front();
        } else if constexpr (std::is_same_v<T, IntervalUnion>) {
          if (s.pieces.empty()) throw InputError("IntervalUnion: empty set");
          for (auto& iv : s.pieces) {
            normalize(iv);
            if (!nonempty(iv)) throw InputError("IntervalUnion: empty piece");
          }
          for (std::size_t i = 0; i + 1 < s.pieces.size(); ++i) {
            const auto& l = s.pieces[i];
            const auto& r = s.pieces[i + 1];
            const bool separated = l.hi < r.lo || (l.hi == r.lo && !(l.hi_closed && r.lo_closed));
            if (!separated) throw InputError("IntervalUnion: pieces must be sorted and pairwise disjoint");
          }
          dim_ = 1;
          witness_ = pt({member_of(s.pieces.front())});
        } else if constexpr (std::is_same_v<T, AxisSegments>) {
          if (s.dim <= 0 || s.segments.empty()) throw InputError("AxisSegments: empty set");
          std::map<Eigen::Index, std::vector<AxisSegment>> by_axis;
          for (const auto& g : s.segments) {
            if (g.axis < 0 || g.axis >= s.dim) throw InputError("AxisSegments: axis out of range");
            if (g.lo < 0.0 || g.lo > g.hi || (g.lo == g.hi && !g.hi_closed))
              throw InputError("AxisSegments: segments need 0 <= lo <= hi");
            by_axis[g.axis].push_back(g);
          }
          for (auto& [axis, segs] : by_axis) {
            std::sort(segs.begin(), segs.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
            for (std::size_t i = 0; i + 1 < segs.size(); ++i)
              if (segs[i].hi >= segs[i + 1].lo) throw InputError("AxisSegments: overlapping segments on one axis");
          }
          dim_ = s.dim;
          witness_ = Point::Zero(dim_);
          witness_[s.segments.front().axis] = s.segments.front().lo;
        } else if constexpr (std::is_same_v<T, ImplicitSampled>) {
          if (!s.contains || !s.sample) throw InputError("ImplicitSampled: needs membership and sampler");
          if (s.dim <= 0 || s.witness.size() != s.dim) throw InputError("ImplicitSampled: witness dimension");
          if (!s.contains(s.witness)) throw InputError("ImplicitSampled: witness fails membership");
          dim_ = s.dim;
          witness_ = s.witness;
        } else {
          const Eigen::Index n = s.particular.size();
          const Eigen::Index k = s.kernel.cols();
          if (n == 0 || (k > 0 && s.kernel.rows() != n)) throw InputError("AffineSlab: kernel rows must match dimension");
          if (s.lo.size() != k || s.hi.size() != k) throw InputError("AffineSlab: box size must match kernel dimension");
          if (k > 0 && (s.kernel.transpose() * s.kernel - Eigen::MatrixXd::Identity(k, k)).norm() > 1e-9)
            throw InputError("AffineSlab: kernel basis must be orthonormal");
          if ((s.lo.array() > s.hi.array()).any()) throw InputError("AffineSlab: empty box");
          dim_ = n;
          witness_ = k > 0 ? Point(s.particular + s.kernel * (0.5 * (s.lo + s.hi))) : s.particular;
        }
      },
      v_);
}

bool SetModel::contains(const Point& x, double tol) const {
  if (x.size() != dim_) return false;
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteCloud>) {
          return std::any_of(s.points.begin(), s.points.end(), [&](const Point& p) { return (p - x).norm() <= tol; });
        } else if constexpr (std::is_same_v<T, IntervalUnion>) {
          return std::any_of(s.pieces.begin(), s.pieces.end(), [&](const Interval& iv) { return iv.contains(x[0]); });
        } else if constexpr (std::is_same_v<T, AxisSegments>) {
          for (const auto& g : s.segments) {
            Point rest = x;
            rest[g.axis] = 0.0;
            const double t = x[g.axis];
            const bool on = g.hi_closed ? (t >= g.lo && t <= g.hi) : (t >= g.lo && t < g.hi);
            if (rest.norm() <= tol && on) return true;
          }
          return false;
        } else if constexpr (std::is_same_v<T, ImplicitSampled>) {
          return s.contains(x);
        } else {
          return slab_distance(s, x) <= tol;
        }
      },
      v_);
}

std::optional<Box> SetModel::bounding_box() const {
  return std::visit(
      [&](const auto& s) -> std::optional<Box> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteCloud>) {
          Box b{s.points.front(), s.points.front()};
          for (const auto& p : s.points) {
            b.lo = b.lo.cwiseMin(p);
            b.hi = b.hi.cwiseMax(p);
          }
          return b;
        } else if constexpr (std::is_same_v<T, IntervalUnion>) {
          const double lo = s.pieces.front().lo, hi = s.pieces.back().hi;
          if (std::isinf(lo) || std::isinf(hi)) return std::nullopt;
          return Box{pt({lo}), pt({hi})};
        } else if constexpr (std::is_same_v<T, AxisSegments>) {
          Box b{Point::Zero(s.dim), Point::Zero(s.dim)};
          for (const auto& g : s.segments) b.hi[g.axis] = std::max(b.hi[g.axis], g.hi);
          return b;
        } else if constexpr (std::is_same_v<T, ImplicitSampled>) {
          if (s.ball) {
            const Point r = Point::Constant(s.dim, s.ball->radius);
            return Box{s.ball->center - r, s.ball->center + r};
          }
          return s.bounds;
        } else {
          Box b{s.particular, s.particular};
          for (Eigen::Index j = 0; j < s.kernel.cols(); ++j) {
            const Point a = s.kernel.col(j) * s.lo[j], c = s.kernel.col(j) * s.hi[j];
            b.lo += a.cwiseMin(c);
            b.hi += a.cwiseMax(c);
          }
          return b;
        }
      },
      v_);
}

double interval_union_distance(const IntervalUnion& u, double t) { return intervals_distance(u.pieces, t); }

double axis_segments_distance(const AxisSegments& s, const Point& x) {
  if (x.size() != s.dim) throw InputError("axis_segments_distance: dimension mismatch");
  double best = kInf;
  for (const auto& g : s.segments) {
    double off = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (i != g.axis) off += x[i] * x[i];
    const double along = dist_to_interval(x[g.axis], g.lo, g.hi);
    best = std::min(best, std::sqrt(off + along * along));
  }
  return best;
}

double slab_distance(const AffineSlab& s, const Point& x) {
  if (x.size() != s.particular.size()) throw InputError("slab_distance: dimension mismatch");
  const Point y = x - s.particular;
  if (s.kernel.cols() == 0) return y.norm();
  const Eigen::VectorXd z = (s.kernel.transpose() * y).cwiseMax(s.lo).cwiseMin(s.hi);
  return (y - s.kernel * z).norm();
}

std::vector<Point> slab_corners(const AffineSlab& s) {
  const Eigen::Index k = s.kernel.cols();
  if (k > 20) throw InputError("slab_corners: kernel dimension too large to enumerate");
  std::vector<Point> out;
  const std::size_t count = std::size_t{1} << k;
  out.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    Eigen::VectorXd z(k);
    for (Eigen::Index j = 0; j < k; ++j) z[j] = (mask >> j) & 1U ? s.hi[j] : s.lo[j];
    out.emplace_back(k > 0 ? Point(s.particular + s.kernel * z) : s.particular);
  }
  return out;
}

std::vector<Point> sample_points(const SetModel& a, std::size_t budget, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> out;
  auto full = [&] { return out.size() >= budget; };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteCloud>) {
          out = s.points;
        } else if constexpr (std::is_same_v<T, IntervalUnion>) {
          for (const auto& iv : s.pieces) {
            if (iv.lo_closed && !full()) out.push_back(pt({iv.lo}));
            if (iv.hi_closed && iv.hi != iv.lo && !full()) out.push_back(pt({iv.hi}));
          }
          std::uniform_int_distribution<std::size_t> pick(0, s.pieces.size() - 1);
          std::exponential_distribution<double> tail(1.0);
          std::normal_distribution<double> gauss(0.0, 1.0);
          while (!full()) {
            const auto& iv = s.pieces[pick(rng)];
            double t;
            if (std::isinf(iv.lo) && std::isinf(iv.hi))
              t = 10.0 * gauss(rng);
            else if (std::isinf(iv.hi))
              t = iv.lo + (1.0 + std::abs(iv.lo)) * tail(rng);
            else if (std::isinf(iv.lo))
              t = iv.hi - (1.0 + std::abs(iv.hi)) * tail(rng);
            else
              t = iv.lo + (iv.hi - iv.lo) * unit(rng);
            if (iv.contains(t)) out.push_back(pt({t}));
          }
        } else if constexpr (std::is_same_v<T, AxisSegments>) {
          auto on_axis = [&](Eigen::Index axis, double t) {
            Point p = Point::Zero(s.dim);
            p[axis] = t;
            return p;
          };
          for (const auto& g : s.segments) {
            if (!full()) out.push_back(on_axis(g.axis, g.lo));
            if (g.hi_closed && g.hi != g.lo && !full()) out.push_back(on_axis(g.axis, g.hi));
          }
          std::uniform_int_distribution<std::size_t> pick(0, s.segments.size() - 1);
          while (!full()) {
            const auto& g = s.segments[pick(rng)];
            const double t = g.lo + (g.hi - g.lo) * unit(rng);
            if (g.hi_closed || t < g.hi) out.push_back(on_axis(g.axis, t));
          }
        } else if constexpr (std::is_same_v<T, ImplicitSampled>) {
          if (!full()) out.push_back(s.witness);
          while (!full()) {
            Point p = s.sample(rng);
            if (p.size() != s.dim || !s.contains(p))
              throw InconsistencyError("ImplicitSampled '" + s.tag + "': sampler produced a non-member");
            out.push_back(std::move(p));
          }
        } else {
          if (s.kernel.cols() <= 10)
            for (auto& c : slab_corners(s)) {
              if (full()) break;
              out.push_back(std::move(c));
            }
          while (!full()) {
            Eigen::VectorXd z(s.kernel.cols());
            for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = s.lo[j] + (s.hi[j] - s.lo[j]) * unit(rng);
            out.emplace_back(z.size() > 0 ? Point(s.particular + s.kernel * z) : s.particular);
          }
        }
      },
      a.variant());
  return out;
}

DistanceReport point_set_distance(const PseudoDistance& d, const Point& x, const SetModel& a,
                                  const DistanceOptions& opt) {
  if (auto v = exact_point_distance(d, x, a, opt.orientation)) return {*v, EvalMode::exact, 0, 0.0};
  ExtendedReal best = ExtendedReal::pos_inf();
  for (const auto& p : sample_points(a, opt.budget, opt.seed))
    best = min(best, opt.orientation == Orientation::forward ? d(x, p) : d(p, x));
  return {best, EvalMode::sampled, opt.budget, ExtendedReal::pos_inf()};
}

DistanceReport set_set_distance(const PseudoDistance& d, const SetModel& a, const SetModel& b,
                                const DistanceOptions& opt) {
  if (a.dim() != b.dim()) throw InputError("set_set_distance: dimension mismatch");
  if (line_metric(d, a)) {
    auto ia = as_intervals(a), ib = as_intervals(b);
    if (ia && ib) return {intervals_gap(*ia, *ib), EvalMode::exact, 0, 0.0};
  }
  auto inner_opt = opt;
  inner_opt.seed = mix(opt.seed, 1);
  if (const auto* c = a.get<FiniteCloud>()) {
    ExtendedReal best = ExtendedReal::pos_inf();
    bool exact = true;
    for (const auto& p : c->points) {
      auto r = point_set_distance(d, p, b, inner_opt);
      exact = exact && r.mode == EvalMode::exact;
      best = min(best, r.value);
    }
    if (exact) return {best, EvalMode::exact, 0, 0.0};
    return {best, EvalMode::sampled, opt.budget, ExtendedReal::pos_inf()};
  }
  if (b.get<FiniteCloud>() && d.properties().symmetric) {
    auto swapped = opt;
    auto r = set_set_distance(d, b, a, swapped);
    if (r.mode == EvalMode::exact) return r;
  }
  ExtendedReal best = ExtendedReal::pos_inf();
  for (const auto& p : sample_points(a, opt.budget, opt.seed))
    best = min(best, point_set_distance(d, p, b, inner_opt).value);
  return {best, EvalMode::sampled, opt.budget, ExtendedReal::pos_inf()};
}

DistanceReport asym_hausdorff(const PseudoDistance& d, const SetModel& a, const SetModel& b,
                              const DistanceOptions& opt) {
  if (a.dim() != b.dim()) throw InputError("asym_hausdorff: dimension mismatch");
  auto inner_opt = opt;
  inner_opt.seed = mix(opt.seed, 2);

  auto sup_over = [&](const std::vector<Point>& pts, bool structural_exact) -> DistanceReport {
    ExtendedReal best = ExtendedReal::neg_inf();
    bool exact = structural_exact;
    for (const auto& p : pts) {
      auto r = point_set_distance(d, p, b, inner_opt);
      exact = exact && r.mode == EvalMode::exact;
      best = max(best, r.value);
    }
    if (exact) return {best, EvalMode::exact, 0, 0.0};
    return {best, EvalMode::sampled, opt.budget, ExtendedReal::pos_inf()};
  };

  if (const auto* c = a.get<FiniteCloud>()) return sup_over(c->points, true);
  if (line_metric(d, a)) {
    auto ia = as_intervals(a), ib = as_intervals(b);
    if (ia && ib) return {intervals_deviation(*ia, *ib), EvalMode::exact, 0, 0.0};
  }
  if (d.kind() == DistanceKind::euclidean) {
    const auto* sa = a.get<AxisSegments>();
    const auto* sb = b.get<AxisSegments>();
    if (sa && sb) return {axis_deviation(*sa, *sb), EvalMode::exact, 0, 0.0};
    // dist(., B) is convex for convex B, so its sup over a box-slab sits at a corner
    if (const auto* slab = a.get<AffineSlab>(); slab && slab->kernel.cols() <= 16 && is_convex_target(b))
      return sup_over(slab_corners(*slab), true);
  }
  return sup_over(sample_points(a, opt.budget, opt.seed), false);
}

DistanceReport hausdorff(const PseudoDistance& d, const SetModel& a, const SetModel& b, const DistanceOptions& opt) {
  auto ab = asym_hausdorff(d, a, b, opt);
  auto ba = asym_hausdorff(d, b, a, opt);
  DistanceReport r;
  r.value = max(ab.value, ba.value);
  const bool exact = ab.mode == EvalMode::exact && ba.mode == EvalMode::exact;
  r.mode = exact ? EvalMode::exact : EvalMode::sampled;
  r.sample_budget = exact ? 0 : opt.budget;
  r.certified_error = exact ? ExtendedReal(0.0) : ExtendedReal::pos_inf();
  return r;
}

std::vector<Point> ball_around_set(const PseudoDistance& d, const SetModel& a, double r, std::span<const Point> probe,
                                   const DistanceOptions& opt) {
  if (!(r > 0.0)) throw InputError("ball_around_set: radius must be positive");
  std::vector<Point> out;
  for (const auto& p : probe)
    if (point_set_distance(d, p, a, opt).value <= ExtendedReal(r)) out.push_back(p);
  return out;
}

}  // namespace optstab
