#include "optstab/gauge.hpp"

#include <algorithm>
#include <cmath>

#include "optstab/errors.hpp"

namespace optstab {

namespace {

double p_norm(const Point& x, double p) {
  if (std::isinf(p)) return x.lpNorm<Eigen::Infinity>();
  if (p == 2.0) return x.norm();
  if (p == 1.0) return x.lpNorm<1>();
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), p);
  return std::pow(s, 1.0 / p);
}

double cross(const Point& o, const Point& a, const Point& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

HalfspaceBody from_rows(const std::vector<std::pair<Eigen::Vector2d, double>>& rows) {
  HalfspaceBody hs;
  hs.normals.resize(static_cast<Eigen::Index>(rows.size()), 2);
  hs.offsets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    hs.normals.row(static_cast<Eigen::Index>(i)) = rows[i].first.transpose();
    hs.offsets[static_cast<Eigen::Index>(i)] = rows[i].second;
  }
  return hs;
}

// Offsets within rounding of zero are snapped so that a vertex at the origin
// produces an exact b = 0 row.
double snap(double b, double scale) { return std::abs(b) <= 1e-12 * std::max(1.0, scale) ? 0.0 : b; }

}  // namespace

std::vector<Point> convex_hull_2d(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a == b; }), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

HalfspaceBody hull_halfspaces(const std::vector<Point>& vertices) {
  if (vertices.empty()) throw InputError("hull_halfspaces: no vertices");
  const Eigen::Index dim = vertices.front().size();
  for (const auto& v : vertices)
    if (v.size() != dim) throw InputError("hull_halfspaces: mixed vertex dimensions");

  if (dim == 1) {
    double lo = vertices.front()[0], hi = lo;
    for (const auto& v : vertices) {
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
    }
    HalfspaceBody hs;
    hs.normals = Eigen::MatrixXd(2, 1);
    hs.normals << 1.0, -1.0;
    hs.offsets = Eigen::Vector2d(hi, -lo);
    return hs;
  }
  if (dim != 2) throw InputError("hull_halfspaces: vertex bodies are supported in dimension 1 and 2 only");

  const auto hull = convex_hull_2d(vertices);
  double scale = 0.0;
  for (const auto& v : hull) scale = std::max(scale, v.cwiseAbs().maxCoeff());
  std::vector<std::pair<Eigen::Vector2d, double>> rows;
  if (hull.size() == 1) {
    const Eigen::Vector2d p = hull[0];
    rows = {{{1, 0}, p[0]}, {{-1, 0}, -p[0]}, {{0, 1}, p[1]}, {{0, -1}, -p[1]}};
  } else if (hull.size() == 2) {
    const Eigen::Vector2d p = hull[0], q = hull[1];
    const Eigen::Vector2d u = q - p;
    const Eigen::Vector2d n(-u[1], u[0]);
    rows = {{n, snap(n.dot(p), scale * n.norm())},
            {-n, snap(-n.dot(p), scale * n.norm())},
            {u, snap(u.dot(q), scale * u.norm())},
            {-u, snap(-u.dot(p), scale * u.norm())}};
  } else {
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const Eigen::Vector2d a = hull[i], b = hull[(i + 1) % hull.size()];
      const Eigen::Vector2d n(b[1] - a[1], a[0] - b[0]);
      rows.push_back({n, snap(n.dot(a), scale * n.norm())});
    }
  }
  return from_rows(rows);
}

ExtendedReal halfspace_gauge(const HalfspaceBody& body, const Point& x) {
  if (x.size() != body.normals.cols()) throw InputError("halfspace_gauge: dimension mismatch");
  double best = 0.0;
  for (Eigen::Index i = 0; i < body.normals.rows(); ++i) {
    const double ax = body.normals.row(i).dot(x);
    const double b = body.offsets[i];
    if (b == 0.0) {
      if (ax > 0.0) return ExtendedReal::pos_inf();
      continue;
    }
    best = std::max(best, ax / b);
  }
  return best;
}

ExtendedReal oracle_gauge(const OracleBody& body, const Point& x, double tol) {
  if (x.size() != body.dim) throw InputError("oracle_gauge: dimension mismatch");
  const double norm = x.norm();
  if (norm == 0.0) return 0.0;
  // x in mu C needs mu >= |x| / R because C sits inside the R-ball.
  double lo = norm / body.bounding_radius;
  double hi = std::max(lo, 1e-300);
  int doublings = 0;
  while (!body.contains(x / hi)) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 200) return ExtendedReal::pos_inf();
  }
  if (doublings == 0) lo = norm / body.bounding_radius;
  // membership along the ray is monotone in mu since C is convex with 0 in C
  for (int it = 0; it < 4000 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (body.contains(x / mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

GaugeSet::GaugeSet(Body body) : body_(std::move(body)) {
  std::visit(
      [this](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, HalfspaceBody>) {
          if (b.normals.rows() != b.offsets.size()) throw InputError("GaugeSet: normals/offsets size mismatch");
          dim_ = b.normals.cols();
          hs_ = b;
        } else if constexpr (std::is_same_v<T, VertexBody>) {
          if (b.vertices.empty()) throw InputError("GaugeSet: empty vertex list");
          dim_ = b.vertices.front().size();
          hs_ = hull_halfspaces(b.vertices);
        } else if constexpr (std::is_same_v<T, NormBallBody>) {
          if (!(b.radius > 0.0) || !(b.p >= 1.0)) throw InputError("GaugeSet: norm ball needs radius > 0, p >= 1");
          dim_ = b.dim;
        } else {
          if (!b.contains) throw InputError("GaugeSet: oracle body without membership test");
          if (!(b.bounding_radius > 0.0) || !std::isfinite(b.bounding_radius))
            throw InputError("GaugeSet: oracle bodies must declare a finite bounding radius");
          dim_ = b.dim;
        }
      },
      body_);
  if (dim_ <= 0) throw InputError("GaugeSet: dimension must be positive");
  if (!contains(Point::Zero(dim_), 0.0)) throw InvalidGaugeError("GaugeSet: 0 is not in C");
}

bool GaugeSet::contains(const Point& x, double slack) const {
  if (x.size() != dim_) throw InputError("GaugeSet::contains: dimension mismatch");
  if (hs_) return ((hs_->normals * x - hs_->offsets).array() <= slack).all();
  if (const auto* ball = std::get_if<NormBallBody>(&body_)) return p_norm(x, ball->p) <= ball->radius + slack;
  return std::get<OracleBody>(body_).contains(x);
}

ExtendedReal GaugeSet::gauge(const Point& x) const {
  if (x.size() != dim_) throw InputError("minkowski_gauge: dimension mismatch");
  if (hs_) return halfspace_gauge(*hs_, x);
  if (const auto* ball = std::get_if<NormBallBody>(&body_)) return p_norm(x, ball->p) / ball->radius;
  return oracle_gauge(std::get<OracleBody>(body_), x);
}

Magnitude GaugeSet::as_magnitude() const {
  return [self = *this](const Point& x) { return self.gauge(x); };
}

GaugeSet segment_gauge_set() {
  HalfspaceBody hs;
  hs.normals = Eigen::MatrixXd(4, 2);
  hs.normals << 1, 0, -1, 0, 0, 1, 0, -1;
  hs.offsets = Eigen::Vector4d(1, 2, 0, 0);
  return GaugeSet(hs);
}

std::vector<Point> polytope_vertices(const HalfspaceBody& h) {
  const Eigen::Index m = h.normals.cols();
  const Eigen::Index rows = h.normals.rows();
  std::vector<Point> out;
  if (rows < m) return out;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    Eigen::MatrixXd a(m, m);
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      a.row(i) = h.normals.row(idx[static_cast<std::size_t>(i)]);
      b[i] = h.offsets[idx[static_cast<std::size_t>(i)]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.isInvertible()) {
      const Point x = lu.solve(b);
      const double scale = 1.0 + x.cwiseAbs().maxCoeff();
      if (((h.normals * x - h.offsets).array() <= 1e-9 * scale).all()) out.push_back(x);
    }
    // next m-subset in lexicographic order
    Eigen::Index i = m - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == rows - m + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < m; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

}  // namespace optstab
