#include "optstab/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "optstab/errors.hpp"

namespace optstab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double segment_distance(const Point& x, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  const double u = len2 > 0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (x - (a + u * ab)).norm();
}

bool strictly_feasible(const ConvexSystem& s, const Point& x) {
  if (s.halfspaces.normals.rows() > 0 && !((s.halfspaces.normals * x - s.halfspaces.offsets).array() < 0.0).all())
    return false;
  return std::all_of(s.balls.begin(), s.balls.end(),
                     [&](const BallDescriptor& b) { return (x - b.center).norm() < b.radius; });
}

}  // namespace

InnerResult exact_inner_solver(const ObjectiveFn& f, const SetModel& a) {
  const auto v = inf_over(f, a);
  if (v.mode != EvalMode::exact || !v.value.is_finite())
    throw HypothesisError("exact_inner_solver: no exact finite infimum for this level");
  return {v.value.value(), 0.0};
}

ConvergenceCertificate run_scheme(const SchemeInstance& s, std::size_t k_max) {
  if (std::holds_alternative<ContinuousOnly>(s.f.regularity))
    throw HypothesisError("run_scheme: objective '" + s.f.name +
                          "' declares no uniform modulus or Lipschitz constant");
  if (const auto* u = std::get_if<Uniform>(&s.f.regularity); u && !u->omega)
    throw HypothesisError("run_scheme: uniform regularity needs a modulus omega for the error budget");
  const std::size_t count = k_max == 0 ? s.levels.size() : std::min(k_max, s.levels.size());
  if (count == 0) throw InputError("run_scheme: no levels");

  ConvergenceCertificate cert;
  cert.lo = -std::numeric_limits<double>::infinity();
  cert.hi = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) {
    const auto& lvl = s.levels[k];
    if (!std::isfinite(lvl.h) || lvl.h < 0.0) throw InputError("run_scheme: level bound h_k must be finite");
    if (k > 0 && lvl.h > s.levels[k - 1].h) throw InputError("run_scheme: level bounds must be nonincreasing");
    CertificateRow row;
    row.k = k + 1;
    row.label = lvl.label;
    row.h = lvl.h;
    const auto r = s.solver(s.f, lvl.set);
    row.sigma = r.sigma;
    row.tau = r.tau;
    double transfer = 0.0;
    if (const auto* l = std::get_if<Lipschitz>(&s.f.regularity)) {
      transfer = l->lambda * lvl.h;
    } else if (const auto* l = std::get_if<LipschitzLocal>(&s.f.regularity)) {
      auto box = lvl.set.bounding_box();
      if (!box) throw HypothesisError("run_scheme: local Lipschitz constant needs bounded levels");
      const Point pad = Point::Constant(box->lo.size(), lvl.h);
      transfer = l->lambda_of(Box{box->lo - pad, box->hi + pad}) * lvl.h;
    } else {
      transfer = std::get<Uniform>(s.f.regularity).omega(lvl.h);
    }
    row.budget = r.tau + transfer;
    const double guard = 8.0 * kEps * (1.0 + std::abs(r.sigma) + row.budget);
    row.lo = r.sigma - row.budget - guard;
    row.hi = (s.inner ? r.sigma + r.tau : r.sigma + row.budget) + guard;
    if (s.target && s.diagnostic_budget > 0)
      row.sampled_dh =
          hausdorff(euclidean_distance(), *s.target, lvl.set, {s.diagnostic_budget, 0x5eed + k}).value.value();
    cert.lo = std::max(cert.lo, row.lo);
    cert.hi = std::min(cert.hi, row.hi);
    cert.rows.push_back(std::move(row));
  }
  if (cert.lo > cert.hi)
    throw InconsistencyError("run_scheme: level brackets do not intersect; check h_k or the solver tolerance");
  return cert;
}

double polygon_sagitta(int m) {
  if (m < 3) throw InputError("polygon: m must be at least 3");
  return 1.0 - std::cos(std::numbers::pi / m);
}

namespace {

std::vector<Point> polygon_vertices(int m, PolygonOrientation o, double radius) {
  if (m < 3) throw InputError("polygon: m must be at least 3");
  std::vector<Point> v;
  const double shift = o == PolygonOrientation::midpoint ? std::numbers::pi / m : 0.0;
  for (int i = 0; i < m; ++i) {
    const double a = 2.0 * std::numbers::pi * i / m + shift;
    v.push_back(pt({radius * std::cos(a), radius * std::sin(a)}));
  }
  if (o == PolygonOrientation::midpoint) {
    // keep the edge midpoint exactly on the axis: mirror the first vertex
    v.back() = pt({v.front()[0], -v.front()[1]});
  }
  return v;
}

}  // namespace

SetModel regular_polygon(int m, PolygonOrientation o, double radius) {
  auto verts = polygon_vertices(m, o, radius);
  const auto hs = hull_halfspaces(verts);
  ImplicitSampled s;
  s.dim = 2;
  s.contains = [hs](const Point& x) {
    return x.size() == 2 && ((hs.normals * x - hs.offsets).array() <= 1e-12).all();
  };
  s.sample = [verts](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, verts.size() - 1);
    const std::size_t i = pick(rng);
    const Point& a = verts[i];
    const Point& b = verts[(i + 1) % verts.size()];
    if (unit(rng) < 0.5) return Point(a + unit(rng) * (b - a));
    double u = unit(rng), w = unit(rng);
    if (u + w > 1.0) {
      u = 1.0 - u;
      w = 1.0 - w;
    }
    return Point(u * a + w * b);
  };
  s.witness = Point::Zero(2);
  s.distance_to = [hs, verts](const Point& x) {
    if (((hs.normals * x - hs.offsets).array() <= 0.0).all()) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < verts.size(); ++i)
      best = std::min(best, segment_distance(x, verts[i], verts[(i + 1) % verts.size()]));
    return best;
  };
  s.convex = true;
  s.vertices = verts;
  Box b{verts.front(), verts.front()};
  for (const auto& v : verts) {
    b.lo = b.lo.cwiseMin(v);
    b.hi = b.hi.cwiseMax(v);
  }
  s.bounds = b;
  s.tag = "polygon_" + std::to_string(m);
  return SetModel(std::move(s));
}

SetModel polygon_cloud(int m, PolygonOrientation o, int edge_points, int rings) {
  const auto verts = polygon_vertices(m, o, 1.0);
  std::vector<Point> pts{Point::Zero(2)};
  for (int r = 1; r <= rings + 1; ++r) {
    const double scale = static_cast<double>(r) / (rings + 1);
    for (std::size_t i = 0; i < verts.size(); ++i) {
      const Point& a = verts[i];
      const Point& b = verts[(i + 1) % verts.size()];
      for (int e = 0; e < edge_points; ++e) pts.push_back(scale * (a + (static_cast<double>(e) / edge_points) * (b - a)));
      if (edge_points % 2 == 1) pts.push_back(scale * (0.5 * (a + b)));
    }
  }
  return cloud(std::move(pts));
}

SetModel disk(Point center, double radius) {
  if (!(radius > 0.0)) throw InputError("disk: radius must be positive");
  ImplicitSampled s;
  s.dim = center.size();
  s.contains = [center, radius](const Point& x) { return (x - center).norm() <= radius * (1.0 + 1e-12); };
  s.sample = [center, radius](std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Point v(center.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
    v /= v.norm();
    const double r = unit(rng) < 0.5 ? radius : radius * std::pow(unit(rng), 1.0 / static_cast<double>(center.size()));
    return Point(center + r * v);
  };
  s.witness = center;
  s.ball = BallDescriptor{center, radius};
  s.convex = true;
  s.tag = "disk";
  return SetModel(std::move(s));
}

std::vector<SchemeLevel> build_inner_polygon_family(std::span<const int> ms, PolygonOrientation o) {
  std::vector<SchemeLevel> out;
  for (int m : ms) out.push_back({regular_polygon(m, o), polygon_sagitta(m), "m=" + std::to_string(m)});
  return out;
}

GridGeometry grid_geometry(const ConvexSystem& s) {
  const Point& z = s.interior;
  GridGeometry g;
  g.inner_radius = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.halfspaces.normals.rows(); ++i) {
    const auto a = s.halfspaces.normals.row(i);
    g.inner_radius = std::min(g.inner_radius, (s.halfspaces.offsets[i] - a.dot(z)) / a.norm());
  }
  for (const auto& b : s.balls) g.inner_radius = std::min(g.inner_radius, b.radius - (z - b.center).norm());
  if (!(g.inner_radius > 0.0) || !std::isfinite(g.inner_radius))
    throw InputError("grid family: the declared interior point is not strictly feasible");
  g.outer_radius = std::numeric_limits<double>::infinity();
  for (const auto& b : s.balls) g.outer_radius = std::min(g.outer_radius, (z - b.center).norm() + b.radius);
  if (!std::isfinite(g.outer_radius) && s.halfspaces.normals.rows() > 0) {
    const auto verts = polytope_vertices(s.halfspaces);
    if (!verts.empty()) {
      g.outer_radius = 0.0;
      for (const auto& v : verts) g.outer_radius = std::max(g.outer_radius, (v - z).norm());
    }
  }
  if (!std::isfinite(g.outer_radius)) throw InputError("grid family: the system must be bounded");
  return g;
}

std::vector<SchemeLevel> build_inner_grid_family(const ConvexSystem& s, std::span<const double> meshes) {
  const auto geo = grid_geometry(s);
  const Eigen::Index n = s.interior.size();
  if (n < 1 || n > 3) throw InputError("grid family: dimension must be 1, 2 or 3");
  std::vector<SchemeLevel> out;
  for (double mesh : meshes) {
    if (!(mesh > 0.0)) throw InputError("grid family: mesh must be positive");
    std::vector<long> lo(static_cast<std::size_t>(n)), hi(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
      lo[static_cast<std::size_t>(k)] = static_cast<long>(std::ceil((s.interior[k] - geo.outer_radius) / mesh));
      hi[static_cast<std::size_t>(k)] = static_cast<long>(std::floor((s.interior[k] + geo.outer_radius) / mesh));
    }
    std::vector<Point> pts;
    std::vector<long> idx = lo;
    while (true) {
      Point g(n);
      for (Eigen::Index k = 0; k < n; ++k) g[k] = mesh * static_cast<double>(idx[static_cast<std::size_t>(k)]);
      if (strictly_feasible(s, g)) pts.push_back(g);
      std::size_t k = 0;
      while (k < idx.size() && ++idx[k] > hi[k]) {
        idx[k] = lo[k];
        ++k;
      }
      if (k == idx.size()) break;
    }
    if (pts.empty()) throw RefineFirstError("grid family: no strictly feasible grid point at mesh " + std::to_string(mesh));
    const double h = mesh * (std::sqrt(static_cast<double>(n)) / 2.0) * (1.0 + geo.outer_radius / geo.inner_radius);
    char label[64];
    std::snprintf(label, sizeof label, "mesh=%.17g", mesh);
    out.push_back({cloud(std::move(pts)), h, label});
  }
  return out;
}

}  // namespace optstab
