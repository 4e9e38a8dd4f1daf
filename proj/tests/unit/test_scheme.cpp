#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "optstab/errors.hpp"
#include "optstab/instances.hpp"
#include "optstab/scheme.hpp"
#include "optstab/sets.hpp"

using namespace optstab;

namespace {

const ObjectiveFn& dist_to_two() {
  static const ObjectiveFn f = distance_objective(pt({2, 0}));
  return f;
}

}  // namespace

TEST_CASE("polygon sagitta matches sampled Hausdorff distance to the disk") {
  CHECK(polygon_sagitta(6) == doctest::Approx(1 - std::sqrt(3.0) / 2));
  CHECK_THROWS_AS(polygon_sagitta(2), InputError);
  for (int m : {3, 5, 8}) {
    DistanceOptions o;
    o.budget = 20000;
    const auto r = hausdorff(euclidean_distance(2), disk(Point::Zero(2), 1.0), regular_polygon(m), o);
    CHECK(r.value.value() <= polygon_sagitta(m) + 1e-12);
    CHECK(r.value.value() >= polygon_sagitta(m) - 2e-3);
  }
}

TEST_CASE("midpoint orientation: the inner value is exactly 1 + h_m") {
  for (int m = 3; m <= 64; ++m) {
    const auto r = exact_inner_solver(dist_to_two(), regular_polygon(m));
    CHECK(std::abs(r.sigma - (1.0 + polygon_sagitta(m))) <= 1e-12);
    CHECK(r.tau == 0.0);
  }
}

TEST_CASE("vertex orientation: a vertex touches the circle") {
  for (int m : {3, 4, 7, 16}) {
    const auto r = exact_inner_solver(dist_to_two(), regular_polygon(m, PolygonOrientation::vertex));
    CHECK(r.sigma == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("disk scheme: brackets contain 1 and shrink") {
  std::vector<int> ms;
  for (int m = 3; m <= 256; ++m) ms.push_back(m);
  SchemeInstance s{.name = "disk", .f = dist_to_two(), .levels = build_inner_polygon_family(ms), .inner = true};
  const auto cert = run_scheme(s);
  REQUIRE(cert.rows.size() == ms.size());
  for (std::size_t i = 0; i < cert.rows.size(); ++i) {
    const auto& row = cert.rows[i];
    CHECK(row.lo <= 1.0);
    CHECK(row.hi >= 1.0);
    CHECK(row.budget == doctest::Approx(row.h));
    if (i > 0) CHECK(row.hi - row.lo <= cert.rows[i - 1].hi - cert.rows[i - 1].lo + 1e-15);
  }
  CHECK(cert.lo <= 1.0);
  CHECK(cert.hi >= 1.0);
  CHECK(cert.hi - cert.lo == doctest::Approx(polygon_sagitta(256)).epsilon(1e-6));
  CHECK(run_scheme(s, 10).rows.size() == 10);
}

TEST_CASE("outer bracket when the levels are not inner") {
  std::vector<int> ms{6, 12, 24};
  SchemeInstance s{.name = "disk", .f = dist_to_two(), .levels = build_inner_polygon_family(ms)};
  const auto cert = run_scheme(s);
  for (const auto& r : cert.rows) {
    CHECK(r.lo == doctest::Approx(r.sigma - r.budget));
    CHECK(r.hi == doctest::Approx(r.sigma + r.budget));
  }
  CHECK(cert.lo <= 1.0);
  CHECK(cert.hi >= 1.0);
}

TEST_CASE("constant levels give a zero-width bracket around the value") {
  const auto a = cloud_1d({0, 1, 2});
  SchemeInstance s{.name = "constant", .f = linear_objective(pt({1.0})), .levels = {{a, 0.0, "A"}, {a, 0.0, "A"}}};
  const auto cert = run_scheme(s);
  CHECK(cert.lo <= 0.0);
  CHECK(cert.hi >= 0.0);
  CHECK(cert.hi - cert.lo < 1e-13);
}

TEST_CASE("scheme hypotheses and input checks") {
  const auto e = build("ce33");
  SchemeInstance bad{.name = "ce33", .f = *e.objective, .levels = {{e.set("A"), 0.0, "A"}}};
  CHECK_THROWS_AS(run_scheme(bad), HypothesisError);

  const auto a = cloud_1d({0, 1});
  SchemeInstance inc{.name = "inc", .f = linear_objective(pt({1.0})), .levels = {{a, 0.1, "a"}, {a, 0.2, "b"}}};
  CHECK_THROWS_AS(run_scheme(inc), InputError);
  SchemeInstance inf_h{.name = "inf", .f = linear_objective(pt({1.0})),
                       .levels = {{a, std::numeric_limits<double>::infinity(), "a"}}};
  CHECK_THROWS_AS(run_scheme(inf_h), InputError);
  SchemeInstance none{.name = "none", .f = linear_objective(pt({1.0}))};
  CHECK_THROWS_AS(run_scheme(none), InputError);

  // h_k that understates the true distance produces disjoint brackets
  SchemeInstance lie{.name = "lie",
                     .f = linear_objective(pt({1.0})),
                     .levels = {{cloud_1d({0}), 0.0, "a"}, {cloud_1d({5}), 0.0, "b"}}};
  CHECK_THROWS_AS(run_scheme(lie), InconsistencyError);
}

TEST_CASE("grid family on a ball cut by a halfspace") {
  ConvexSystem sys;
  sys.halfspaces.normals = Eigen::MatrixXd(1, 2);
  sys.halfspaces.normals << 1, 1;
  sys.halfspaces.offsets = Eigen::VectorXd::Constant(1, 0.5);
  sys.balls.push_back({pt({0, 0}), 1.0});
  sys.interior = pt({-0.2, -0.2});
  const auto g = grid_geometry(sys);
  CHECK(g.inner_radius > 0.0);
  CHECK(g.outer_radius >= 1.0);
  const std::vector<double> meshes{0.25, 0.125, 0.0625, 0.03125};
  const auto levels = build_inner_grid_family(sys, meshes);
  REQUIRE(levels.size() == 4);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double expect = meshes[i] * std::sqrt(2.0) / 2 * (1 + g.outer_radius / g.inner_radius);
    CHECK(levels[i].h == doctest::Approx(expect));
    if (i > 0) CHECK(levels[i].h == doctest::Approx(levels[i - 1].h / 2));
    const auto* c = levels[i].set.get<FiniteCloud>();
    REQUIRE(c);
    for (const auto& p : c->points) {
      CHECK(p.norm() < 1.0);
      CHECK(p[0] + p[1] < 0.5);
      CHECK(std::abs(p[0] / meshes[i] - std::round(p[0] / meshes[i])) < 1e-9);
    }
  }

  // independent oracle: the true minimum of x1 on the set is -1 at (-1, 0)
  SchemeInstance s{.name = "grid", .f = linear_objective(pt({1, 0})), .levels = levels, .inner = true};
  const auto cert = run_scheme(s);
  CHECK(cert.lo <= -1.0);
  CHECK(cert.hi >= -1.0);
  for (const auto& r : cert.rows) CHECK(r.sigma >= -1.0);
}

TEST_CASE("grid family refuses a slab thinner than the mesh") {
  ConvexSystem sys;
  sys.halfspaces.normals = Eigen::MatrixXd(4, 2);
  sys.halfspaces.normals << 1, 0, -1, 0, 0, 1, 0, -1;
  sys.halfspaces.offsets = Eigen::Vector4d(1.0, 1.0, 0.53, -0.51);
  sys.interior = pt({0.1, 0.52});
  const std::vector<double> coarse{0.25};
  CHECK_THROWS_AS(build_inner_grid_family(sys, coarse), RefineFirstError);
  const std::vector<double> fine{0.004};
  CHECK(build_inner_grid_family(sys, fine).size() == 1);
  sys.interior = pt({5, 5});
  CHECK_THROWS_AS(build_inner_grid_family(sys, fine), InputError);
}
