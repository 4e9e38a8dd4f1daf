#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optstab/gauge.hpp"
#include "optstab/optima.hpp"

namespace optstab {

/// One approximating set A_k with a certified bound h_k >= D_H(A, A_k).
struct SchemeLevel {
  SetModel set;
  double h = 0.0;
  std::string label;
};

struct InnerResult {
  double sigma = 0.0;
  double tau = 0.0;
};

/// (f, A_k) -> sigma_k with |sigma_k - INF_f(A_k)| <= tau_k.
using InnerSolver = std::function<InnerResult(const ObjectiveFn&, const SetModel&)>;

/// Exact inf via closed forms or exhaustive evaluation on clouds; refuses
/// sets it can only sample.
InnerResult exact_inner_solver(const ObjectiveFn& f, const SetModel& a);

struct SchemeInstance {
  std::string name;
  ObjectiveFn f;
  std::vector<SchemeLevel> levels;
  InnerSolver solver = exact_inner_solver;
  /// Every A_k is a subset of A, so INF_f(A) <= INF_f(A_k).
  bool inner = false;
  /// Target set, used only for the diagnostic sampled Hausdorff column.
  std::optional<SetModel> target{};
  std::size_t diagnostic_budget = 0;
};

struct CertificateRow {
  std::size_t k = 0;
  std::string label;
  double h = 0.0;
  double sigma = 0.0;
  double tau = 0.0;
  double budget = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::optional<double> sampled_dh;
};

struct ConvergenceCertificate {
  std::vector<CertificateRow> rows;
  double lo = 0.0;
  double hi = 0.0;
};

/// Runs the inner solver on the first `k_max` levels (all when 0) and
/// intersects the per-level brackets for INF_f(A).
ConvergenceCertificate run_scheme(const SchemeInstance& s, std::size_t k_max = 0);

enum class PolygonOrientation { midpoint, vertex };

/// Filled regular m-gon inscribed in the circle of `radius`; with the
/// midpoint orientation an edge midpoint lies on the positive x axis,
/// otherwise a vertex does.
SetModel regular_polygon(int m, PolygonOrientation o = PolygonOrientation::midpoint, double radius = 1.0);

/// Vertices, edge points and scaled interior rings of the m-gon.
SetModel polygon_cloud(int m, PolygonOrientation o = PolygonOrientation::midpoint, int edge_points = 4,
                       int rings = 3);

/// Closed unit disk (or ball of any radius) with closed-form metadata.
SetModel disk(Point center, double radius);

/// 1 - cos(pi / m): Hausdorff distance between the unit disk and the
/// inscribed m-gon.
double polygon_sagitta(int m);

std::vector<SchemeLevel> build_inner_polygon_family(std::span<const int> ms,
                                                    PolygonOrientation o = PolygonOrientation::midpoint);

/// {x : a_i . x <= b_i, ||x - c_j|| <= r_j} with a declared interior point.
struct ConvexSystem {
  HalfspaceBody halfspaces;
  std::vector<BallDescriptor> balls;
  Point interior;
};

struct GridGeometry {
  /// Radius of a ball around the interior point inside the system.
  double inner_radius = 0.0;
  /// Radius of a ball around the interior point containing the system.
  double outer_radius = 0.0;
};

GridGeometry grid_geometry(const ConvexSystem& s);

/// Strictly feasible points of the grid mesh * Z^n; h = mesh (sqrt(n)/2)
/// (1 + R / rho) with rho, R the inner and outer radii around the interior
/// point.
std::vector<SchemeLevel> build_inner_grid_family(const ConvexSystem& s, std::span<const double> meshes);

}  // namespace optstab
