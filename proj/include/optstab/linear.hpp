#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "optstab/gauge.hpp"
#include "optstab/parametric.hpp"

namespace optstab {

inline constexpr double kRankTolerance = 1e-12;

/// A dense matrix with its singular value decomposition and a column basis
/// of its range.
struct LinearMap {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd singular_values;
  Eigen::Index rank = 0;
  /// Orthonormal bases: kernel is n x (n - rank), range is m x rank.
  Eigen::MatrixXd kernel;
  Eigen::MatrixXd range;
  /// Right singular vectors of the nonzero singular values (n x rank).
  Eigen::MatrixXd row_space;
  /// Independent columns of the matrix: v_j = e_{pivots[j]}, w_j = L v_j.
  std::vector<Eigen::Index> pivots;
  Eigen::MatrixXd preimages;
  Eigen::MatrixXd images;
  double norm = 0.0;
  /// 1e-10 * ||L||, floored so that the zero map still has a tolerance.
  double tol = 0.0;

  [[nodiscard]] Eigen::Index rows() const { return matrix.rows(); }
  [[nodiscard]] Eigen::Index cols() const { return matrix.cols(); }
  [[nodiscard]] bool in_range(const Eigen::VectorXd& t) const;
};

LinearMap decompose(const Eigen::MatrixXd& l, double tol_rank = kRankTolerance);

/// A magnitude together with the constant kappa of
/// S(a u + b v) <= kappa (|a| S(u) + |b| S(v)).
struct GaugeSpec {
  std::string name;
  Magnitude s;
  double kappa = 1.0;
  bool euclidean = false;
  /// Polytopal unit ball, when S is its gauge.
  std::optional<GaugeSet> polytope;
};

GaugeSpec euclidean_gauge();
GaugeSpec polytope_gauge(std::string name, GaugeSet c, double kappa = 1.0);
GaugeSpec custom_gauge(std::string name, Magnitude s, double kappa = 1.0);

struct LipschitzCertificate {
  double kappa = 1.0;
  double tau = 1.0;
  double eta = 0.0;
  double sigma = 0.0;
  double constant = 0.0;
  /// "norm", "exact_euclidean", "exact_vertices" or "sampled".
  std::string eta_mode;
  double inflation = 1.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

enum class EgiKind { pseudo_inverse, restricted_inverse, custom };
std::string to_string(EgiKind k);

/// Extended generalized inverse: for t in the range, L(apply(t)) = t.
struct EGI {
  EgiKind kind = EgiKind::pseudo_inverse;
  std::shared_ptr<const LinearMap> map;
  /// Matrix form when the inverse is linear.
  std::optional<Eigen::MatrixXd> matrix;
  std::function<Point(const Eigen::VectorXd&)> fn;
  LipschitzCertificate cert;

  /// Throws InputError when t is outside the range.
  [[nodiscard]] Point apply(const Eigen::VectorXd& t) const;
};

EGI pseudo_inverse(const LinearMap& l);

struct EgiOptions {
  std::size_t eta_samples = 100000;
  double inflation = 1.1;
  std::uint64_t seed = 0xe61;
};

/// L_V^{-1} on the span of the pivot columns, with the kappa-sigma
/// certificate for S_X(L~y - L~z) <= kappa sigma S_Y(y - z).
EGI restricted_inverse_egi(const LinearMap& l, const GaugeSpec& s_x, const GaugeSpec& s_y,
                           const EgiOptions& opt = {});

/// An EGI given by an arbitrary map; its right-inverse property is checked on
/// use, not on construction.
EGI custom_egi(const LinearMap& l, std::function<Point(const Eigen::VectorXd&)> fn, double constant = 0.0);

/// Residuals of the four Penrose identities and of L+ L = I - P_kernel.
struct PenroseResiduals {
  double lpl = 0.0;
  double plp = 0.0;
  double lp_sym = 0.0;
  double pl_sym = 0.0;
  double projector = 0.0;
  [[nodiscard]] double worst() const;
};

PenroseResiduals penrose_residuals(const LinearMap& l, const Eigen::MatrixXd& pinv);

/// {x : L x = t} as a slab: the particular solution with no kernel component
/// plus a kernel box of half-width box_scale * (1 + ||L~|| ||t||).  Sets that
/// are compared with each other must share one box, so comparisons use the
/// two-argument member with a common half-width.
class AffineFamily {
 public:
  AffineFamily(LinearMap l, EGI egi, double box_scale = 1e3);

  [[nodiscard]] SetModel member(const Eigen::VectorXd& t) const;
  [[nodiscard]] SetModel member(const Eigen::VectorXd& t, double half_width) const;
  [[nodiscard]] const LinearMap& map() const { return *map_; }
  [[nodiscard]] const EGI& egi() const { return egi_; }
  [[nodiscard]] double half_width(const Eigen::VectorXd& t) const;
  /// Members share the box of half-width box_scale.  The Hausdorff rate is
  /// the EGI constant, valid when d_i is the Euclidean parameter distance.
  [[nodiscard]] ParamFamily as_family(PseudoDistance d_i) const;

 private:
  std::shared_ptr<const LinearMap> map_;
  EGI egi_;
  double box_scale_;
  double egi_norm_;
};

struct HoffmanRow {
  Eigen::VectorXd s, t;
  ExtendedReal d_h;
  EvalMode mode = EvalMode::exact;
  ExtendedReal bound;
  ExtendedReal slack;
  double translation_residual = 0.0;
  bool pass = true;
};

struct HoffmanReport {
  std::vector<HoffmanRow> rows;
  bool all_pass = true;
  double alpha = 0.0;
};

inline constexpr double kHoffmanTolerance = 1e-9;

/// D_H(A_s, A_t) <= max{alpha S(s - t), alpha S(t - s)} with alpha the EGI
/// certificate constant.
HoffmanReport hoffman_check(const AffineFamily& f, const GaugeSpec& s_y,
                            std::span<const std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs,
                            double tol = kHoffmanTolerance);

/// D_H(A_s, A_t) <= max{nu(s, t), nu(t, s)}.
HoffmanReport hoffman_check_nu(const AffineFamily& f,
                               const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& nu,
                               std::span<const std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs,
                               double tol = kHoffmanTolerance);

/// Hypotheses the whole-space example needs that cannot be read off the
/// objective.
struct WholeSpaceHypotheses {
  bool f_bounded_below = true;
};

struct WholeSpaceReport {
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> lipschitz_constant;
  std::vector<std::pair<double, ExtendedReal>> phi;
  LimsupReport continuity;
  std::optional<LipschitzReport> lipschitz;
  bool pass = true;
};

/// phi_*(t) = inf{f(x) : L x = t} with the parameter distance induced by
/// s_y; L must have one-dimensional range.
WholeSpaceReport example_whole_space(const ObjectiveFn& f, const Eigen::MatrixXd& l, const GaugeSpec& s_y,
                                     std::span<const double> probes, const WholeSpaceHypotheses& hyp = {});

struct MixedProbe {
  Eigen::VectorXd t;
  bool admissible = false;
  std::string reason;
  ExtendedReal phi;
  ExtendedReal d_h_to_base;
  bool ball_inside = false;
};

struct MixedReport {
  std::vector<MixedProbe> probes;
  LimsupReport set_continuity;
  LimsupReport value_continuity;
  std::size_t midpoint_checks = 0;
  std::size_t midpoint_failures = 0;
  std::size_t openness_failures = 0;
  bool pass = true;
};

/// A_t = {x : L x = t} cut by a compact polytope C, for L with a
/// one-dimensional kernel.  Probes whose slice misses the interior of C are
/// excluded with a reason.
MixedReport example_mixed_constraints(const ObjectiveFn& f, const Eigen::MatrixXd& l, const HalfspaceBody& c,
                                      std::span<const Eigen::VectorXd> probes, const Eigen::VectorXd& base,
                                      double eps = 0.1);

/// Exact slice {x in C : L x = t} as a segment slab, or nullopt when the
/// slice misses the interior of C.
std::optional<AffineSlab> interior_slice(const LinearMap& l, const HalfspaceBody& c, const Eigen::VectorXd& t);

/// Dense matrix from delimited text (one row per line, comma or whitespace
/// separated).
Eigen::MatrixXd parse_matrix(const std::string& text);

}  // namespace optstab
