#include "optstab/linear.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "optstab/errors.hpp"

namespace optstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Eigen::Index> independent_columns(const Eigen::MatrixXd& l, Eigen::Index rank) {
  std::vector<Eigen::Index> out;
  if (rank == 0) return out;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(l);
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index j = 0; j < rank; ++j) out.push_back(perm[j]);
  Eigen::MatrixXd sel(l.rows(), rank);
  for (Eigen::Index j = 0; j < rank; ++j) sel.col(j) = l.col(out[static_cast<std::size_t>(j)]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sel);
  const auto& sv = svd.singularValues();
  if (sv.size() == rank && sv[rank - 1] > kRankTolerance * sv[0]) return out;

  // pivoting disagreed with the SVD rank; fall back to greedy selection
  out.clear();
  Eigen::MatrixXd basis(l.rows(), 0);
  for (Eigen::Index j = 0; j < l.cols() && static_cast<Eigen::Index>(out.size()) < rank; ++j) {
    Eigen::MatrixXd trial(l.rows(), basis.cols() + 1);
    trial << basis, l.col(j);
    Eigen::JacobiSVD<Eigen::MatrixXd> s(trial);
    const auto& v = s.singularValues();
    if (v[v.size() - 1] > kRankTolerance * std::max(v[0], 1e-300)) {
      basis = trial;
      out.push_back(j);
    }
  }
  if (static_cast<Eigen::Index>(out.size()) != rank) throw InconsistencyError("decompose: cannot select range basis");
  return out;
}

double positive_or_throw(ExtendedReal v, const std::string& what) {
  if (v.is_pos_inf()) return kInf;
  if (!(v > ExtendedReal(0.0))) throw HypothesisError(what);
  return v.value();
}

}  // namespace

bool LinearMap::in_range(const Eigen::VectorXd& t) const {
  if (t.size() != matrix.rows()) return false;
  const Eigen::VectorXd proj = rank > 0 ? Eigen::VectorXd(range * (range.transpose() * t)) : Eigen::VectorXd::Zero(t.size());
  return (t - proj).norm() <= 1e-10 * (1.0 + t.norm());
}

LinearMap decompose(const Eigen::MatrixXd& l, double tol_rank) {
  if (l.rows() < 1 || l.cols() < 1) throw InputError("decompose: empty matrix");
  if (!l.allFinite()) throw InputError("decompose: non-finite entries");
  LinearMap out;
  out.matrix = l;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(l, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values.size() ? out.singular_values[0] : 0.0;
  out.rank = 0;
  if (smax > 0.0)
    for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
      if (out.singular_values[i] > tol_rank * smax) ++out.rank;
  const Eigen::Index n = l.cols(), r = out.rank;
  out.kernel = svd.matrixV().rightCols(n - r);
  out.range = svd.matrixU().leftCols(r);
  out.row_space = svd.matrixV().leftCols(r);
  out.pivots = independent_columns(l, r);
  out.preimages = Eigen::MatrixXd::Zero(n, r);
  out.images.resize(l.rows(), r);
  for (Eigen::Index j = 0; j < r; ++j) {
    out.preimages(out.pivots[static_cast<std::size_t>(j)], j) = 1.0;
    out.images.col(j) = l.col(out.pivots[static_cast<std::size_t>(j)]);
  }
  out.norm = smax;
  out.tol = 1e-10 * std::max(smax, std::numeric_limits<double>::min());
  return out;
}

GaugeSpec euclidean_gauge() { return {"euclidean", euclidean_norm(), 1.0, true, std::nullopt}; }

GaugeSpec polytope_gauge(std::string name, GaugeSet c, double kappa) {
  auto s = c.as_magnitude();
  return {std::move(name), std::move(s), kappa, false, std::move(c)};
}

GaugeSpec custom_gauge(std::string name, Magnitude s, double kappa) {
  return {std::move(name), std::move(s), kappa, false, std::nullopt};
}

std::string to_string(EgiKind k) {
  switch (k) {
    case EgiKind::pseudo_inverse: return "pseudo_inverse";
    case EgiKind::restricted_inverse: return "restricted_inverse";
    case EgiKind::custom: return "custom";
  }
  return "unknown";
}

Point EGI::apply(const Eigen::VectorXd& t) const {
  if (!map->in_range(t)) throw InputError("EGI::apply: parameter is outside the range of L");
  return fn(t);
}

EGI pseudo_inverse(const LinearMap& l) {
  EGI e;
  e.kind = EgiKind::pseudo_inverse;
  e.map = std::make_shared<const LinearMap>(l);
  const Eigen::Index r = l.rank;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(l.cols(), l.rows());
  if (r > 0) {
    const Eigen::VectorXd inv = l.singular_values.head(r).cwiseInverse();
    p = l.row_space * inv.asDiagonal() * l.range.transpose();
  }
  e.matrix = p;
  e.fn = [p](const Eigen::VectorXd& t) -> Point { return p * t; };
  e.cert.eta_mode = "norm";
  e.cert.constant = r > 0 ? 1.0 / l.singular_values[r - 1] : 0.0;
  return e;
}

EGI restricted_inverse_egi(const LinearMap& l, const GaugeSpec& s_x, const GaugeSpec& s_y, const EgiOptions& opt) {
  if (l.rank == 0) throw HypothesisError("restricted_inverse_egi: range of L is {0}");
  const Eigen::Index r = l.rank, m = l.rows();
  const Eigen::MatrixXd tinv = l.images.completeOrthogonalDecomposition().pseudoInverse();

  EGI e;
  e.kind = EgiKind::restricted_inverse;
  e.map = std::make_shared<const LinearMap>(l);
  const Eigen::MatrixXd mat = l.preimages * tinv;
  e.matrix = mat;
  e.fn = [mat](const Eigen::VectorXd& t) -> Point { return mat * t; };

  auto& c = e.cert;
  c.kappa = s_x.kappa;
  c.tau = r == 1 ? c.kappa : std::max(c.kappa, std::pow(c.kappa, static_cast<double>(r - 1)));
  double sum = 0.0;
  for (Eigen::Index j = 0; j < r; ++j) {
    const auto v = s_x.s(Point(l.preimages.col(j)));
    if (!v.is_finite()) throw HypothesisError("restricted_inverse_egi: S_X is infinite on a preimage basis vector");
    sum += v.value();
  }

  c.inflation = 1.0;
  if (s_y.euclidean) {
    const Eigen::MatrixXd k = tinv * l.range;
    c.eta = k.rowwise().norm().maxCoeff();
    c.eta_mode = "exact_euclidean";
  } else if (s_y.polytope && s_y.polytope->halfspaces() && r == m) {
    const auto verts = polytope_vertices(*s_y.polytope->halfspaces());
    if (verts.empty()) throw HypothesisError("restricted_inverse_egi: S_Y unit ball is not a bounded polytope");
    c.eta = 0.0;
    for (const auto& v : verts) c.eta = std::max(c.eta, (tinv * v).cwiseAbs().maxCoeff());
    c.eta_mode = "exact_vertices";
    c.samples = verts.size();
  } else {
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double eta = 0.0;
    for (std::size_t i = 0; i < opt.eta_samples; ++i) {
      Eigen::VectorXd y(r);
      for (Eigen::Index j = 0; j < r; ++j) y[j] = gauss(rng);
      const Eigen::VectorXd u = l.range * y;
      const double g = positive_or_throw(s_y.s(u), "restricted_inverse_egi: S_Y vanishes on a nonzero range point");
      if (std::isinf(g)) continue;
      eta = std::max(eta, (tinv * (u / g)).cwiseAbs().maxCoeff());
    }
    c.eta = eta * opt.inflation;
    c.inflation = opt.inflation;
    c.samples = opt.eta_samples;
    c.seed = opt.seed;
    c.eta_mode = "sampled";
  }
  for (Eigen::Index j = 0; j < r; ++j)
    for (double sign : {1.0, -1.0})
      positive_or_throw(s_y.s(Eigen::VectorXd(sign * l.range.col(j))),
                        "restricted_inverse_egi: S_Y vanishes on a nonzero range point");
  c.sigma = c.tau * c.eta * sum;
  c.constant = c.kappa * c.sigma;
  return e;
}

EGI custom_egi(const LinearMap& l, std::function<Point(const Eigen::VectorXd&)> fn, double constant) {
  EGI e;
  e.kind = EgiKind::custom;
  e.map = std::make_shared<const LinearMap>(l);
  e.fn = std::move(fn);
  e.cert.constant = constant;
  e.cert.eta_mode = "declared";
  return e;
}

double PenroseResiduals::worst() const { return std::max({lpl, plp, lp_sym, pl_sym, projector}); }

PenroseResiduals penrose_residuals(const LinearMap& l, const Eigen::MatrixXd& p) {
  const auto& a = l.matrix;
  PenroseResiduals r;
  r.lpl = (a * p * a - a).norm();
  r.plp = (p * a * p - p).norm();
  const Eigen::MatrixXd ap = a * p, pa = p * a;
  r.lp_sym = (ap - ap.transpose()).norm();
  r.pl_sym = (pa - pa.transpose()).norm();
  const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(a.cols(), a.cols()) - l.kernel * l.kernel.transpose();
  r.projector = (pa - proj).norm();
  return r;
}

AffineFamily::AffineFamily(LinearMap l, EGI egi, double box_scale)
    : map_(std::make_shared<const LinearMap>(std::move(l))), egi_(std::move(egi)), box_scale_(box_scale) {
  if (!(box_scale_ > 0.0)) throw InputError("AffineFamily: box scale must be positive");
  egi_norm_ = egi_.matrix ? egi_.matrix->operatorNorm() : egi_.cert.constant;
}

double AffineFamily::half_width(const Eigen::VectorXd& t) const { return box_scale_ * (1.0 + egi_norm_ * t.norm()); }

SetModel AffineFamily::member(const Eigen::VectorXd& t) const { return member(t, half_width(t)); }

SetModel AffineFamily::member(const Eigen::VectorXd& t, double h) const {
  if (!map_->in_range(t)) throw InputError("AffineFamily: parameter is outside the range of L");
  if (!(h > 0.0)) throw InputError("AffineFamily: box half-width must be positive");
  Point p = egi_.apply(t);
  const auto& nk = map_->kernel;
  if (nk.cols() > 0) p -= nk * (nk.transpose() * p);
  return AffineSlab{p, nk, Eigen::VectorXd::Constant(nk.cols(), -h), Eigen::VectorXd::Constant(nk.cols(), h)};
}

ParamFamily AffineFamily::as_family(PseudoDistance d_i) const {
  const double alpha = egi_.cert.constant;
  ParamFamily f{.d_i = std::move(d_i),
                .member = [self = *this, h = box_scale_](const Param& t) { return self.member(t, h); },
                .hausdorff_rate = [alpha](const Param&, const Param&) { return alpha; },
                .global_rate = alpha};
  return f;
}

namespace {

HoffmanReport hoffman_core(const AffineFamily& f,
                           const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& bound,
                           std::span<const std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs, double tol) {
  HoffmanReport rep;
  const auto d = euclidean_distance();
  const auto& lm = f.map();
  const SetModel base = f.member(Eigen::VectorXd::Zero(lm.rows()));
  std::vector<Point> kernel_pts;
  if (const auto* s = base.get<AffineSlab>(); s->kernel.cols() <= 3)
    kernel_pts = slab_corners(*s);
  else
    kernel_pts = sample_points(base, 8, 7);
  kernel_pts.push_back(base.witness());

  for (const auto& [s, t] : pairs) {
    HoffmanRow row;
    row.s = s;
    row.t = t;
    const double h = std::max(f.half_width(s), f.half_width(t));
    const auto dh = hausdorff(d, f.member(s, h), f.member(t, h));
    row.d_h = dh.value;
    row.mode = dh.mode;
    const double b = bound(s, t);
    row.bound = b;
    row.slack = ExtendedReal(b + tol * (1.0 + std::abs(b))) - row.d_h;
    const Point lt = f.egi().apply(t);
    for (const auto& x : kernel_pts) {
      const double res = (lm.matrix * (x + lt) - t).norm();
      row.translation_residual = std::max(row.translation_residual, res / ((1.0 + lm.norm) * (1.0 + x.norm() + t.norm())));
    }
    row.pass = row.slack >= ExtendedReal(0.0) && row.translation_residual <= 1e-9;
    rep.all_pass = rep.all_pass && row.pass;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace

HoffmanReport hoffman_check(const AffineFamily& f, const GaugeSpec& s_y,
                            std::span<const std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs, double tol) {
  const double alpha = f.egi().cert.constant;
  auto bound = [&](const Eigen::VectorXd& s, const Eigen::VectorXd& t) {
    const Eigen::VectorXd st = s - t, ts = t - s;
    const auto v = max(alpha * s_y.s(st), alpha * s_y.s(ts));
    return v.value();
  };
  auto rep = hoffman_core(f, bound, pairs, tol);
  rep.alpha = alpha;
  return rep;
}

HoffmanReport hoffman_check_nu(const AffineFamily& f,
                               const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& nu,
                               std::span<const std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs, double tol) {
  return hoffman_core(f, [&](const auto& s, const auto& t) { return std::max(nu(s, t), nu(t, s)); }, pairs, tol);
}

WholeSpaceReport example_whole_space(const ObjectiveFn& f, const Eigen::MatrixXd& l, const GaugeSpec& s_y,
                                     std::span<const double> probes, const WholeSpaceHypotheses& hyp) {
  if (!hyp.f_bounded_below) throw HypothesisError("example_whole_space: missing hypothesis 'f bounded below'");
  if (s_y.s(Eigen::VectorXd::Zero(1)) != ExtendedReal(0.0))
    throw HypothesisError("example_whole_space: missing hypothesis 'S(0) = 0'");
  if (probes.empty()) throw InputError("example_whole_space: no probe parameters");
  const LinearMap lm = decompose(l);
  if (lm.rows() != 1 || lm.rank != 1) throw InputError("example_whole_space: L must map onto the real line");
  const EGI egi = pseudo_inverse(lm);

  WholeSpaceReport rep;
  // positive homogeneity reduces both suprema to the directions +1 and -1
  const Eigen::VectorXd plus = Eigen::VectorXd::Constant(1, 1.0), minus = Eigen::VectorXd::Constant(1, -1.0);
  const double sp = positive_or_throw(s_y.s(plus), "example_whole_space: S vanishes on a nonzero parameter");
  const double sm = positive_or_throw(s_y.s(minus), "example_whole_space: S vanishes on a nonzero parameter");
  rep.alpha = std::max(egi.apply(plus).norm() / sp, egi.apply(minus).norm() / sm);
  rep.beta = std::max(sm / sp, sp / sm);
  if (!std::isfinite(rep.beta))
    throw HypothesisError("example_whole_space: missing hypothesis 'conjugate magnitude continuous at 0'");

  const AffineFamily fam(lm, egi);
  ParamFamily pf = fam.as_family(magnitude_distance("S_Y", s_y.s, 1));
  pf.global_rate = rep.alpha * std::max(1.0, rep.beta);
  ValueFunction v{ValueMode::inf, pf, f};

  std::vector<Param> ps;
  for (double t : probes) {
    ps.push_back(Param::Constant(1, t));
    rep.phi.emplace_back(t, eval_value_function(v, ps.back()).value);
  }
  std::vector<Param> near(ps.begin() + 1, ps.end());
  for (int k = 1; k <= kDeltaLevels; ++k)
    for (double sign : {1.0, -1.0}) near.push_back(ps.front() + Param::Constant(1, sign * std::ldexp(1.0, -k)));
  rep.continuity = empirical_value_continuity(v, ps.front(), near, 0.1);
  if (const auto* lip = std::get_if<Lipschitz>(&f.regularity)) {
    rep.lipschitz_constant = *pf.global_rate * lip->lambda;
    std::vector<std::pair<Param, Param>> pairs;
    for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
      pairs.emplace_back(ps[i], ps[i + 1]);
      pairs.emplace_back(ps[i + 1], ps[i]);
    }
    rep.lipschitz = certify_value_lipschitz(v, pairs);
    rep.pass = rep.lipschitz->all_pass;
  }
  rep.pass = rep.pass && rep.continuity.verdict != "inconclusive";
  return rep;
}

std::optional<AffineSlab> interior_slice(const LinearMap& l, const HalfspaceBody& c, const Eigen::VectorXd& t) {
  if (l.kernel.cols() != 1) throw InputError("interior_slice: L must have a one-dimensional kernel");
  if (c.normals.cols() != l.cols()) throw InputError("interior_slice: body dimension mismatch");
  if (!l.in_range(t)) return std::nullopt;
  const Point p = pseudo_inverse(l).apply(t);
  const Point dir = l.kernel.col(0);
  double lo = -kInf, hi = kInf;
  for (Eigen::Index i = 0; i < c.normals.rows(); ++i) {
    const double coef = c.normals.row(i).dot(dir);
    const double rhs = c.offsets[i] - c.normals.row(i).dot(p);
    const double scale = 1e-14 * (1.0 + c.normals.row(i).norm() * (1.0 + p.norm()));
    if (std::abs(coef) <= scale) {
      if (rhs <= scale) return std::nullopt;
      continue;
    }
    if (coef > 0) hi = std::min(hi, rhs / coef);
    else lo = std::max(lo, rhs / coef);
  }
  if (std::isinf(lo) || std::isinf(hi)) throw InputError("interior_slice: C must be bounded");
  if (!(hi - lo > 1e-12 * (1.0 + std::abs(lo) + std::abs(hi)))) return std::nullopt;
  Eigen::MatrixXd k(dir.size(), 1);
  k.col(0) = dir;
  return AffineSlab{p, k, Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi)};
}

MixedReport example_mixed_constraints(const ObjectiveFn& f, const Eigen::MatrixXd& l, const HalfspaceBody& c,
                                      std::span<const Eigen::VectorXd> probes, const Eigen::VectorXd& base,
                                      double eps) {
  const LinearMap lm = decompose(l);
  auto slice = [&](const Eigen::VectorXd& t) { return interior_slice(lm, c, t); };
  const auto base_slice = slice(base);
  if (!base_slice) throw HypothesisError("example_mixed_constraints: base parameter has no interior feasible point");
  const SetModel a_base(*base_slice);
  const auto d = euclidean_distance();

  ParamFamily pf{.d_i = euclidean_distance(lm.rows()), .member = [slice](const Param& t) -> SetModel {
                   auto s = slice(t);
                   if (!s) throw InputError("parameter outside the admissible set I");
                   return *s;
                 }};
  ValueFunction v{ValueMode::inf, pf, f};

  MixedReport rep;
  std::vector<Param> admissible;
  for (const auto& t : probes) {
    MixedProbe row;
    row.t = t;
    const auto s = slice(t);
    if (!s) {
      row.reason = lm.in_range(t) ? "slice misses the interior of C" : "outside the range of L";
      rep.probes.push_back(std::move(row));
      continue;
    }
    row.admissible = true;
    row.phi = inf_over(f, *s).value;
    row.d_h_to_base = hausdorff(d, a_base, *s).value;
    const double r = 1e-3 * (1.0 + t.norm());
    row.ball_inside = true;
    for (Eigen::Index i = 0; i < t.size(); ++i)
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd u = t;
        u[i] += sign * r;
        if (lm.in_range(u) && !slice(u)) row.ball_inside = false;
      }
    if (!row.ball_inside) ++rep.openness_failures;
    admissible.push_back(t);
    rep.probes.push_back(std::move(row));
  }
  for (std::size_t i = 0; i + 1 < admissible.size(); ++i) {
    ++rep.midpoint_checks;
    if (!slice(0.5 * (admissible[i] + admissible[i + 1]))) ++rep.midpoint_failures;
  }
  rep.set_continuity = empirical_hausdorff_limsup(pf, base, admissible, eps);
  rep.value_continuity = empirical_value_continuity(v, base, admissible, eps);
  rep.pass = rep.openness_failures == 0 && rep.midpoint_failures == 0 && rep.set_continuity.verdict == "holds" &&
             rep.value_continuity.verdict == "holds";
  return rep;
}

Eigen::MatrixXd parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw InputError("parse_matrix: bad number '" + tok + "'");
      }
      if (used != tok.size()) throw InputError("parse_matrix: bad number '" + tok + "'");
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("parse_matrix: no rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw InputError("parse_matrix: ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

}  // namespace optstab
