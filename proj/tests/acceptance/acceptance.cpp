#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "optstab/gauge.hpp"
#include "optstab/instances.hpp"
#include "optstab/ladder.hpp"
#include "optstab/linear.hpp"
#include "optstab/optima.hpp"
#include "optstab/scheme.hpp"
#include "optstab/sets.hpp"

using namespace optstab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.detail = why;
  o.pass = false;
}

bool report(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs >= limit_s) fail(o, "runtime " + std::to_string(secs) + " s over the limit");
  std::printf("%s %d %s (%.2f s)%s%s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), secs, o.detail.empty() ? "" : ": ",
              o.detail.c_str());
  std::fflush(stdout);
  return o.pass;
}

// Grid of step h on each interval, both endpoints included where closed.
std::vector<double> grid_1d(const SetModel& a, double h) {
  std::vector<double> out;
  for (const auto& p : a.get<IntervalUnion>()->pieces) {
    const auto n = static_cast<long>(std::floor((p.hi - p.lo) / h));
    for (long i = 0; i <= n; ++i) out.push_back(p.lo + i * h);
    if (p.hi_closed && out.back() < p.hi) out.push_back(p.hi);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// sup_{x in a} min_{y in b} |x - y| for sorted inputs, by a two-pointer sweep.
double directed_sorted(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  std::size_t j = 0;
  for (double x : a) {
    while (j + 1 < b.size() && b[j + 1] <= x) ++j;
    double d = std::abs(x - b[j]);
    if (j + 1 < b.size()) d = std::min(d, std::abs(b[j + 1] - x));
    worst = std::max(worst, d);
  }
  return worst;
}

double brute_hausdorff_1d(const std::vector<double>& a, const std::vector<double>& b) {
  return std::max(directed_sorted(a, b), directed_sorted(b, a));
}

Outcome criterion_ce33() {
  Outcome o;
  constexpr int kK = 60;
  const auto f = ce33_objective(kK);
  const auto a = ce33_set(kK);
  const auto d = absolute_distance();
  if (inf_over(f, a).value != ExtendedReal(0.0) || sup_over(f, a).value != ExtendedReal(0.0))
    fail(o, "INF_f(A) or SUP_f(A) is not 0");
  const auto ga = grid_1d(a, 1e-4);
  for (int j = 2; j <= 50; ++j) {
    const auto aj = ce33_perturbed(kK, j);
    if (inf_over(f, aj).value != ExtendedReal(-1.0)) fail(o, "INF_f(A_" + std::to_string(j) + ") != -1");
    if (sup_over(f, aj).value != ExtendedReal(1.0)) fail(o, "SUP_f(A_" + std::to_string(j) + ") != 1");
    const double exact = hausdorff(d, a, aj).value.value();
    if (std::abs(exact - 1.0 / j) > 1e-12) fail(o, "closed-form D_H off at j=" + std::to_string(j));
    const double brute = brute_hausdorff_1d(ga, grid_1d(aj, 1e-4));
    if (std::abs(brute - 1.0 / j) > 1e-3) fail(o, "grid D_H off at j=" + std::to_string(j));
  }
  return o;
}

Outcome criterion_ce34() {
  Outcome o;
  constexpr int kK = 60;
  constexpr double kStep = 1e-4;
  const auto f = ce34_objective(kK);
  const auto a = ce34_set(kK);
  const auto d = euclidean_distance(kK);
  if (inf_over(f, a).value != ExtendedReal(0.0) || sup_over(f, a).value != ExtendedReal(0.0))
    fail(o, "INF_f(A) or SUP_f(A) is not 0");
  double prev_grid = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= 50; ++j) {
    const auto aj = ce34_perturbed(kK, j);
    if (inf_over(f, aj).value != ExtendedReal(-1.0)) fail(o, "INF_f(A_" + std::to_string(j) + ") != -1");
    if (sup_over(f, aj).value != ExtendedReal(1.0)) fail(o, "SUP_f(A_" + std::to_string(j) + ") != 1");
    const double exact = hausdorff(d, a, aj).value.value();
    if (std::abs(exact - 1.0 / j) > 1e-12) fail(o, "closed-form D_H off at j=" + std::to_string(j));
    // Grid version.  A subset of A_j, so only the A_j -> A direction is
    // nonzero; a grid point s e_a is nearest to the grid of A on its own
    // axis, because points u e_b of other axes are at sqrt(s^2 + u^2) >= s.
    double grid = 0.0;
    const double c = 1.0 + 1.0 / j;
    for (long i = 0; i * kStep < c; ++i) {
      const double s = i * kStep;
      const double own = s <= 1.0 ? 0.0 : s - 1.0;
      grid = std::max(grid, std::min(own, s));
    }
    if (!(grid < prev_grid)) fail(o, "grid D_H not strictly decreasing at j=" + std::to_string(j));
    if (std::abs(grid - 1.0 / j) > 1e-3) fail(o, "grid D_H off at j=" + std::to_string(j));
    prev_grid = grid;
  }
  return o;
}

struct Pl {
  std::vector<double> xs, ys;
  double operator()(double x) const {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const auto i = static_cast<std::size_t>(it - xs.begin());
    const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + w * (ys[i] - ys[i - 1]);
  }
};

Outcome criterion_lipschitz_transfer() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto d = absolute_distance();
  int violations = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const double lambda = 0.1 + 9.9 * unit(rng);
    const int breaks = 2 + static_cast<int>(rng() % 20);
    Pl p;
    for (int i = 0; i < breaks; ++i) p.xs.push_back(100.0 * unit(rng));
    std::sort(p.xs.begin(), p.xs.end());
    p.xs.erase(std::unique(p.xs.begin(), p.xs.end()), p.xs.end());
    p.ys.push_back(50.0 * unit(rng));
    for (std::size_t i = 1; i < p.xs.size(); ++i)
      p.ys.push_back(p.ys.back() + lambda * (2.0 * unit(rng) - 1.0) * (p.xs[i] - p.xs[i - 1]));
    const auto f = piecewise_linear(p.xs, p.ys);

    auto random_cloud = [&] {
      std::vector<double> xs(1 + rng() % 30);
      for (auto& x : xs) x = 100.0 * unit(rng);
      return xs;
    };
    const auto xa = random_cloud(), xb = random_cloud();
    auto to_set = [](const std::vector<double>& xs) {
      std::vector<Point> pts;
      for (double x : xs) pts.push_back(pt({x}));
      return cloud(std::move(pts));
    };
    const auto a = to_set(xa), b = to_set(xb);

    double sup_a = -1e300, sup_b = -1e300, inf_a = 1e300, inf_b = 1e300;
    for (double x : xa) sup_a = std::max(sup_a, p(x)), inf_a = std::min(inf_a, p(x));
    for (double x : xb) sup_b = std::max(sup_b, p(x)), inf_b = std::min(inf_b, p(x));
    double dab = 0.0, dba = 0.0;
    for (double x : xa) {
      double m = 1e300;
      for (double y : xb) m = std::min(m, std::abs(x - y));
      dab = std::max(dab, m);
    }
    for (double y : xb) {
      double m = 1e300;
      for (double x : xa) m = std::min(m, std::abs(x - y));
      dba = std::max(dba, m);
    }
    const double dh = std::max(dab, dba);

    const double lib_sup_a = sup_over(f, a).value.value(), lib_sup_b = sup_over(f, b).value.value();
    const double lib_inf_a = inf_over(f, a).value.value(), lib_inf_b = inf_over(f, b).value.value();
    const double lib_dh = hausdorff(d, a, b).value.value();
    const double scale = 1e-9 * (1.0 + std::abs(sup_a) + std::abs(sup_b));
    if (std::abs(lib_sup_a - sup_a) > scale || std::abs(lib_sup_b - sup_b) > scale ||
        std::abs(lib_inf_a - inf_a) > scale || std::abs(lib_inf_b - inf_b) > scale || lib_dh != dh)
      fail(o, "library disagrees with brute force at trial " + std::to_string(trial));
    if (std::abs(lib_sup_a - lib_sup_b) > lambda * lib_dh + 1e-9) ++violations;
    if (std::abs(lib_inf_a - lib_inf_b) > lambda * lib_dh + 1e-9) ++violations;
  }
  if (violations) fail(o, std::to_string(violations) + " violations");
  return o;
}

Eigen::MatrixXd random_rank(std::mt19937_64& rng, int m, int n, int r) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(m, r), b(r, n);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < r; ++k) a(i, k) = g(rng);
  for (int k = 0; k < r; ++k)
    for (int j = 0; j < n; ++j) b(k, j) = g(rng);
  return a * b;
}

Outcome criterion_penrose() {
  Outcome o;
  std::mt19937_64 rng(42);
  std::normal_distribution<double> g;
  double worst_penrose = 0.0, worst_egi = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 8), n = 1 + static_cast<int>(rng() % 8);
    const int r = 1 + static_cast<int>(rng() % static_cast<unsigned>(std::min(m, n)));
    const auto lm = decompose(random_rank(rng, m, n, r));
    const auto pinv = pseudo_inverse(lm);
    const double res = penrose_residuals(lm, *pinv.matrix).worst();
    worst_penrose = std::max(worst_penrose, res / (1.0 + lm.norm));
    if (res >= 1e-9 * (1.0 + lm.norm)) fail(o, "Penrose residual at trial " + std::to_string(trial));
    const auto restricted = restricted_inverse_egi(lm, euclidean_gauge(), euclidean_gauge());
    for (int i = 0; i < 200; ++i) {
      Eigen::VectorXd x(n);
      for (int k = 0; k < n; ++k) x[k] = g(rng);
      const Eigen::VectorXd t = lm.matrix * x;
      for (const EGI* e : {&pinv, &restricted}) {
        const double rd = (lm.matrix * e->apply(t) - t).norm();
        worst_egi = std::max(worst_egi, rd);
        if (rd >= 1e-9) fail(o, "EGI residual " + std::to_string(rd) + " at trial " + std::to_string(trial));
      }
    }
  }
  if (o.pass) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "worst Penrose %.3g, worst EGI %.3g", worst_penrose, worst_egi);
    o.detail = buf;
  }
  return o;
}

Outcome criterion_hoffman() {
  Outcome o;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  int violations = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 4), n = 1 + static_cast<int>(rng() % 5);
    const int r = 1 + static_cast<int>(rng() % static_cast<unsigned>(std::min(m, n)));
    const auto lm = decompose(random_rank(rng, m, n, r));
    const AffineFamily fam(lm, pseudo_inverse(lm));
    Eigen::VectorXd x(n), y(n);
    for (int k = 0; k < n; ++k) x[k] = g(rng), y[k] = g(rng);
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs{{lm.matrix * x, lm.matrix * y}};
    const auto rep = hoffman_check(fam, euclidean_gauge(), pairs);
    if (!rep.all_pass) ++violations;
  }
  if (violations) fail(o, std::to_string(violations) + " violations");

  Eigen::MatrixXd row(1, 2);
  row << 1, 0;
  const auto lm = decompose(row);
  const AffineFamily fam(lm, pseudo_inverse(lm));
  const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs{
      {pt({0}), pt({1})}, {pt({-2}), pt({0.5})}, {pt({3}), pt({-1.25})}};
  const auto rep = hoffman_check(fam, euclidean_gauge(), pairs);
  for (const auto& r : rep.rows)
    if (std::abs(r.d_h.value() - r.bound.value()) > 1e-9) fail(o, "L = [1 0] bound is not tight");
  return o;
}

Outcome criterion_ladder() {
  Outcome o;
  std::vector<double> lambdas;
  for (int k = 1; k <= 10; ++k) lambdas.push_back(k);
  const auto res = build_ladder(quartic_problem(), lambdas);
  if (res.levels.size() != 10) fail(o, "expected 10 levels");
  for (const auto& l : res.levels) {
    if (std::abs(l.t - std::sqrt(l.lambda)) > 1e-6) fail(o, "t_k off at k=" + std::to_string(l.k));
    if (!l.verified || l.worst_ratio > l.lambda * (1.0 + 1e-6))
      fail(o, "gradient Lipschitz check failed at k=" + std::to_string(l.k));
  }
  return o;
}

Outcome criterion_scheme() {
  Outcome o;
  std::vector<int> ms;
  for (int m = 3; m <= 256; ++m) ms.push_back(m);
  const auto f = distance_objective(pt({2, 0}));
  SchemeInstance s{.name = "disk", .f = f, .levels = build_inner_polygon_family(ms), .inner = true};
  const auto cert = run_scheme(s);
  for (std::size_t i = 0; i < cert.rows.size(); ++i) {
    const auto& r = cert.rows[i];
    const int m = ms[i];
    if (std::abs(std::abs(r.sigma - 1.0) - (1.0 - std::cos(M_PI / m))) > 1e-12)
      fail(o, "|sigma - 1| off at m=" + std::to_string(m));
    if (!(r.lo <= 1.0 && 1.0 <= r.hi)) fail(o, "1 outside the bracket at m=" + std::to_string(m));
  }
  const auto& last = cert.rows.back();
  if (!(last.hi - last.lo < 7.6e-5)) fail(o, "final bracket too wide");
  if (!(cert.lo <= 1.0 && 1.0 <= cert.hi)) fail(o, "1 outside the final bracket");
  if (o.pass) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "final width %.6g", last.hi - last.lo);
    o.detail = buf;
  }
  return o;
}

Outcome criterion_gauge() {
  Outcome o;
  const auto c = segment_gauge_set();
  if (c.gauge(pt({3, 0})) != ExtendedReal(3.0)) fail(o, "M_C(3,0) != 3");
  if (c.gauge(pt({-4, 0})) != ExtendedReal(2.0)) fail(o, "M_C(-4,0) != 2");
  if (c.gauge(pt({1, 1})) != ExtendedReal::pos_inf()) fail(o, "M_C(1,1) != inf");

  const auto d = magnitude_distance("segment_gauge", c.as_magnitude(), 2);
  const auto f = gauge_step_objective();
  const auto* u = std::get_if<Uniform>(&f.regularity);
  if (!u) {
    fail(o, "step objective is not declared uniformly continuous");
    return o;
  }
  const double delta = u->delta(0.5);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> coord(-5.0, 5.0), shift(-3.0, 3.0);
  std::size_t close = 0;
  for (int i = 0; i < 10000; ++i) {
    const Point x = pt({coord(rng), coord(rng)});
    // half the pairs move along the segment direction, half move anywhere
    const Point y = i % 2 ? Point(x + pt({shift(rng) * delta, 0.0})) : pt({coord(rng), coord(rng)});
    if (d(x, y) < ExtendedReal(delta)) {
      ++close;
      if (f(x) != f(y)) fail(o, "f differs on a gauge-close pair");
    }
  }
  if (close < 1000) fail(o, "too few gauge-close pairs sampled");
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion_determinism() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("optstab_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(root);
  const std::vector<std::string> configs{"stability_random", "hoffman_random", "ladder_quartic",
                                         "hausdorff_disk_hexagon", "egi_line"};
  for (const auto& name : configs) {
    const fs::path cfg = fs::path(OPTSTAB_CONFIG_DIR) / (name + ".json");
    std::string tables[2];
    for (int run = 0; run < 2; ++run) {
      const fs::path out = root / (name + "_" + std::to_string(run));
      fs::create_directories(out);
      const std::string cmd = std::string("\"") + OPTSTAB_CLI_PATH + "\" run \"" + cfg.string() + "\" -o \"" +
                              out.string() + "\" > /dev/null 2>&1";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) fail(o, name + ": CLI exited with status " + std::to_string(rc));
      tables[run] = slurp(out / (name + ".csv"));
    }
    if (tables[0].empty()) fail(o, name + ": empty table");
    if (tables[0] != tables[1]) fail(o, name + ": tables differ between runs");
  }
  fs::remove_all(root);
  if (o.pass) o.detail = std::to_string(configs.size()) + " seeded configs byte-identical";
  return o;
}

}  // namespace

int main() {
  bool all = true;
  all &= report(1, "ce33 reproduction", 10, criterion_ce33);
  all &= report(2, "ce34 reproduction", 10, criterion_ce34);
  all &= report(3, "finite Lipschitz transfer", 30, criterion_lipschitz_transfer);
  all &= report(4, "Penrose and EGI identities", 20, criterion_penrose);
  all &= report(5, "Hoffman bound", 60, criterion_hoffman);
  all &= report(6, "quartic Lipschitz ladder", 10, criterion_ladder);
  all &= report(7, "disk scheme", 10, criterion_scheme);
  all &= report(8, "segment gauge", 5, criterion_gauge);
  all &= report(9, "CLI determinism", 0, criterion_determinism);
  return all ? 0 : 1;
}
