#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "optstab/errors.hpp"
#include "optstab/instances.hpp"
#include "optstab/optima.hpp"
#include "optstab/scheme.hpp"

using namespace optstab;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("SUP and INF over empty lists follow the conventions") {
  const auto f = constant_objective(3.0);
  CHECK(sup_over(f, std::span<const Point>{}).value == ExtendedReal::neg_inf());
  CHECK(inf_over(f, std::span<const Point>{}).value == ExtendedReal::pos_inf());
  CHECK(sup_over(f, cloud_1d({1, 2})).value == ExtendedReal(3.0));
}

TEST_CASE("ce33 objective is well formed") {
  const int k_max = 60;
  const auto f = ce33_objective(k_max);
  for (int k = 2; k <= k_max; ++k) {
    const auto b = ce33_breakpoints(k);
    CHECK(f(pt({b[0]})) == 0.0);
    CHECK(f(pt({b[1]})) == -1.0);
    CHECK(f(pt({b[2]})) == 1.0);
    CHECK(f(pt({b[3]})) == 0.0);
    // approach each breakpoint from both sides
    for (double x : b) {
      CHECK(std::abs(f(pt({x - 1e-12})) - f(pt({x}))) < 1e-8 * 4 * k);
      CHECK(std::abs(f(pt({x + 1e-12})) - f(pt({x}))) < 1e-8 * 4 * k);
    }
    // slopes -2k, 4k, k/(1-k) at rational probes
    const double m1 = (f(pt({b[0] + 0.25 / (2 * k)})) - f(pt({b[0]}))) / (0.25 / (2 * k));
    const double m2 = (f(pt({b[1] + 0.25 / (2 * k)})) - f(pt({b[1]}))) / (0.25 / (2 * k));
    const double m3 = (f(pt({b[2] + 0.25})) - f(pt({b[2]}))) / 0.25;
    CHECK(m1 == doctest::Approx(-2.0 * k).epsilon(1e-9));
    CHECK(m2 == doctest::Approx(4.0 * k).epsilon(1e-9));
    CHECK(m3 == doctest::Approx(static_cast<double>(k) / (1 - k)).epsilon(1e-9));
  }
  CHECK(f(pt({4.5})) == 0.0);
  CHECK(f(pt({-10})) == 0.0);
}

TEST_CASE("ce33 optimal values jump while the sets converge") {
  const int k_max = 60;
  const auto f = ce33_objective(k_max);
  const auto a = ce33_set(k_max);
  CHECK(inf_over(f, a).value == ExtendedReal(0.0));
  CHECK(sup_over(f, a).value == ExtendedReal(0.0));
  for (int j = 2; j <= 50; ++j) {
    const auto aj = ce33_perturbed(k_max, j);
    const auto lo = inf_over(f, aj), hi = sup_over(f, aj);
    CHECK(lo.value == ExtendedReal(-1.0));
    CHECK(hi.value == ExtendedReal(1.0));
    CHECK(lo.mode == EvalMode::exact);
    REQUIRE(lo.witness);
    CHECK(std::abs(f(*lo.witness) + 1.0) <= kOptTolerance);
  }
}

TEST_CASE("ce34 extrema come from stationary points of the sine pieces") {
  const int k_max = 60;
  const auto f = ce34_objective(k_max);
  const auto a = ce34_set(k_max);
  CHECK(inf_over(f, a).value == ExtendedReal(0.0));
  CHECK(sup_over(f, a).value == ExtendedReal(0.0));
  for (int j = 1; j <= 50; ++j) {
    const auto aj = ce34_perturbed(k_max, j);
    const auto lo = inf_over(f, aj), hi = sup_over(f, aj);
    CHECK(lo.value == ExtendedReal(-1.0));
    CHECK(hi.value == ExtendedReal(1.0));
    REQUIRE(hi.witness);
    CHECK(std::abs(f(*hi.witness) - 1.0) <= kOptTolerance);
    CHECK(aj.contains(*hi.witness));
  }
  // closed truncated piece: [1, 1 + 1/(2k)] has argument range [2 pi k, 4 pi k]
  AxisSegments s{k_max, {{4, 0.0, 1.0 + 1.0 / 10.0, true}}};
  CHECK(sup_over(f, SetModel(s)).value == ExtendedReal(1.0));
  // a short piece with no stationary point: theta in [2 pi k, 2 pi k + pi/4]
  const int k = 5;
  const double c = 1.0 + 1.0 / k;
  const double theta_hi = 2 * std::numbers::pi * k + std::numbers::pi / 4;
  AxisSegments shortp{k_max, {{k - 1, 1.0, c - 2 * std::numbers::pi / theta_hi, true}}};
  const auto hi = sup_over(f, SetModel(shortp)).value.value();
  CHECK(hi == doctest::Approx(std::sin(theta_hi)).epsilon(1e-9));
  CHECK(inf_over(f, SetModel(shortp)).value.value() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(f(pt({0.5})), InputError);
  Point two = Point::Zero(k_max);
  two[0] = 0.5;
  two[3] = 0.5;
  CHECK_THROWS_AS(f(two), InputError);
}

TEST_CASE("sup of -f is -inf of f") {
  const auto f = ce33_objective(30);
  const auto g = negate(f);
  for (int j = 2; j <= 20; ++j) {
    const auto aj = ce33_perturbed(30, j);
    CHECK(sup_over(g, aj).value == -inf_over(f, aj).value);
  }
  const auto q = distance_objective(pt({2, 0}));
  const auto poly = regular_polygon(9);
  CHECK(sup_over(negate(q), poly).value == -inf_over(q, poly).value);
}

TEST_CASE("monotonicity under inclusion") {
  const auto f = piecewise_linear({0, 1, 2, 3}, {0, 2, -1, 1});
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 4);
  for (int i = 0; i < 200; ++i) {
    std::vector<Point> big;
    for (int k = 0; k < 10; ++k) big.push_back(pt({u(rng)}));
    std::vector<Point> small(big.begin(), big.begin() + 1 + i % 9);
    CHECK(sup_over(f, cloud(small)).value <= sup_over(f, cloud(big)).value);
    CHECK(inf_over(f, cloud(small)).value >= inf_over(f, cloud(big)).value);
  }
}

TEST_CASE("finite stability: Lipschitz transfer on disk and polygons") {
  const auto f = distance_objective(Point::Zero(2));
  std::vector<std::pair<SetModel, SetModel>> pairs;
  for (int m = 3; m <= 64; ++m) pairs.emplace_back(disk(Point::Zero(2), 1.0), regular_polygon(m));
  const auto rep = check_finite_stability(f, euclidean_distance(2), pairs, 0.1);
  CHECK(rep.all_pass);
  for (const auto& row : rep.rows) CHECK(row.slack >= ExtendedReal(0.0));
  const std::vector<std::pair<SetModel, SetModel>> same{{cloud_1d({1, 2}), cloud_1d({1, 2})}};
  const auto r2 = check_finite_stability(piecewise_linear({0, 1}, {0, 5}), absolute_distance(), same, 0.1);
  CHECK(r2.rows[0].d_h == ExtendedReal(0.0));
  CHECK(r2.all_pass);
}

TEST_CASE("finite stability refuses continuous-only objectives unless diagnosing") {
  const auto f = ce33_objective(60);
  const std::vector<std::pair<SetModel, SetModel>> pairs{{ce33_set(60), ce33_perturbed(60, 10)}};
  CHECK_THROWS_AS(check_finite_stability(f, absolute_distance(), pairs, 0.5), HypothesisError);
  StabilityOptions opt;
  opt.diagnostic = true;
  const auto rep = check_finite_stability(f, absolute_distance(), pairs, 0.5, opt);
  CHECK(rep.rows[0].verdict == "jump");
  CHECK(rep.rows[0].d_h.value() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(!rep.all_pass);
}

TEST_CASE("finite stability under a uniform modulus uses delta(eps/2)") {
  auto f = with_regularity(piecewise_linear({0, 1}, {0, 2}), Uniform{[](double e) { return e / 2.0; }, {}});
  const std::vector<std::pair<SetModel, SetModel>> pairs{{cloud_1d({0.5}), cloud_1d({0.52})},
                                                          {cloud_1d({0.0}), cloud_1d({1.0})}};
  const auto rep = check_finite_stability(f, absolute_distance(), pairs, 0.1);
  CHECK(rep.rows[0].verdict == "pass");
  CHECK(rep.rows[0].delta_used.value() == doctest::Approx(0.025));
  CHECK(rep.rows[1].verdict == "vacuous");
}

TEST_CASE("D_H = -inf under a Lipschitz declaration is an inconsistency") {
  const PseudoDistance neg("minus_inf", [](const Point&, const Point&) { return ExtendedReal::neg_inf(); });
  const std::vector<std::pair<SetModel, SetModel>> pairs{{cloud_1d({0}), cloud_1d({1})}};
  CHECK_THROWS_AS(check_finite_stability(linear_objective(pt({1})), neg, pairs, 0.1), InconsistencyError);
}

TEST_CASE("infinite case: escape above mu") {
  const auto f = linear_objective(pt({1.0}));
  const auto a = interval_union({{0.0, kInf, true, false}});
  UnboundednessCertificate cert{[](std::size_t n) { return pt({static_cast<double>(n)}); }, 1000};
  const std::vector<SetModel> cands{interval_union({{0.5, kInf, true, false}}), interval_union({{0.0, 50.0}}),
                                    interval_union({{-3.0, kInf, true, false}})};
  const auto rep = check_infinite_escape(f, absolute_distance(), a, 100.0, cands, cert, 1.0);
  CHECK(rep.witness[0] == 102.0);
  CHECK(rep.delta == 1.0);
  CHECK(rep.rows[0].verdict == "pass");
  CHECK(rep.rows[1].verdict == "not_applicable");
  CHECK(rep.rows[2].verdict == "pass");
  CHECK(rep.all_pass);
  CHECK_THROWS_AS(check_infinite_escape(f, absolute_distance(), a, 100.0, cands, std::nullopt), HypothesisError);
}

TEST_CASE("infinite case: INF mirror") {
  const auto f = linear_objective(pt({1.0}));
  const auto a = interval_union({{-kInf, 0.0, false, true}});
  UnboundednessCertificate cert{[](std::size_t n) { return pt({-static_cast<double>(n)}); }, 1000};
  const std::vector<SetModel> cands{interval_union({{-kInf, -0.5, false, true}})};
  const auto rep = check_infinite_escape(f, absolute_distance(), a, -100.0, cands, cert, 1.0, ValueMode::inf);
  CHECK(rep.witness[0] == -102.0);
  CHECK(rep.rows[0].value == ExtendedReal::neg_inf());
  CHECK(rep.all_pass);
}

TEST_CASE("domain transfer from the disk to polygons") {
  const auto f = distance_objective(Point::Zero(2));
  const auto dk = disk(Point::Zero(2), 1.0);
  for (int m = 5; m <= 12; ++m) CHECK(domain_transfer_check(f, euclidean_distance(2), dk, 0.2, regular_polygon(m), 0.2));
  CHECK(domain_transfer_check(f, euclidean_distance(2), dk, 0.2, dk, 0.2));
  const auto g = linear_objective(pt({4.0}));
  CHECK(domain_transfer_check(g, absolute_distance(), interval_union({{0, 1}}), 0.05, interval_union({{0.01, 1.03}}), 0.2));
  for (int m : {3, 4})
    CHECK_THROWS_AS(domain_transfer_check(f, euclidean_distance(2), dk, 0.2, regular_polygon(m), 0.2), HypothesisError);
}

TEST_CASE("minimizer sets are unstable while values are stable") {
  const auto demo = minimizer_set_instability_demo(0.1);
  CHECK(demo.argmin_a == std::vector<double>{0.0, std::numbers::pi});
  CHECK(demo.argmin_shifted == std::vector<double>{0.0});
  CHECK(demo.hausdorff_argmin.value() == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(demo.asym_argmin == ExtendedReal(0.0));
  for (double eps : {0.4, 0.2, 0.1, 0.05}) {
    const auto d = minimizer_set_instability_demo(eps);
    CHECK(std::abs(d.hausdorff_sets.value() - eps) <= 1e-15);
    CHECK(d.asym_argmin == ExtendedReal(0.0));
  }
}

TEST_CASE("declared Lipschitz constants hold on sampled pairs") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3, 3);
  const ObjectiveFn fs[] = {piecewise_linear({0, 1, 2}, {0, 3, 1}), distance_objective(pt({1, 2})),
                            linear_objective(pt({3, -4}))};
  for (const auto& f : fs) {
    const double lambda = std::get<Lipschitz>(f.regularity).lambda;
    const Eigen::Index n = f.name == "piecewise_linear" ? 1 : 2;
    for (int i = 0; i < 500; ++i) {
      Point x(n), y(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        x[k] = u(rng);
        y[k] = u(rng);
      }
      CHECK(std::abs(f(x) - f(y)) <= lambda * (x - y).norm() * (1 + 1e-12) + 1e-12);
    }
  }
}
