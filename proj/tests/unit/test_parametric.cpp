#include <doctest.h>

#include <cmath>

#include "optstab/errors.hpp"
#include "optstab/instances.hpp"
#include "optstab/linear.hpp"
#include "optstab/parametric.hpp"

using namespace optstab;

namespace {

AffineFamily line_family() {
  Eigen::MatrixXd l(1, 2);
  l << 1, 0;
  const auto lm = decompose(l);
  return AffineFamily(lm, pseudo_inverse(lm));
}

std::vector<Param> grid(double lo, double hi, int n) {
  std::vector<Param> out;
  for (int i = 0; i < n; ++i) out.push_back(pt({lo + (hi - lo) * i / (n - 1)}));
  return out;
}

}  // namespace

TEST_CASE("value function of the affine family is |t|") {
  const auto fam = line_family().as_family(absolute_distance());
  const ValueFunction v{ValueMode::inf, fam, distance_objective(Point::Zero(2))};
  for (const auto& t : grid(-3, 3, 25)) {
    const auto val = eval_value_function(v, t);
    CHECK(val.mode == EvalMode::exact);
    CHECK(val.value.value() == doctest::Approx(std::abs(t[0])).epsilon(1e-12).scale(1));
  }
}

TEST_CASE("constant family gives a constant value function") {
  const auto fam = constant_family(cloud_1d({1, 4}), absolute_distance());
  const ValueFunction v{ValueMode::sup, fam, piecewise_linear({0, 5}, {0, 10})};
  for (const auto& t : grid(-1, 1, 5)) CHECK(eval_value_function(v, t).value == ExtendedReal(8.0));
  const auto rep = empirical_hausdorff_limsup(fam, pt({0}), grid(-1, 1, 9), 0.01);
  CHECK(rep.verdict == "holds");
  CHECK(rep.delta == 0.01);
}

TEST_CASE("mixed box family: phi_*(t) = t on the open interval") {
  const auto e = build("mixed_box");
  const ValueFunction v{ValueMode::inf, *e.family, *e.objective};
  for (const auto& t : grid(-0.99, 0.99, 21))
    CHECK(eval_value_function(v, t).value.value() == doctest::Approx(t[0]).epsilon(1e-12).scale(1));
  CHECK_THROWS_AS(e.family->member(pt({1.0})), InputError);
}

TEST_CASE("Hausdorff limsup search on the affine family") {
  const auto fam = line_family().as_family(absolute_distance());
  const auto probes = grid(-0.5, 0.5, 41);
  const auto rep = empirical_hausdorff_limsup(fam, pt({0}), probes, 0.1);
  CHECK(rep.verdict == "holds");
  REQUIRE(rep.delta);
  CHECK(*rep.delta == doctest::Approx(0.1));
  for (const auto& lvl : rep.levels)
    if (lvl.passed) CHECK(lvl.worst < ExtendedReal(0.1));
}

TEST_CASE("no probe within any delta is inconclusive") {
  const auto fam = line_family().as_family(absolute_distance());
  const std::vector<Param> far{pt({5.0}), pt({-7.0})};
  CHECK(empirical_hausdorff_limsup(fam, pt({0}), far, 0.1).verdict == "inconclusive");
}

TEST_CASE("ce33 family: sets converge, values do not, and the objective is blamed") {
  const auto e = build("ce33");
  const ValueFunction v{ValueMode::inf, *e.family, *e.objective};
  std::vector<Param> probes;
  for (int j = 2; j <= 50; ++j) probes.push_back(pt({1.0 / j}));
  const auto sets = empirical_hausdorff_limsup(*e.family, pt({0}), probes, 0.1, {}, v);
  CHECK(sets.verdict == "holds");
  REQUIRE(sets.value_jump);
  CHECK(*sets.value_jump == ExtendedReal(1.0));
  CHECK(!sets.regularity_flag.empty());
  for (const auto& t : probes) CHECK(eval_value_function(v, t).value == ExtendedReal(-1.0));
  CHECK(eval_value_function(v, pt({0})).value == ExtendedReal(0.0));
  CHECK(empirical_value_continuity(v, pt({0}), probes, 0.1).verdict == "inconclusive");
}

TEST_CASE("value continuity holds on the mixed instance") {
  const auto e = build("mixed_box");
  const ValueFunction v{ValueMode::inf, *e.family, *e.objective};
  for (double t0 : {-0.5, 0.0, 0.7}) {
    std::vector<Param> probes;
    for (int k = 1; k <= 30; ++k) probes.push_back(pt({t0 + std::pow(-1.0, k) * 0.2 / k}));
    for (double eps : {0.2, 0.05, 0.01}) CHECK(empirical_value_continuity(v, pt({t0}), probes, eps).verdict == "holds");
  }
}

TEST_CASE("Lipschitz certification of phi_* on the affine family") {
  const auto fam = line_family().as_family(absolute_distance());
  const ValueFunction v{ValueMode::inf, fam, distance_objective(Point::Zero(2))};
  std::vector<std::pair<Param, Param>> pairs;
  const auto g = grid(-2, 2, 15);
  for (const auto& t : g)
    for (const auto& s : g) pairs.emplace_back(t, s);
  const auto rep = certify_value_lipschitz(v, pairs);
  CHECK(rep.all_pass);
  REQUIRE(rep.global_constant);
  CHECK(*rep.global_constant == doctest::Approx(1.0));
  CHECK(rep.worst_ratio <= *rep.global_constant * (1 + 1e-9));
  for (const auto& row : rep.rows)
    if (row.t == row.s) CHECK(row.observed == ExtendedReal(0.0));
}

TEST_CASE("Lipschitz certification refuses missing hypotheses") {
  const auto e = build("ce33");
  const ValueFunction v{ValueMode::inf, *e.family, *e.objective};
  const std::vector<std::pair<Param, Param>> pairs{{pt({0.1}), pt({0.2})}};
  CHECK_THROWS_AS(certify_value_lipschitz(v, pairs), HypothesisError);
}
