#include <doctest.h>

#include <sstream>

#include "experiments.hpp"
#include "optstab/errors.hpp"
#include "optstab/linear.hpp"
#include "optstab/scheme.hpp"
#include "optstab/table.hpp"

using namespace optstab;
using optstab::cli::ConfigError;
using optstab::cli::run_experiment;

TEST_CASE("table formatting") {
  Table t({"a", "b"});
  t.add_row({"1", "x,y"});
  t.add_row({fmt(0.1), fmt(ExtendedReal::pos_inf())});
  CHECK(t.size() == 2);
  CHECK(t.str() == "a,b\n1,\"x,y\"\n0.10000000000000001,inf\n");
  CHECK_THROWS(t.add_row({"only one"}));
  CHECK(fmt(ExtendedReal::neg_inf()) == "-inf");
  CHECK(fmt(true) == "true");
  CHECK(fmt(Eigen::VectorXd(pt({1, 2.5}))) == "1;2.5");
}

TEST_CASE("extended reals and matrices round-trip through JSON") {
  for (const auto x : {ExtendedReal(0.1), ExtendedReal::pos_inf(), ExtendedReal::neg_inf(), ExtendedReal(-3.0)})
    CHECK(extended_from_json(to_json(x)) == x);
  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6.5;
  CHECK(matrix_from_json(to_json(m)) == m);
  CHECK(matrix_from_json(Json::parse("[[1, 0]]")).cols() == 2);
}

TEST_CASE("set and gauge JSON round trips") {
  const auto c = cloud({pt({1, 2}), pt({3, 4})});
  const auto c2 = set_from_json(to_json(c));
  REQUIRE(c2.get<FiniteCloud>());
  CHECK(c2.get<FiniteCloud>()->points.size() == 2);
  const auto u = interval_union({{0, 1, true, false}, {2, 3}});
  const auto u2 = set_from_json(to_json(u));
  REQUIRE(u2.get<IntervalUnion>());
  CHECK(!u2.get<IntervalUnion>()->pieces[0].hi_closed);
  const auto d = set_from_json(Json::parse(R"({"type": "disk", "center": [0, 0], "radius": 2})"));
  CHECK(d.contains(pt({1.9, 0})));
  CHECK(!d.contains(pt({2.1, 0})));
  const auto p = set_from_json(Json::parse(R"({"type": "polygon", "m": 4})"));
  CHECK(p.contains(pt({0.7, 0})));
  CHECK(!p.contains(pt({0.72, 0})));

  const auto g = segment_gauge_set();
  const auto g2 = gauge_from_json(to_json(g));
  CHECK(g2.gauge(pt({-2, 0})) == g.gauge(pt({-2, 0})));
  CHECK(g2.gauge(pt({0, 1})) == ExtendedReal::pos_inf());
}

TEST_CASE("cloud import") {
  const auto pts = parse_cloud("# header\n1, 2\n3 4\n\n5;6\n");
  REQUIRE(pts.size() == 3);
  CHECK(pts[2][1] == 6.0);
  CHECK_THROWS_AS(parse_cloud("1 2\n3\n"), InputError);
}

TEST_CASE("counterexample experiment") {
  const auto r = run_experiment(Json::parse(R"({"kind": "counterexample", "instance": "ce33", "K": 30, "j": [2, 20]})"));
  CHECK(r.pass);
  CHECK(r.table.size() == 19);
  CHECK(r.summary.at("failures") == 0);
  CHECK(r.summary.at("K") == 30);
}

TEST_CASE("scheme experiment") {
  const auto r = run_experiment(Json::parse(R"({"kind": "scheme", "family": "polygon", "m": [3, 40]})"));
  CHECK(r.pass);
  CHECK(r.table.size() == 38);
}

TEST_CASE("hoffman experiment") {
  const auto r = run_experiment(Json::parse(R"({"kind": "hoffman", "matrix": [[1, 0]], "pairs": [[[0], [1]]]})"));
  CHECK(r.pass);
  CHECK(r.table.size() == 1);
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(run_experiment(Json::parse(R"({"kind": "no_such_kind"})")), ConfigError);
  CHECK_THROWS_AS(run_experiment(Json::parse(R"({"kind": "scheme", "family": "polygon", "m": [3, 8], "typo": 1})")),
                  ConfigError);
  CHECK_THROWS_AS(run_experiment(Json::parse(R"({"kind": "ladder", "problem": "quartic", "lambdas": [1, 2]})")),
                  ConfigError);
  CHECK_THROWS_AS(run_experiment(Json::parse(R"({"kind": "stability", "random": {"trials": 3}})")), ConfigError);
  CHECK_THROWS_AS(run_experiment(Json::parse(R"({"kind": "ladder", "seed": -1, "problem": "quartic"})")), ConfigError);
  CHECK(!cli::experiment_kinds().empty());
}

TEST_CASE("seeded experiments are reproducible") {
  const auto cfg = Json::parse(R"({"kind": "hoffman", "seed": 11, "random": {"trials": 40, "max_rows": 4, "max_cols": 5}})");
  auto one = cfg, two = cfg;
  one["threads"] = 1;
  two["threads"] = 4;
  const auto a = run_experiment(one), b = run_experiment(two);
  CHECK(a.table.str() == b.table.str());
  CHECK(a.pass);
}

TEST_CASE("documented JSON set and gauge forms parse") {
  for (const char* text : {R"({"type": "cloud", "points": [[0, 1], [2, 3]]})",
                           R"({"type": "interval_union", "pieces": [{"lo": 0, "hi": 1, "lo_closed": true, "hi_closed": false}]})",
                           R"({"type": "axis_segments", "dim": 3, "segments": [{"axis": 0, "lo": 0, "hi": 1, "hi_closed": true}]})",
                           R"({"type": "affine_slab", "particular": [0, 0], "kernel": [[0, 1]], "lo": [-1], "hi": [1]})",
                           R"({"type": "disk", "center": [0, 0], "radius": 1})",
                           R"({"type": "polygon", "m": 6, "orientation": "midpoint", "radius": 1})"}) {
    CAPTURE(text);
    CHECK_NOTHROW(static_cast<void>(set_from_json(Json::parse(text))));
  }
  const auto slab = set_from_json(Json::parse(R"({"type": "affine_slab", "particular": [0, 0], "kernel": [[0, 1]], "lo": [-1], "hi": [1]})"));
  CHECK(slab.contains(pt({0, 0.5})));
  for (const char* text : {R"({"type": "halfspaces", "rows": [[1, 0, 1], [-1, 0, 2]]})",
                           R"({"type": "vertices", "points": [[1, 0], [-2, 0]]})",
                           R"({"type": "norm_ball", "dim": 2, "radius": 1, "p": 2})"}) {
    CAPTURE(text);
    CHECK_NOTHROW(static_cast<void>(gauge_from_json(Json::parse(text))));
  }
  CHECK(gauge_from_json(Json::parse(R"({"type": "halfspaces", "rows": [[1, 0, 1], [-1, 0, 2]]})")).gauge(pt({-4, 0})) ==
        ExtendedReal(2.0));
}
