#include <doctest.h>

#include <algorithm>

#include "optstab/errors.hpp"
#include "optstab/instances.hpp"

using namespace optstab;

TEST_CASE("every catalog instance reproduces its goldens") {
  const auto names = catalog_names();
  CHECK(names.size() == 9);
  for (const auto& n : names) {
    CAPTURE(n);
    const auto e = build(n);
    CHECK(e.name == n);
    CHECK(!e.description.empty());
    CHECK(!e.goldens.empty());
    for (const auto& g : e.goldens) {
      CAPTURE(g.quantity);
      CHECK(g.pass);
    }
    CHECK(e.self_test());
    CHECK(!describe_instance(n).empty());
  }
}

TEST_CASE("catalog errors") {
  CHECK_THROWS_AS(build("no_such_instance"), CatalogError);
  CHECK_THROWS_AS(describe_instance("nope"), CatalogError);
  const auto e = build("ce33");
  CHECK_THROWS_AS(static_cast<void>(e.set("missing")), CatalogError);
}

TEST_CASE("instance parameters") {
  const auto e = build("ce33", {{"K", 20}, {"j", 4}});
  CHECK(e.self_test());
  const auto d = build("disk_polygon", {{"m", 12}});
  CHECK(d.self_test());
}

TEST_CASE("ce33 breakpoints and the perturbed sets") {
  const auto b = ce33_breakpoints(3);
  REQUIRE(b.size() == 4);
  CHECK(b[0] == 7.0);
  CHECK(b[1] == doctest::Approx(7.0 + 1.0 / 6));
  CHECK(b[2] == doctest::Approx(7.0 + 1.0 / 3));
  CHECK(b[3] == 8.0);
  const auto f = ce33_objective(10);
  CHECK(f(pt({b[1]})) == ExtendedReal(-1.0));
  CHECK(f(pt({b[2]})) == ExtendedReal(1.0));
  const auto a5 = ce33_perturbed(10, 5);
  CHECK(a5.contains(pt({ce33_breakpoints(5)[2]})));
}

TEST_CASE("ce34 pieces") {
  for (int k = 1; k <= 5; ++k) {
    CHECK(ce34_piece(k, 0.0) == doctest::Approx(0.0));
    CHECK(ce34_piece(k, 1.0) == 0.0);
    CHECK_THROWS_AS(ce34_piece(k, 1.0 + 1.0 / k), InputError);
    // sin(2 pi / (c - t)) = 1 at c - t = 4 / (4 l + 1)
    const double c = 1.0 + 1.0 / k;
    for (int l = 4 * k; l < 4 * k + 5; ++l) CHECK(ce34_piece(k, c - 4.0 / (4 * l + 1)) == doctest::Approx(1.0));
  }
  const auto f = ce34_objective(8);
  CHECK(f(Point::Zero(8)) == ExtendedReal(0.0));
}
