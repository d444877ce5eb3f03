#include <random>

#include "desing/ideals.hpp"
#include "doctest.h"

using namespace desing;

namespace {

const VarList XY{"x", "y"};
const VarList XYZ{"x", "y", "z"};

Poly P(const std::string& s, const VarList& v = XY) { return parse_poly(s, v); }

bool same_ideal(const Ideal& a, const Ideal& b) {
  auto Ga = groebner(a);
  auto Gb = groebner(b);
  for (const auto& g : a)
    if (!ideal_member(g, Gb)) return false;
  for (const auto& g : b)
    if (!ideal_member(g, Ga)) return false;
  return true;
}

}  // namespace

TEST_CASE("derivative ideal") {
  // s = 1 is the ideal of g itself.
  CHECK(same_ideal(derivative_ideal(P("y^2 - x^3"), 1), {P("y^2 - x^3")}));
  // Cusp, s = 2: variety is the origin.
  auto D2 = derivative_ideal(P("y^2 - x^3"), 2);
  CHECK(same_ideal(D2, {P("y^2 - x^3"), P("2*y"), P("-3*x^2")}));
  CHECK(same_ideal(D2, {P("x^2"), P("y")}));
  // Umbrella, s = 2: variety is the z-axis.
  auto U2 = derivative_ideal(P("x^2 - y^2*z", XYZ), 2);
  CHECK(same_ideal(
      U2, {P("x^2 - y^2*z", XYZ), P("2*x", XYZ), P("-2*y*z", XYZ), P("-1*y^2", XYZ)}));
  CHECK(vanishes_on(P("x", XYZ), U2));
  CHECK(vanishes_on(P("y", XYZ), U2));
  CHECK(!vanishes_on(P("z", XYZ), U2));
}

TEST_CASE("max order on a variety") {
  Ideal Z2 = zero_ideal(XY);
  Ideal Z3 = zero_ideal(XYZ);
  CHECK(max_order_on_variety(P("y^2 - x^3"), Z2) == 2);
  CHECK(max_order_on_variety(P("x^2 - y^2*z", XYZ), Z3) == 2);
  CHECK(max_order_on_variety(P("x"), Z2) == 1);
  CHECK(max_order_on_variety(P("1"), Z2) == 0);
  // g nonvanishing on V(D): x restricted to the line x = 1.
  CHECK(max_order_on_variety(P("x"), {P("x - 1")}) == 0);
  // The origin lies on the x-axis, so the restriction keeps order 2.
  CHECK(max_order_on_variety(P("y^2 - x^3"), {P("y")}) == 2);
  // Away from the origin the cusp is smooth.
  CHECK(max_order_on_variety(P("y^2 - x^3"), {P("x - 1"), P("y - 1")}) == 1);
}

TEST_CASE("order along a submanifold") {
  PointQ origin{Rational(0), Rational(0)};
  Ideal Ny{P("y")};
  CHECK(order_along(P("x^3"), Ny, origin) == ExtNat(3));
  CHECK(order_along(P("y"), Ny, origin).is_infinite());
  CHECK(order_along(P("x"), Ny, origin) == ExtNat(1));
  CHECK(order_along(P("1"), Ny, origin) == ExtNat(0));
  // Adding an element of N does not change the order of the restriction.
  CHECK(order_along(P("x^3 + y"), Ny, origin) == ExtNat(3));
  // Point off the submanifold errors.
  PointQ off{Rational(0), Rational(1)};
  CHECK_THROWS_AS((void)order_along(P("x"), Ny, off), std::invalid_argument);
  // Restriction to the whole space is the plain order at the point.
  CHECK(order_along(P("y^2 - x^3"), zero_ideal(XY), origin) == ExtNat(2));
  // kmax exhaustion is a distinct failure.
  CHECK_THROWS_AS((void)order_along(P("x^4"), Ny, origin, 3),
                  OrderBudgetExceeded);
  // Locus flavor: order of the umbrella along the z-axis is 2.
  Ideal axis{P("x", XYZ), P("y", XYZ)};
  CHECK(order_along_locus(P("x^2 - y^2*z", XYZ), zero_ideal(XYZ), axis) ==
        ExtNat(2));
}

TEST_CASE("order vs derivative ideal on random data") {
  std::mt19937 rng(20260826);
  std::uniform_int_distribution<int> coef(-3, 3), expo(0, 3), pt(-2, 2);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    Poly g(XY);
    for (int k = 0; k < 4; ++k) {
      Exponents e{static_cast<unsigned>(expo(rng)),
                  static_cast<unsigned>(expo(rng))};
      g.set_term(e, g.coefficient(e) + Rational(coef(rng)));
    }
    if (g.is_zero()) continue;
    PointQ a{Rational(pt(rng)), Rational(pt(rng))};
    long ord = order_at_point(g, a).is_infinite()
                   ? -1
                   : order_at_point(g, a).value();
    for (unsigned s = 1; s <= 3; ++s) {
      bool all_vanish = true;
      for (const auto& d : derivative_ideal(g, s))
        if (!(d.eval(a) == 0)) all_vanish = false;
      CHECK(all_vanish == (ord < 0 || ord >= static_cast<long>(s)));
      ++checked;
    }
  }
  CHECK(checked >= 100);
}

TEST_CASE("jacobian smoothness certificates") {
  Ideal Z3 = zero_ideal(XYZ);
  CHECK(jacobian_smooth({P("x", XYZ), P("y", XYZ)}, 2, Z3));
  CHECK(!jacobian_smooth({P("y^2 - x^3")}, 1, zero_ideal(XY)));
  CHECK(jacobian_smooth({P("y^2 - x^3 - x")}, 1, zero_ideal(XY)));
  // Cusp is smooth away from the origin: cut by x = 1.
  CHECK(jacobian_smooth({P("y^2 - x^3")}, 1, {P("x - 1")}));
  // Circle is smooth even over the closure.
  CHECK(jacobian_smooth({P("x^2 + y^2 - 1")}, 1, zero_ideal(XY)));
}

TEST_CASE("radical membership") {
  CHECK(vanishes_on(P("x"), {P("x^2")}));
  CHECK(!vanishes_on(P("y"), {P("x^2")}));
  CHECK(vanishes_on(P("x*y"), {P("x^2"), P("y^3")}));
  CHECK(vanishes_on(Poly(XY), {P("x")}));
  CHECK(vanishes_on(P("x + y"), {P("x - 1"), P("y + 1")}));
}

TEST_CASE("image of a variety under a polynomial map") {
  // Twisted-cubic-style projection: t -> (t^2, t^3) from the t-line.
  VarList src{"t"};
  Ideal line = zero_ideal(src);
  std::map<std::string, Poly> comp{{"x", parse_poly("t^2", src)},
                                   {"y", parse_poly("t^3", src)}};
  Ideal img = image_ideal(line, XY, comp);
  CHECK(same_ideal(img, {P("y^2 - x^3")}));
  // Image of a point is a point.
  Ideal pt{parse_poly("t - 2", src)};
  Ideal img2 = image_ideal(pt, XY, comp);
  CHECK(same_ideal(img2, {P("x - 4"), P("y - 8")}));
  // Chart transition reusing variable names: (x, y) -> (x, x*y).
  std::map<std::string, Poly> blow{{"x", P("x")}, {"y", P("x*y")}};
  Ideal strict = image_ideal({P("y - x^2")}, XY, blow);
  // Points (t, t^2) map to (t, t^3): the curve y = x^3 (closure).
  CHECK(vanishes_on(P("y - x^3"), strict));
}

TEST_CASE("rational points of zero-dimensional varieties") {
  auto pts = rational_points({P("x^2 - 1"), P("y - x")});
  REQUIRE(pts.has_value());
  REQUIRE(pts->size() == 2);
  CHECK((*pts)[0] == PointQ{Rational(-1), Rational(-1)});
  CHECK((*pts)[1] == PointQ{Rational(1), Rational(1)});
  // Fractional coordinates.
  auto half = rational_points({P("2*x - 1"), P("3*y + 2")});
  REQUIRE(half.has_value());
  REQUIRE(half->size() == 1);
  CHECK((*half)[0] == PointQ{Rational(1, 2), Rational(-2, 3)});
  // Empty variety.
  auto none = rational_points({P("x"), P("x - 1")});
  REQUIRE(none.has_value());
  CHECK(none->empty());
  // Irrational points are reported, not invented.
  CHECK(!rational_points({P("x^2 - 2"), P("y")}).has_value());
  // Mixed: x^2(x-1) = x^3 - x^2 has rational roots only; paired curve.
  auto mixed = rational_points({P("x^2 - x"), P("y^2 - x")});
  REQUIRE(mixed.has_value());
  REQUIRE(mixed->size() == 3);
  // Positive-dimensional input errors.
  CHECK_THROWS_AS((void)rational_points({P("y^2 - x^3")}),
                  std::invalid_argument);
}

TEST_CASE("ideal powers and keys") {
  auto sq = ideal_power({P("x"), P("y")}, 2);
  CHECK(same_ideal(sq, {P("x^2"), P("x*y"), P("y^2")}));
  CHECK(same_ideal(ideal_power({P("x")}, 3), {P("x^3")}));
  CHECK(ideal_key({P("x^2"), P("x")}) == ideal_key({P("x")}));
  CHECK(ideal_key({P("x")}) != ideal_key({P("y")}));
}
