#include "desing/invariant.hpp"

#include "doctest.h"

using namespace desing;

namespace {

const VarList XY{"x", "y"};
const VarList XYZ{"x", "y", "z"};

Poly P(const std::string& s, const VarList& v = XY) { return parse_poly(s, v); }

InvariantWord W(std::vector<std::pair<Rational, unsigned>> entries,
                InvariantWord::Terminal t,
                std::optional<Rational> companion = std::nullopt) {
  InvariantWord w;
  w.entries = std::move(entries);
  w.terminal = t;
  w.companion = companion;
  return w;
}

const auto INF = InvariantWord::Terminal::INF;
const auto ZERO = InvariantWord::Terminal::ZERO;

ResolutionTree make_tree(const Poly& g, const VarList& vars) {
  ResolutionTree t;
  Chart c;
  c.id = "c0";
  c.year = 0;
  c.vars = vars;
  t.charts.push_back(c);
  t.transform["c0"] = g;
  return t;
}

// Blow up V(C) in the named chart and record strict transforms and the new
// divisor (birth year = year of the new charts).
void blow_at(ResolutionTree& t, const std::string& chart_id, const Ideal& C,
             const std::string& div_id) {
  Chart parent = t.chart(chart_id);
  auto st = straighten_center(parent, C);
  auto kids = blowup(parent, st.subst, st.coords, parent.year + 1);
  update_divisors(parent, kids, div_id);
  t.divisors.push_back({div_id, parent.year + 1});
  Poly f = t.transform.at(chart_id);
  for (auto& k : kids) {
    auto [s, mu] = strict_transform(f, k, *k.exceptional);
    (void)mu;
    t.transform[k.id] = s;
    t.charts.push_back(k);
  }
}

PointQ origin2{Rational(0), Rational(0)};
PointQ origin3{Rational(0), Rational(0), Rational(0)};

}  // namespace

TEST_CASE("invariant word printing and comparison") {
  InvariantWord cusp0 = W({{Rational(2), 0}, {Rational(3, 2), 0}}, INF);
  CHECK(cusp0.str() == "(2,0; 3/2,0; inf)");
  CHECK(W({}, INF).str() == "(inf)");
  CHECK(W({{Rational(1), 1}}, ZERO, Rational(1)).str() == "(1,1; 0)");

  InvariantWord axis = W({{Rational(2), 0}, {Rational(1), 0}}, INF);
  CHECK(word_compare(cusp0, axis) == 1);
  CHECK(word_compare(axis, cusp0) == -1);
  CHECK(word_compare(cusp0, cusp0) == 0);

  // (1,0;inf) vs (2,0;0): the second is greater (first slot decides).
  InvariantWord smooth = W({{Rational(1), 0}}, INF);
  InvariantWord tac = W({{Rational(2), 0}}, ZERO, Rational(1));
  CHECK(word_compare(smooth, tac) == -1);

  // ZERO loses to a positive continuation with the same prefix.
  InvariantWord zero2 = W({{Rational(2), 0}}, ZERO, Rational(1));
  InvariantWord go2 = W({{Rational(2), 0}, {Rational(1), 0}}, INF);
  CHECK(word_compare(zero2, go2) == -1);

  // INFINITY beats a finite continuation with the same prefix length.
  InvariantWord inf1 = W({{Rational(2), 0}}, INF);
  CHECK(word_compare(inf1, go2) == 1);

  // Companion-mu breaks ties between equal ZERO words.
  InvariantWord za = W({{Rational(2), 0}}, ZERO, Rational(1));
  InvariantWord zb = W({{Rational(2), 0}}, ZERO, Rational(2));
  CHECK(word_compare(za, zb) == -1);
  CHECK(word_compare(zb, za) == 1);
  CHECK(word_compare(za, za) == 0);
}

TEST_CASE("factorial denominator bounds") {
  CHECK(e_bounds_check(W({{Rational(2), 0}, {Rational(3, 2), 0}}, INF)));
  CHECK(e_bounds_check(W({{Rational(1), 1}, {Rational(2), 0}}, INF)));
  CHECK(e_bounds_check(W({{Rational(2), 0}, {Rational(5, 2), 0}}, INF)));
  CHECK(e_bounds_check(W({{Rational(1), 1}}, ZERO, Rational(1))));
  // Corrupted word: 2! * 4/3 is not a natural number.
  CHECK_FALSE(e_bounds_check(W({{Rational(2), 0}, {Rational(4, 3), 0}}, INF)));
  // nu_1 must itself be a natural number (it is an order of vanishing).
  CHECK_FALSE(e_bounds_check(W({{Rational(3, 2), 0}}, INF)));
  // Companion-mu is checked against e_{t+1}!.
  CHECK_FALSE(e_bounds_check(W({{Rational(1), 0}}, ZERO, Rational(1, 3))));
}

TEST_CASE("maximal contact witnesses") {
  Ideal origin{P("x"), P("y")};
  auto mc = maximal_contact(P("y^2 - x^3"), 2, origin);
  CHECK(mc.direction == std::vector<long>{0, 1});
  REQUIRE(mc.N1.size() == 1);
  CHECK(mc.N1[0] == P("2*y"));

  Ideal origin3i{P("x", XYZ), P("y", XYZ), P("z", XYZ)};
  auto mu = maximal_contact(P("x^2 - y^2*z", XYZ), 2, origin3i);
  CHECK(mu.direction == std::vector<long>{1, 0, 0});
  CHECK(mu.N1[0] == P("2*x", XYZ));

  // The node needs a diagonal direction: d/dx and d/dy alone square to 0.
  auto mn = maximal_contact(P("x*y"), 2, origin);
  CHECK(mn.direction == std::vector<long>{1, 1});
  CHECK(mn.N1[0] == P("x + y"));

  CHECK_THROWS_AS((void)maximal_contact(Poly(XY), 1, origin), InvariantError);
}

TEST_CASE("coefficient pairs") {
  auto cp = coefficient_pairs(P("y^2 - x^3"), 2, {0, 1});
  REQUIRE(cp.size() == 1);
  CHECK(cp[0].h == P("-x^3"));
  CHECK(cp[0].mu == Rational(2));

  auto tp = coefficient_pairs(P("y^2 - x^4"), 2, {0, 1});
  REQUIRE(tp.size() == 1);
  CHECK(tp[0].h == P("-x^4"));
  CHECK(tp[0].mu == Rational(2));

  // d = 1 has no coefficient pairs.
  CHECK(coefficient_pairs(P("x"), 1, {1, 0}).empty());
}

TEST_CASE("nu_next and companion subtraction") {
  Ideal origin{P("x"), P("y")};
  Poly one = Poly::constant(XY, Rational(1));

  std::vector<MarkedPair> cuspPairs{{P("y^2 - x^3"), std::nullopt, Rational(2)}};
  ExtRat nu = nu_next(cuspPairs, Ideal{P("2*y")}, origin, one);
  CHECK(nu == ExtRat(Rational(3, 2)));

  // All pairs inside N: INFINITY.
  std::vector<MarkedPair> inside{{P("y^2 - x^3"), std::nullopt, Rational(2)}};
  CHECK(nu_next(inside, Ideal{P("x"), P("y")}, origin, one).is_infinite());
  CHECK(nu_next({}, Ideal{P("y")}, origin, one).is_infinite());

  // Tacnode year 1: pairs {(-x^2, 2)}, Erest = {E1: x} gives the monomial
  // case mu2 = 1, mu_{2,E1} = 1, nu2 = 0.
  std::vector<MarkedPair> tp{{P("-x^2"), std::nullopt, Rational(2)}};
  auto cd = companion_subtract(tp, {{"E1", P("x")}}, Ideal{P("y")}, origin, one);
  CHECK(cd.mu == ExtRat(Rational(1)));
  CHECK(cd.nu == ExtRat(Rational(0)));
  REQUIRE(cd.per_divisor.count("E1") == 1);
  CHECK(cd.per_divisor.at("E1") == Rational(1));

  // Cusp year 0 has no companion divisors.
  auto cc = companion_subtract(cuspPairs, {}, Ideal{P("2*y")}, origin, one);
  CHECK(cc.nu == ExtRat(Rational(3, 2)));
  CHECK(cc.per_divisor.empty());

  // Infinite mu propagates.
  auto ci = companion_subtract(inside, {{"E1", P("x")}}, Ideal{P("x"), P("y")},
                               origin, one);
  CHECK(ci.mu.is_infinite());
  CHECK(ci.nu.is_infinite());
  CHECK(ci.per_divisor.empty());
}

TEST_CASE("mark scaling and monomial extraction") {
  std::vector<MarkedPair> pairs{{P("x"), std::nullopt, Rational(1)},
                                {P("y"), std::nullopt, Rational(2)}};
  auto scaled = scale_to_common_mark(pairs, Rational(2));
  CHECK(scaled[0].h == P("x^2"));
  CHECK(scaled[0].mu == Rational(2));
  CHECK(scaled[1].h == P("y"));
  CHECK_THROWS_AS((void)scale_to_common_mark(pairs, Rational(3)),
                  InvariantError);

  auto rescaled = scale_pairs(pairs, Rational(3, 2));
  CHECK(rescaled[0].mu == Rational(3, 2));
  CHECK(rescaled[1].mu == Rational(3));
  CHECK_THROWS_AS((void)scale_pairs(pairs, Rational(0)), InvariantError);

  std::vector<MarkedPair> mp{{P("x^2*y"), std::nullopt, Rational(1)},
                             {P("x*y^3"), std::nullopt, Rational(1)}};
  auto quot = monomial_divide(mp, {P("x"), P("y")}, Ideal{});
  REQUIRE(quot.size() == 2);
  CHECK(quot[0].h == P("x"));
  CHECK(quot[1].h == P("y^2"));

  // Nothing to extract when some pair misses the divisor.
  std::vector<MarkedPair> mq{{P("x*y"), std::nullopt, Rational(1)},
                             {P("y^2"), std::nullopt, Rational(1)}};
  auto none = monomial_divide(mq, {P("x")}, Ideal{});
  CHECK(none[0].h == P("x*y"));

  // Mixed marks are rejected.
  CHECK_THROWS_AS((void)monomial_divide(pairs, {P("x")}, Ideal{}),
                  InvariantError);
}

TEST_CASE("year-zero invariant words for the desk corpus") {
  auto word_at = [](const Poly& g, const VarList& vars, const PointQ& a) {
    ResolutionTree t = make_tree(g, vars);
    InvariantEngine eng(t);
    return eng.at_point("c0", a);
  };

  CHECK(word_at(P("y^2 - x^3"), XY, origin2).str() == "(2,0; 3/2,0; inf)");
  CHECK(word_at(P("y^2 - x^4"), XY, origin2).str() == "(2,0; 2,0; inf)");
  CHECK(word_at(P("y^2 - x^5"), XY, origin2).str() == "(2,0; 5/2,0; inf)");
  CHECK(word_at(P("x*y"), XY, origin2).str() == "(2,0; 1,0; inf)");
  CHECK(word_at(P("x^2 - y^2*z", XYZ), XYZ, origin3).str() ==
        "(2,0; 3/2,0; 1,0; inf)");
  CHECK(word_at(P("x", XY), XY, origin2).str() == "(1,0; inf)");

  // Smooth point of the cusp.
  CHECK(word_at(P("y^2 - x^3"), XY, {Rational(1), Rational(1)}).str() ==
        "(1,0; inf)");
  // Point on the punctured z-axis of the umbrella.
  CHECK(word_at(P("x^2 - y^2*z", XYZ), XYZ,
                {Rational(0), Rational(0), Rational(1)})
            .str() == "(2,0; 1,0; inf)");

  // Off the hypersurface: error.
  ResolutionTree t = make_tree(P("y^2 - x^3"), XY);
  InvariantEngine eng(t);
  CHECK_THROWS_AS((void)eng.at_point("c0", {Rational(1), Rational(2)}),
                  InvariantError);

  // Every corpus word satisfies the integrality bounds.
  for (const auto& w :
       {word_at(P("y^2 - x^3"), XY, origin2),
        word_at(P("y^2 - x^4"), XY, origin2),
        word_at(P("y^2 - x^5"), XY, origin2), word_at(P("x*y"), XY, origin2),
        word_at(P("x^2 - y^2*z", XYZ), XYZ, origin3)})
    CHECK(e_bounds_check(w));
}

TEST_CASE("invariant words after blowups match the hand traces") {
  // Cusp: after one origin blowup, the x-chart singular point carries
  // (1,1; 2,0; inf) -- smooth strict transform tangent to the divisor.
  ResolutionTree cusp = make_tree(P("y^2 - x^3"), XY);
  blow_at(cusp, "c0", {P("x"), P("y")}, "E1");
  CHECK(cusp.transform.at("c0.1") == P("y^2 - x"));
  InvariantEngine eng(cusp);
  CHECK(eng.at_point("c0.1", origin2).str() == "(1,1; 2,0; inf)");

  // Chart 2 holds no singular point of the strict transform at its origin.
  CHECK_THROWS_AS((void)eng.at_point("c0.2", origin2), InvariantError);

  // Year 2: blowing up the tangent point, the y-chart origin is the triple
  // point of the total transform: (1,1; 0) with companion-mu 1.
  blow_at(cusp, "c0.1", {P("x"), P("y")}, "E2");
  CHECK(cusp.transform.at("c0.1.2") == P("y - x"));
  InvariantEngine eng2(cusp);
  InvariantWord triple = eng2.at_point("c0.1.2", origin2);
  CHECK(triple.str() == "(1,1; 0)");
  REQUIRE(triple.companion.has_value());
  CHECK(*triple.companion == Rational(1));
  CHECK(e_bounds_check(triple));

  // Tacnode after one blowup: nu_1 stays 2 so i = 0 and E^1 is empty; the
  // monomial case (2,0; 0) with companion-mu 1 appears at the origin.
  ResolutionTree tac = make_tree(P("y^2 - x^4"), XY);
  blow_at(tac, "c0", {P("x"), P("y")}, "E1");
  CHECK(tac.transform.at("c0.1") == P("y^2 - x^2"));
  InvariantEngine teng(tac);
  InvariantWord tw = teng.at_point("c0.1", origin2);
  CHECK(tw.str() == "(2,0; 0)");
  REQUIRE(tw.companion.has_value());
  CHECK(*tw.companion == Rational(1));

  // Umbrella after the origin blowup: the z-chart reproduces the umbrella
  // with the divisor counted in s_2.
  ResolutionTree umb = make_tree(P("x^2 - y^2*z", XYZ), XYZ);
  blow_at(umb, "c0", {P("x", XYZ), P("y", XYZ), P("z", XYZ)}, "E1");
  CHECK(umb.transform.at("c0.3") == P("x^2 - y^2*z", XYZ));
  InvariantEngine ueng(umb);
  CHECK(ueng.at_point("c0.3", origin3).str() == "(2,0; 1,1; 1,0; inf)");
}

TEST_CASE("witness independence") {
  InvariantConfig skip1;
  skip1.witness_skip = 1;
  for (const auto& [g, vars, a] :
       {std::make_tuple(P("y^2 - x^3"), XY, origin2),
        std::make_tuple(P("y^2 - x^4"), XY, origin2),
        std::make_tuple(P("x*y"), XY, origin2),
        std::make_tuple(P("x^2 - y^2*z", XYZ), XYZ, origin3)}) {
    ResolutionTree t = make_tree(g, vars);
    InvariantEngine base(t);
    InvariantEngine other(t, skip1);
    CHECK(word_compare(base.at_point("c0", a), other.at_point("c0", a)) == 0);
  }
}

TEST_CASE("chart stratification finds the singular strata") {
  // Cusp: the singular stratum is the origin with the year-zero word.
  ResolutionTree cusp = make_tree(P("y^2 - x^3"), XY);
  InvariantEngine eng(cusp);
  auto strata = eng.strata("c0");
  REQUIRE(!strata.empty());
  auto best = eng.max_stratum_in_chart("c0");
  REQUIRE(best.has_value());
  CHECK(best->word.str() == "(2,0; 3/2,0; inf)");
  CHECK(ideal_equal(best->locus, {P("x"), P("y")}));
  bool has_smooth = false;
  for (const auto& s : strata)
    if (s.word.str() == "(1,0; inf)") has_smooth = true;
  CHECK(has_smooth);

  // Umbrella: refinement discovers the z-axis and then the origin inside
  // it; the origin wins.
  ResolutionTree umb = make_tree(P("x^2 - y^2*z", XYZ), XYZ);
  InvariantEngine ueng(umb);
  auto ubest = ueng.max_stratum_in_chart("c0");
  REQUIRE(ubest.has_value());
  CHECK(ubest->word.str() == "(2,0; 3/2,0; 1,0; inf)");
  CHECK(ideal_equal(ubest->locus,
                    {P("x", XYZ), P("y", XYZ), P("z", XYZ)}));
  bool has_axis = false;
  for (const auto& s : ueng.strata("c0"))
    if (s.word.str() == "(2,0; 1,0; inf)" &&
        ideal_equal(s.locus, {P("x", XYZ), P("y", XYZ)}))
      has_axis = true;
  CHECK(has_axis);

  // Cusp year 1: the maximum stratum is the tangent origin of chart 1,
  // with the divisor incident.
  blow_at(cusp, "c0", {P("x"), P("y")}, "E1");
  InvariantEngine yeng(cusp);
  auto ybest = yeng.max_stratum_in_chart("c0.1");
  REQUIRE(ybest.has_value());
  CHECK(ybest->word.str() == "(1,1; 2,0; inf)");
  CHECK(ideal_equal(ybest->locus, {P("x"), P("y")}));
  CHECK(ybest->incident == std::vector<std::string>{"E1"});

  // A unit transform has no strata.
  ResolutionTree unit = make_tree(Poly::constant(XY, Rational(1)), XY);
  InvariantEngine ueng2(unit);
  CHECK_FALSE(ueng2.max_stratum_in_chart("c0").has_value());
}

TEST_CASE("divisor subset ordering for the J-extension") {
  ResolutionTree t = make_tree(P("x"), XY);
  t.divisors.push_back({"E1", 1});
  t.divisors.push_back({"E2", 2});
  t.divisors.push_back({"E3", 3});
  // Older divisors weigh more.
  CHECK(j_subset_compare({"E1"}, {"E2"}, t) == 1);
  CHECK(j_subset_compare({"E2"}, {"E1"}, t) == -1);
  // A superset with the same oldest part is heavier.
  CHECK(j_subset_compare({"E1", "E3"}, {"E1"}, t) == 1);
  // Same years: reverse-lexicographic ids decide.
  CHECK(j_subset_compare({"E1"}, {"E1"}, t) == 0);
  CHECK(j_subset_compare({"E1", "E2"}, {"E1", "E2"}, t) == 0);
}
