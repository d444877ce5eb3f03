#include <algorithm>
#include <random>

#include "desing/groebner.hpp"
#include "doctest.h"

using namespace desing;

namespace {

const VarList XY{"x", "y"};
const VarList XYZ{"x", "y", "z"};

Poly P(const std::string& s, const VarList& v = XY) { return parse_poly(s, v); }

bool basis_equals(const GroebnerBasis& G, const std::vector<std::string>& want,
                  const VarList& v) {
  if (G.basis.size() != want.size()) return false;
  std::vector<Poly> expect;
  for (const auto& s : want) expect.push_back(parse_poly(s, v));
  std::sort(expect.begin(), expect.end(),
            [](const Poly& a, const Poly& b) { return poly_cmp(a, b) < 0; });
  for (size_t i = 0; i < want.size(); ++i)
    if (!(G.basis[i] == expect[i])) return false;
  return true;
}

// S-polynomial w.r.t. the basis order.
Poly s_poly(const Poly& f, const Poly& g, const MonomialOrder& ord) {
  Exponents ef, eg;
  Rational cf, cg;
  for (const auto& [e, c] : f.terms()) {
    if (ef.empty() || ord.cmp(e, ef) > 0) { ef = e; cf = c; }
  }
  for (const auto& [e, c] : g.terms()) {
    if (eg.empty() || ord.cmp(e, eg) > 0) { eg = e; cg = c; }
  }
  Exponents l(ef.size());
  for (size_t i = 0; i < l.size(); ++i) l[i] = std::max(ef[i], eg[i]);
  Poly mf = Poly::constant(f.vars(), Rational(1) / cf);
  Poly mg = Poly::constant(g.vars(), Rational(1) / cg);
  Exponents df = l, dg = l;
  for (size_t i = 0; i < l.size(); ++i) { df[i] -= ef[i]; dg[i] -= eg[i]; }
  Poly tf(f.vars()), tg(g.vars());
  tf.set_term(df, Rational(1));
  tg.set_term(dg, Rational(1));
  return tf * mf * f - tg * mg * g;
}

}  // namespace

TEST_CASE("groebner basics") {
  CHECK(basis_equals(groebner({P("x")}), {"x"}, XY));
  CHECK(basis_equals(groebner({P("x^2"), P("x")}), {"x"}, XY));
  CHECK(basis_equals(groebner({P("x + y"), P("x - y")}), {"x", "y"}, XY));
  // Zero ideal: empty basis.
  CHECK(groebner({Poly(XY)}).basis.empty());
  // Constant ideal reduces to {1}.
  auto G = groebner({P("2*x + 2"), P("x + 2")});
  CHECK(basis_equals(G, {"1"}, XY));
  // Deterministic: generator order does not matter.
  auto G1 = groebner({P("x^2 - y"), P("x*y - 1")});
  auto G2 = groebner({P("x*y - 1"), P("x^2 - y")});
  REQUIRE(G1.basis.size() == G2.basis.size());
  for (size_t i = 0; i < G1.basis.size(); ++i) CHECK(G1.basis[i] == G2.basis[i]);
}

TEST_CASE("normal form and membership") {
  auto Gx = groebner({P("x")});
  CHECK(normal_form(P("x^2"), Gx).is_zero());
  CHECK(normal_form(P("y"), Gx) == P("y"));
  auto Gxy = groebner({P("x"), P("y")});
  CHECK(normal_form(P("x^2 + y"), Gxy).is_zero());
  CHECK(ideal_member(P("x^3 - x*y"), Gxy));
  CHECK(!ideal_member(P("x + 1"), Gxy));
  // NF is linear and zero exactly on members.
  auto G = groebner({P("y^2 - x^3")});
  Poly h = P("y^2 - x^3") * P("x + y + 1") + P("x - 7");
  CHECK(normal_form(h, G) == normal_form(P("x - 7"), G));
}

TEST_CASE("unit ideal detection") {
  CHECK(is_unit_ideal({P("x"), P("x + 1")}));
  CHECK(!is_unit_ideal({P("x"), P("y")}));
  CHECK(is_unit_ideal({P("x^2 + 1"), P("x - 1")}));
  CHECK(!is_unit_ideal({P("y^2 - x^3")}));
  CHECK(!is_unit_ideal({Poly(XY)}));
}

TEST_CASE("dimension") {
  CHECK(dim_ideal({P("x", XYZ), P("y", XYZ)}) == 1);
  CHECK(dim_ideal({P("y^2 - x^3")}) == 1);
  CHECK(dim_ideal({Poly(XYZ)}) == 3);
  CHECK(dim_ideal({P("x"), P("y")}) == 0);
  CHECK_THROWS_AS((void)dim_ideal({P("x"), P("x + 1")}), std::invalid_argument);
}

TEST_CASE("elimination order blocks") {
  // Eliminate x from (y - x^2, z - x^3): the image curve is cuspidal.
  VarList v{"x", "y", "z"};
  MonomialOrder ord;
  ord.elim = 1;
  auto G = groebner({parse_poly("y - x^2", v), parse_poly("z - x^3", v)}, ord);
  bool found = false;
  for (const auto& b : G.basis) {
    bool has_x = false;
    for (const auto& [e, c] : b.terms())
      if (e[0] != 0) has_x = true;
    if (!has_x && !b.is_zero()) {
      // b generates the elimination ideal (y^3 - z^2).
      auto Ge = groebner({parse_poly("y^3 - z^2", v)});
      CHECK(ideal_member(b, Ge));
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("all S-polynomials of reduced bases reduce to zero") {
  std::mt19937 rng(20260826);
  std::uniform_int_distribution<int> coef(-4, 4), expo(0, 3), nterms(1, 4);
  for (int trial = 0; trial < 40; ++trial) {
    Ideal gens;
    int ngens = 2 + static_cast<int>(rng() % 2);
    for (int g = 0; g < ngens; ++g) {
      Poly p(XY);
      int t = nterms(rng);
      for (int k = 0; k < t; ++k) {
        int c = coef(rng);
        if (c == 0) c = 1;
        Exponents e{static_cast<unsigned>(expo(rng)),
                    static_cast<unsigned>(expo(rng))};
        p.set_term(e, p.coefficient(e) + Rational(c));
      }
      if (!p.is_zero()) gens.push_back(p);
    }
    if (gens.empty()) continue;
    GroebnerBasis G;
    try {
      G = groebner(gens);
    } catch (const BudgetExceeded&) {
      continue;
    }
    for (size_t i = 0; i < G.basis.size(); ++i)
      for (size_t j = i + 1; j < G.basis.size(); ++j)
        CHECK(normal_form(s_poly(G.basis[i], G.basis[j], G.order), G).is_zero());
    // Every original generator is a member.
    for (const auto& g : gens) CHECK(ideal_member(g, G));
  }
}

TEST_CASE("budget exhaustion is a distinct failure") {
  Budget tiny;
  tiny.max_pairs = 1;
  tiny.max_degree = 2;
  CHECK_THROWS_AS(
      (void)groebner({P("x^5*y^2 - y"), P("x^2*y^5 - x"), P("x^3 + y^3 - 1")},
                     {}, tiny),
      BudgetExceeded);
}
