#include "desing/groebner.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace desing {

int MonomialOrder::cmp(const Exponents& a, const Exponents& b) const {
  if (elim == 0 || elim >= a.size()) return grevlex_cmp(a, b);
  Exponents a1(a.begin(), a.begin() + elim), b1(b.begin(), b.begin() + elim);
  int c = grevlex_cmp(a1, b1);
  if (c != 0) return c;
  Exponents a2(a.begin() + elim, a.end()), b2(b.begin() + elim, b.end());
  return grevlex_cmp(a2, b2);
}

int poly_cmp(const Poly& a, const Poly& b) {
  auto ita = a.terms().begin(), itb = b.terms().begin();
  while (ita != a.terms().end() && itb != b.terms().end()) {
    int c = grevlex_cmp(ita->first, itb->first);
    if (c != 0) return c;
    if (ita->second != itb->second) return ita->second < itb->second ? -1 : 1;
    ++ita;
    ++itb;
  }
  if (ita != a.terms().end()) return 1;
  if (itb != b.terms().end()) return -1;
  return 0;
}

namespace {

// Leading exponent of p with respect to `ord` (scan; polys are small).
const Exponents* leading(const Poly& p, const MonomialOrder& ord) {
  const Exponents* best = nullptr;
  for (auto& [e, c] : p.terms()) {
    if (!best || ord.cmp(e, *best) > 0) best = &e;
  }
  return best;
}

bool divides(const Exponents& d, const Exponents& e) {
  for (size_t i = 0; i < d.size(); ++i)
    if (d[i] > e[i]) return false;
  return true;
}

Exponents lcm_exp(const Exponents& a, const Exponents& b) {
  Exponents r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = std::max(a[i], b[i]);
  return r;
}

unsigned long exp_degree(const Exponents& e) {
  unsigned long d = 0;
  for (unsigned x : e) d += x;
  return d;
}

Poly monomial(const VarList& vars, const Exponents& e, const Rational& c) {
  Poly m{vars};
  m.set_term(e, c);
  return m;
}

void check_degree(const Poly& p, const Budget& budget) {
  if (p.total_degree() > budget.max_degree)
    throw BudgetExceeded("groebner: degree cap exceeded");
}

// Full reduction of p modulo the list of (poly, leading exponent) pairs.
Poly reduce_full(const Poly& p, const std::vector<Poly>& basis,
                 const std::vector<Exponents>& lts, const MonomialOrder& ord,
                 const Budget& budget) {
  Poly r = p;
  Poly out(p.vars());
  while (!r.is_zero()) {
    // Largest term of r w.r.t. ord.
    const Exponents* re = leading(r, ord);
    bool reduced = false;
    for (size_t i = 0; i < basis.size(); ++i) {
      if (!divides(lts[i], *re)) continue;
      Exponents q(re->size());
      for (size_t k = 0; k < q.size(); ++k) q[k] = (*re)[k] - lts[i][k];
      Rational qc =
          r.coefficient(*re) / basis[i].coefficient(lts[i]);
      r = r - monomial(p.vars(), q, qc) * basis[i];
      check_degree(r, budget);
      reduced = true;
      break;
    }
    if (!reduced) {
      // Move the leading term to the output and continue with the tail.
      Rational c = r.coefficient(*re);
      out.set_term(*re, c);
      r.set_term(*re, 0);
    }
  }
  return out;
}

}  // namespace

GroebnerBasis groebner(const Ideal& gens, MonomialOrder order,
                       const Budget& budget) {
  GroebnerBasis G;
  G.order = order;
  if (gens.empty()) throw std::invalid_argument("groebner: empty ideal");
  G.vars = gens.front().vars();
  for (auto& g : gens)
    if (g.vars() != G.vars)
      throw std::invalid_argument("groebner: mixed variable lists");

  std::vector<Poly> basis;
  std::vector<Exponents> lts;
  auto add_poly = [&](const Poly& p) {
    const Exponents* lt = leading(p, order);
    Poly m = p * (Rational(1) / p.coefficient(*lt));
    basis.push_back(m);
    lts.push_back(*lt);
  };

  std::vector<Poly> start;
  for (auto& g : gens)
    if (!g.is_zero()) start.push_back(g);
  std::sort(start.begin(), start.end(),
            [](const Poly& a, const Poly& b) { return poly_cmp(a, b) < 0; });
  start.erase(std::unique(start.begin(), start.end()), start.end());
  for (auto& g : start) add_poly(g);

  // Pair queue with deterministic normal selection.
  struct Pair {
    unsigned long deg;
    size_t i, j;
    bool operator<(const Pair& o) const {
      if (deg != o.deg) return deg < o.deg;
      if (j != o.j) return j < o.j;
      return i < o.i;
    }
  };
  std::set<Pair> pairs;
  std::set<std::pair<size_t, size_t>> done;
  auto push_pairs = [&](size_t j) {
    for (size_t i = 0; i < j; ++i)
      pairs.insert({exp_degree(lcm_exp(lts[i], lts[j])), i, j});
  };
  for (size_t j = 0; j < basis.size(); ++j) push_pairs(j);

  long processed = 0;
  while (!pairs.empty()) {
    Pair pr = *pairs.begin();
    pairs.erase(pairs.begin());
    size_t i = pr.i, j = pr.j;
    done.insert({i, j});
    Exponents L = lcm_exp(lts[i], lts[j]);
    // Product criterion: coprime leading monomials.
    if (exp_degree(L) == exp_degree(lts[i]) + exp_degree(lts[j])) continue;
    // Chain criterion: some k with LT_k | L and both (i,k),(j,k) done.
    bool skip = false;
    for (size_t k = 0; k < basis.size() && !skip; ++k) {
      if (k == i || k == j || !divides(lts[k], L)) continue;
      auto key = [&](size_t a, size_t b) {
        return std::make_pair(std::min(a, b), std::max(a, b));
      };
      if (done.count(key(i, k)) && done.count(key(j, k))) skip = true;
    }
    if (skip) continue;
    if (++processed > budget.max_pairs)
      throw BudgetExceeded("groebner: pair budget exceeded");
    Exponents qi(L.size()), qj(L.size());
    for (size_t k = 0; k < L.size(); ++k) {
      qi[k] = L[k] - lts[i][k];
      qj[k] = L[k] - lts[j][k];
    }
    Poly s = monomial(G.vars, qi, 1) * basis[i] -
             monomial(G.vars, qj, 1) * basis[j];
    check_degree(s, budget);
    Poly r = reduce_full(s, basis, lts, order, budget);
    if (!r.is_zero()) {
      add_poly(r);
      push_pairs(basis.size() - 1);
    }
  }

  // Inter-reduce to the unique reduced basis.
  // Drop elements whose leading monomial is divisible by another's.
  std::vector<bool> keep(basis.size(), true);
  for (size_t i = 0; i < basis.size(); ++i) {
    for (size_t j = 0; j < basis.size() && keep[i]; ++j) {
      if (i == j || !keep[j]) continue;
      if (divides(lts[j], lts[i]) &&
          !(lts[i] == lts[j] && j > i))
        keep[i] = false;
    }
  }
  std::vector<Poly> kept;
  std::vector<Exponents> kept_lts;
  for (size_t i = 0; i < basis.size(); ++i) {
    if (keep[i]) {
      kept.push_back(basis[i]);
      kept_lts.push_back(lts[i]);
    }
  }
  // Tail-reduce each against the others.
  std::vector<Poly> final_basis;
  for (size_t i = 0; i < kept.size(); ++i) {
    std::vector<Poly> others;
    std::vector<Exponents> olts;
    for (size_t j = 0; j < kept.size(); ++j) {
      if (j == i) continue;
      others.push_back(kept[j]);
      olts.push_back(kept_lts[j]);
    }
    Poly r = others.empty()
                 ? kept[i]
                 : reduce_full(kept[i], others, olts, order, budget);
    if (!r.is_zero()) {
      const Exponents* lt = leading(r, order);
      final_basis.push_back(r * (Rational(1) / r.coefficient(*lt)));
    }
  }
  std::sort(final_basis.begin(), final_basis.end(),
            [](const Poly& a, const Poly& b) { return poly_cmp(a, b) < 0; });
  G.basis = final_basis;
  return G;
}

Poly normal_form(const Poly& p, const GroebnerBasis& G) {
  if (p.vars() != G.vars)
    throw std::invalid_argument("normal_form: variable mismatch");
  if (G.basis.empty()) return p;
  std::vector<Exponents> lts;
  for (auto& b : G.basis) lts.push_back(*leading(b, G.order));
  Budget big;
  big.max_degree = 1 << 20;
  return reduce_full(p, G.basis, lts, G.order, big);
}

bool ideal_member(const Poly& p, const GroebnerBasis& G) {
  return normal_form(p, G).is_zero();
}

bool is_unit_ideal(const Ideal& I, const Budget& budget) {
  GroebnerBasis G = groebner(I, {}, budget);
  return G.basis.size() == 1 && G.basis[0].is_unit();
}

long dim_ideal(const Ideal& I, const Budget& budget) {
  GroebnerBasis G = groebner(I, {}, budget);
  if (G.basis.size() == 1 && G.basis[0].is_unit())
    throw std::invalid_argument("dim_ideal: unit ideal");
  size_t n = I.front().nvars();
  if (G.basis.empty()) return static_cast<long>(n);
  std::vector<Exponents> lts;
  for (auto& b : G.basis) lts.push_back(b.leading_exponents());
  // Maximal subset S of variables such that no leading monomial is
  // supported entirely inside S.
  long best = 0;
  for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
    long size = 0;
    for (size_t i = 0; i < n; ++i)
      if (mask & (1ul << i)) ++size;
    if (size <= best) continue;
    bool independent = true;
    for (auto& e : lts) {
      bool inside = true;
      for (size_t i = 0; i < n && inside; ++i)
        if (e[i] > 0 && !(mask & (1ul << i))) inside = false;
      if (inside) {
        independent = false;
        break;
      }
    }
    if (independent) best = size;
  }
  return best;
}

}  // namespace desing
