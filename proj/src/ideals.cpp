#include "desing/ideals.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace desing {

namespace {

// Map p into a new variable list; index_map[i] is the position of the i-th
// old variable in new_vars.
Poly remap(const Poly& p, const VarList& new_vars,
           const std::vector<size_t>& index_map) {
  Poly out(new_vars);
  for (const auto& [e, c] : p.terms()) {
    Exponents ne(new_vars.size(), 0);
    for (size_t i = 0; i < e.size(); ++i) ne[index_map[i]] = e[i];
    out.set_term(ne, c);
  }
  return out;
}

std::vector<size_t> identity_map(size_t n) {
  std::vector<size_t> m(n);
  for (size_t i = 0; i < n; ++i) m[i] = i;
  return m;
}

Ideal nonzero_gens(const Ideal& I) {
  Ideal out;
  for (const auto& g : I)
    if (!g.is_zero()) out.push_back(g);
  return out;
}

// Determinant by Laplace expansion along the first row.
Poly det(const std::vector<std::vector<Poly>>& m, const VarList& vars) {
  size_t n = m.size();
  if (n == 0) return Poly::constant(vars, Rational(1));
  if (n == 1) return m[0][0];
  Poly out(vars);
  int sign = 1;
  for (size_t j = 0; j < n; ++j) {
    if (!m[0][j].is_zero()) {
      std::vector<std::vector<Poly>> sub;
      for (size_t r = 1; r < n; ++r) {
        std::vector<Poly> row;
        for (size_t c = 0; c < n; ++c)
          if (c != j) row.push_back(m[r][c]);
        sub.push_back(std::move(row));
      }
      Poly cof = m[0][j] * det(sub, vars);
      out = (sign > 0) ? out + cof : out - cof;
    }
    sign = -sign;
  }
  return out;
}

void combinations(size_t n, size_t k,
                  const std::function<void(const std::vector<size_t>&)>& fn) {
  std::vector<size_t> idx(k);
  for (size_t i = 0; i < k; ++i) idx[i] = i;
  if (k > n) return;
  while (true) {
    fn(idx);
    size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Divisors of |n| (n nonzero), by trial division.
std::vector<Int> divisors(Int n) {
  if (n < 0) n = -n;
  std::vector<Int> small, large;
  for (Int i = 1; i * i <= n; ++i) {
    if (n % i == 0) {
      small.push_back(i);
      if (i * i != n) large.push_back(n / i);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

// Rational roots of a univariate polynomial given as coefficient vector
// (coefs[k] multiplies x^k), by the rational root theorem.
std::vector<Rational> rational_roots(std::vector<Rational> coefs) {
  while (!coefs.empty() && coefs.back() == 0) coefs.pop_back();
  if (coefs.empty())
    throw std::invalid_argument("rational_roots: zero polynomial");
  std::vector<Rational> roots;
  size_t v = 0;
  while (v < coefs.size() && coefs[v] == 0) ++v;
  if (v > 0) {
    roots.push_back(Rational(0));
    coefs.erase(coefs.begin(), coefs.begin() + static_cast<long>(v));
  }
  if (coefs.size() <= 1) return roots;
  Int scale = 1;
  for (const auto& c : coefs) scale = boost::multiprecision::lcm(scale, denominator(c));
  std::vector<Int> ic;
  for (const auto& c : coefs) {
    Rational s = c * Rational(scale);
    ic.push_back(numerator(s));
  }
  auto eval = [&](const Rational& x) {
    Rational acc(0);
    for (size_t k = ic.size(); k-- > 0;) acc = acc * x + Rational(ic[k]);
    return acc;
  };
  std::set<Rational> found;
  for (const Int& p : divisors(ic.front()))
    for (const Int& q : divisors(ic.back())) {
      Rational cand(p, q);
      if (eval(cand) == 0) found.insert(cand);
      cand = -cand;
      if (eval(cand) == 0) found.insert(cand);
    }
  roots.insert(roots.end(), found.begin(), found.end());
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Lowest-degree univariate polynomial in variable `keep` vanishing on V(I),
// as a coefficient vector; nullopt when no such nonzero polynomial exists.
std::optional<std::vector<Rational>> eliminant(const Ideal& I, size_t keep,
                                               const Budget& budget) {
  const VarList& vars = I.front().vars();
  size_t n = vars.size();
  VarList ring;
  std::vector<size_t> imap(n);
  size_t pos = 0;
  for (size_t i = 0; i < n; ++i)
    if (i != keep) {
      ring.push_back(vars[i]);
      imap[i] = pos++;
    }
  ring.push_back(vars[keep]);
  imap[keep] = n - 1;
  Ideal embedded;
  for (const auto& g : I) embedded.push_back(remap(g, ring, imap));
  MonomialOrder ord;
  ord.elim = n - 1;
  auto G = groebner(embedded, ord, budget);
  std::optional<std::vector<Rational>> best;
  for (const auto& b : G.basis) {
    bool univar = true;
    unsigned deg = 0;
    for (const auto& [e, c] : b.terms()) {
      for (size_t i = 0; i + 1 < n; ++i)
        if (e[i] != 0) univar = false;
      deg = std::max(deg, e[n - 1]);
    }
    if (!univar || b.is_zero()) continue;
    if (!best || deg + 1 < best->size()) {
      std::vector<Rational> coefs(deg + 1, Rational(0));
      for (const auto& [e, c] : b.terms()) coefs[e[n - 1]] = c;
      best = coefs;
    }
  }
  return best;
}

}  // namespace

Ideal derivative_ideal(const Poly& g, unsigned s) {
  if (s == 0) throw std::invalid_argument("derivative_ideal: s must be >= 1");
  Ideal out;
  if (!g.is_zero()) out.push_back(g);
  size_t n = g.vars().size();
  // level holds order-k partials tagged with the last differentiated index,
  // so each multi-index is produced once.
  std::vector<std::pair<Poly, size_t>> frontier{{g, 0}};
  for (unsigned k = 1; k + 1 <= s; ++k) {
    std::vector<std::pair<Poly, size_t>> next;
    for (const auto& [p, start] : frontier)
      for (size_t i = start; i < n; ++i) {
        Poly d = partial_derivative(p, i);
        if (!d.is_zero()) out.push_back(d);
        next.emplace_back(std::move(d), i);
      }
    frontier = std::move(next);
  }
  if (out.empty()) out.push_back(Poly(g.vars()));
  return out;
}

Ideal derivative_ideal(const Ideal& I, unsigned s) {
  Ideal out;
  for (const auto& g : I) {
    Ideal part = derivative_ideal(g, s);
    out.insert(out.end(), part.begin(), part.end());
  }
  return nonzero_gens(out).empty() ? Ideal{Poly(I.front().vars())}
                                   : nonzero_gens(out);
}

long max_order_on_variety(const Poly& g, const Ideal& D,
                          const Budget& budget) {
  if (g.is_zero())
    throw std::invalid_argument("max_order_on_variety: zero polynomial");
  long d = 0;
  long bound = static_cast<long>(g.total_degree());
  while (d <= bound) {
    Ideal J = ideal_sum(derivative_ideal(g, static_cast<unsigned>(d) + 1), D);
    if (is_unit_ideal(nonzero_gens(J), budget)) break;
    ++d;
  }
  return d;
}

ExtNat order_along_locus(const Poly& h, const Ideal& N, const Ideal& L,
                         unsigned kmax, const Budget& budget) {
  auto GN = groebner(N, {}, budget);
  if (ideal_member(h, GN)) return ExtNat::infinity();
  unsigned k = 0;
  while (k < kmax) {
    Ideal J = ideal_sum(N, ideal_power(L, k + 1));
    auto G = groebner(J, {}, budget);
    if (!ideal_member(h, G)) break;
    ++k;
  }
  if (k == kmax)
    throw OrderBudgetExceeded("order_along: order exceeds kmax = " +
                              std::to_string(kmax));
  return ExtNat(static_cast<long>(k));
}

ExtNat order_along(const Poly& h, const Ideal& N, const PointQ& a,
                   unsigned kmax, const Budget& budget) {
  for (const auto& g : N)
    if (!(g.eval(a) == 0))
      throw std::invalid_argument("order_along: point not on V(N)");
  return order_along_locus(h, N, point_ideal(h.vars(), a), kmax, budget);
}

Ideal point_ideal(const VarList& vars, const PointQ& a) {
  if (a.size() != vars.size())
    throw std::invalid_argument("point_ideal: dimension mismatch");
  Ideal out;
  for (size_t i = 0; i < vars.size(); ++i)
    out.push_back(Poly::variable(vars, i) - Poly::constant(vars, a[i]));
  return out;
}

Ideal zero_ideal(const VarList& vars) { return {Poly(vars)}; }

Ideal ideal_sum(const Ideal& a, const Ideal& b) {
  Ideal out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Ideal singular_locus_ideal(const Ideal& I, unsigned codim, const Ideal& D) {
  Ideal gens = nonzero_gens(I);
  const VarList& vars = I.front().vars();
  Ideal sing = ideal_sum(gens, nonzero_gens(D));
  if (codim == 0 || gens.size() < codim || vars.size() < codim) {
    if (codim == 0) sing.push_back(Poly::constant(vars, Rational(1)));
    return sing;
  }
  std::vector<std::vector<Poly>> jac;
  for (const auto& g : gens) {
    std::vector<Poly> row;
    for (size_t i = 0; i < vars.size(); ++i)
      row.push_back(partial_derivative(g, i));
    jac.push_back(std::move(row));
  }
  // Singular locus = points of V(I) ∩ V(D) where every codim-minor of the
  // Jacobian vanishes; smoothness of that codimension is its emptiness.
  combinations(gens.size(), codim, [&](const std::vector<size_t>& rows) {
    combinations(vars.size(), codim, [&](const std::vector<size_t>& cols) {
      std::vector<std::vector<Poly>> sub;
      for (size_t r : rows) {
        std::vector<Poly> row;
        for (size_t c : cols) row.push_back(jac[r][c]);
        sub.push_back(std::move(row));
      }
      Poly m = det(sub, vars);
      if (!m.is_zero()) sing.push_back(std::move(m));
    });
  });
  return sing;
}

bool jacobian_smooth(const Ideal& I, unsigned codim, const Ideal& D,
                     const Budget& budget) {
  if (codim == 0) return true;
  return is_unit_ideal(singular_locus_ideal(I, codim, D), budget);
}

bool vanishes_on(const Poly& f, const Ideal& I, const Budget& budget) {
  if (f.is_zero()) return true;
  const VarList& vars = f.vars();
  std::string tname = "_t";
  while (std::find(vars.begin(), vars.end(), tname) != vars.end())
    tname += "_";
  VarList ring = vars;
  ring.push_back(tname);
  auto imap = identity_map(vars.size());
  Ideal sys;
  for (const auto& g : nonzero_gens(I)) sys.push_back(remap(g, ring, imap));
  Poly t = Poly::variable(ring, ring.size() - 1);
  sys.push_back(Poly::constant(ring, Rational(1)) - t * remap(f, ring, imap));
  return is_unit_ideal(sys, budget);
}

bool localized_member(const Poly& h, const Ideal& J, const Poly& f,
                      const Budget& budget) {
  if (h.is_zero()) return true;
  if (f.is_constant()) {
    if (f.is_zero()) throw std::invalid_argument("localized_member: f = 0");
    return ideal_member(h, groebner(J, {}, budget));
  }
  const VarList& vars = h.vars();
  std::string tname = "_t";
  while (std::find(vars.begin(), vars.end(), tname) != vars.end())
    tname += "_";
  VarList ring = vars;
  ring.push_back(tname);
  auto imap = identity_map(vars.size());
  Ideal sys;
  for (const auto& g : nonzero_gens(J)) sys.push_back(remap(g, ring, imap));
  Poly t = Poly::variable(ring, ring.size() - 1);
  sys.push_back(Poly::constant(ring, Rational(1)) - t * remap(f, ring, imap));
  return ideal_member(remap(h, ring, imap), groebner(sys, {}, budget));
}

ExtNat order_along_localized(const Poly& h, const Ideal& N, const Ideal& L,
                             const Poly& f, unsigned kmax,
                             const Budget& budget) {
  if (localized_member(h, N, f, budget)) return ExtNat::infinity();
  unsigned k = 0;
  while (k < kmax) {
    if (!localized_member(h, ideal_sum(N, ideal_power(L, k + 1)), f, budget))
      break;
    ++k;
  }
  if (k == kmax)
    throw OrderBudgetExceeded("order_along_localized: order exceeds kmax = " +
                              std::to_string(kmax));
  return ExtNat(static_cast<long>(k));
}

Ideal ideal_quotient(const Ideal& J, const Poly& h, const Budget& budget) {
  const VarList& vars = h.vars();
  if (h.is_zero()) return {Poly::constant(vars, Rational(1))};
  if (h.is_unit()) return J;
  size_t n = vars.size();
  VarList ring{"$t"};
  for (const auto& v : vars) ring.push_back(v);
  std::vector<size_t> shift(n);
  for (size_t i = 0; i < n; ++i) shift[i] = i + 1;
  Poly t = Poly::variable(ring, 0);
  Ideal sys;
  for (const auto& j : nonzero_gens(J)) sys.push_back(t * remap(j, ring, shift));
  sys.push_back((Poly::constant(ring, Rational(1)) - t) * remap(h, ring, shift));
  MonomialOrder ord;
  ord.elim = 1;
  auto G = groebner(sys, ord, budget);
  Ideal out;
  for (const auto& b : G.basis) {
    bool pure = true;
    for (const auto& [e, c] : b.terms())
      if (e[0] != 0) pure = false;
    if (!pure) continue;
    Poly r(vars);
    for (const auto& [e, c] : b.terms()) {
      Exponents ne(n, 0);
      for (size_t i = 0; i < n; ++i) ne[i] = e[i + 1];
      r.set_term(ne, c);
    }
    auto q = exact_divide(r, h);
    if (!q)
      throw std::runtime_error("ideal_quotient: inexact division by h");
    out.push_back(std::move(*q));
  }
  if (out.empty()) out.push_back(Poly(vars));
  return out;
}

bool member_at(const Poly& h, const Ideal& J, const Ideal& Z,
               const Poly& avoid, const Budget& budget) {
  if (h.is_zero()) return true;
  // Fast path: global membership.
  if (ideal_member(h, groebner(J, {}, budget))) return true;
  Ideal Q = ideal_quotient(J, h, budget);
  Ideal S = Q;
  for (const auto& z : nonzero_gens(Z)) S.push_back(z);
  if (avoid.is_constant()) {
    if (avoid.is_zero()) return true;  // empty open stratum
    return is_unit_ideal(S, budget);
  }
  const VarList& vars = h.vars();
  std::string tn = "_t";
  while (std::find(vars.begin(), vars.end(), tn) != vars.end()) tn = "_" + tn;
  VarList ring = vars;
  ring.push_back(tn);
  auto idmap = identity_map(vars.size());
  Ideal SE;
  for (const auto& s : S) SE.push_back(remap(s, ring, idmap));
  Poly t = Poly::variable(ring, ring.size() - 1);
  SE.push_back(Poly::constant(ring, Rational(1)) - t * remap(avoid, ring, idmap));
  return is_unit_ideal(SE, budget);
}

ExtNat order_along_stalk(const Poly& h, const Ideal& N, const Ideal& Z,
                         const Poly& avoid, unsigned kmax,
                         const Budget& budget) {
  if (member_at(h, N, Z, avoid, budget)) return ExtNat::infinity();
  unsigned k = 0;
  while (k < kmax) {
    if (!member_at(h, ideal_sum(N, ideal_power(Z, k + 1)), Z, avoid, budget))
      break;
    ++k;
  }
  if (k == kmax)
    throw OrderBudgetExceeded("order_along_stalk: order exceeds kmax = " +
                              std::to_string(kmax));
  return ExtNat(static_cast<long>(k));
}

Ideal image_ideal(const Ideal& Z, const VarList& target_vars,
                  const std::map<std::string, Poly>& components,
                  const Budget& budget) {
  const VarList& src = Z.front().vars();
  size_t m = src.size(), q = target_vars.size();
  VarList ring;
  for (const auto& v : src) ring.push_back("$" + v);
  for (const auto& v : target_vars) ring.push_back(v);
  auto src_map = identity_map(m);
  Ideal sys;
  for (const auto& g : nonzero_gens(Z)) sys.push_back(remap(g, ring, src_map));
  for (size_t j = 0; j < q; ++j) {
    auto it = components.find(target_vars[j]);
    if (it == components.end())
      throw std::invalid_argument("image_ideal: missing component for " +
                                  target_vars[j]);
    Poly comp = remap(it->second, ring, src_map);
    sys.push_back(Poly::variable(ring, m + j) - comp);
  }
  MonomialOrder ord;
  ord.elim = m;
  auto G = groebner(sys, ord, budget);
  Ideal out;
  std::vector<size_t> tgt_map(ring.size(), 0);
  for (size_t j = 0; j < q; ++j) tgt_map[m + j] = j;
  for (const auto& b : G.basis) {
    bool pure = true;
    for (const auto& [e, c] : b.terms())
      for (size_t i = 0; i < m; ++i)
        if (e[i] != 0) pure = false;
    if (!pure) continue;
    Poly r(target_vars);
    for (const auto& [e, c] : b.terms()) {
      Exponents ne(q, 0);
      for (size_t j = 0; j < q; ++j) ne[j] = e[m + j];
      r.set_term(ne, c);
    }
    out.push_back(std::move(r));
  }
  if (out.empty()) out.push_back(Poly(target_vars));
  return out;
}

Ideal ideal_power(const Ideal& L, unsigned k) {
  const VarList& vars = L.front().vars();
  if (k == 0) return {Poly::constant(vars, Rational(1))};
  Ideal gens = nonzero_gens(L);
  if (gens.empty()) return {Poly(vars)};
  Ideal cur = gens;
  for (unsigned i = 1; i < k; ++i) {
    Ideal next;
    for (const auto& a : cur)
      for (const auto& b : gens) next.push_back(a * b);
    // Dedupe to keep generator counts manageable.
    std::sort(next.begin(), next.end(),
              [](const Poly& x, const Poly& y) { return poly_cmp(x, y) < 0; });
    next.erase(std::unique(next.begin(), next.end()), next.end());
    cur = std::move(next);
  }
  return cur;
}

std::string ideal_key(const Ideal& I, const Budget& budget) {
  auto G = groebner(I, {}, budget);
  std::ostringstream os;
  for (const auto& b : G.basis) os << b.str() << ";";
  return os.str();
}

std::optional<std::vector<PointQ>> rational_points(const Ideal& I,
                                                   const Budget& budget) {
  const VarList& vars = I.front().vars();
  size_t n = vars.size();
  Ideal gens = nonzero_gens(I);
  if (gens.empty())
    throw std::invalid_argument("rational_points: positive-dimensional");
  if (is_unit_ideal(gens, budget)) return std::vector<PointQ>{};
  if (dim_ideal(gens, budget) != 0)
    throw std::invalid_argument("rational_points: positive-dimensional");
  std::vector<std::vector<Rational>> axis_roots(n);
  for (size_t i = 0; i < n; ++i) {
    auto u = eliminant(gens, i, budget);
    if (!u) return std::nullopt;
    axis_roots[i] = rational_roots(*u);
    // Certify that every point of V(I) has a rational i-th coordinate:
    // the product of (x_i - r) over the rational roots must vanish on V(I).
    Poly prod = Poly::constant(vars, Rational(1));
    for (const auto& r : axis_roots[i])
      prod = prod * (Poly::variable(vars, i) - Poly::constant(vars, r));
    if (!vanishes_on(prod, gens, budget)) return std::nullopt;
  }
  std::vector<PointQ> points;
  PointQ cur(n);
  std::function<void(size_t)> walk = [&](size_t i) {
    if (i == n) {
      for (const auto& g : gens)
        if (!(g.eval(cur) == 0)) return;
      points.push_back(cur);
      return;
    }
    for (const auto& r : axis_roots[i]) {
      cur[i] = r;
      walk(i + 1);
    }
  };
  walk(0);
  std::sort(points.begin(), points.end());
  return points;
}

}  // namespace desing
