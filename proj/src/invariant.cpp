#include "desing/invariant.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

namespace desing {

namespace {

Poly one_poly(const VarList& vars) { return Poly::constant(vars, Rational(1)); }

Ideal plus(const Ideal& I, const Poly& p) {
  Ideal r = I;
  r.push_back(p);
  return r;
}

unsigned to_exp(const Rational& m) {
  if (den(m) != 1 || num(m) <= 0 || num(m) > 1000000)
    throw InvariantError("mark is not a small positive integer: " +
                         rational_str(m));
  return num(m).convert_to<unsigned>();
}

Int lcm_int(const Int& a, const Int& b) {
  using boost::multiprecision::gcd;
  return a / gcd(a, b) * b;
}

// Rewrite p over vars extended by one trailing variable.
Poly extend_poly(const Poly& p, const VarList& ext) {
  return substitute_named(p, ext, {});
}

VarList extended_vars(const VarList& vars) {
  std::string t = "_t";
  while (std::find(vars.begin(), vars.end(), t) != vars.end()) t = "_" + t;
  VarList ext = vars;
  ext.push_back(t);
  return ext;
}

// u vanishes identically on V(Z) minus V(avoid).
bool vanishes_on_open(const Poly& u, const Ideal& Z, const Poly& avoid,
                      const Budget& B) {
  if (u.is_zero()) return true;
  if (avoid.is_constant()) return vanishes_on(u, Z, B);
  VarList ext = extended_vars(u.vars());
  Poly t = Poly::variable(ext, ext.size() - 1);
  Ideal ZE;
  for (const Poly& z : Z) ZE.push_back(extend_poly(z, ext));
  ZE.push_back(one_poly(ext) - t * extend_poly(avoid, ext));
  return vanishes_on(extend_poly(u, ext), ZE, B);
}

// u vanishes nowhere on V(Z) minus V(avoid).
bool unit_on_open(const Poly& u, const Ideal& Z, const Poly& avoid,
                  const Budget& B) {
  if (u.is_zero()) return false;
  if (avoid.is_constant()) return is_unit_ideal(plus(Z, u), B);
  VarList ext = extended_vars(u.vars());
  Poly t = Poly::variable(ext, ext.size() - 1);
  Ideal S;
  for (const Poly& z : Z) S.push_back(extend_poly(z, ext));
  S.push_back(extend_poly(u, ext));
  S.push_back(one_poly(ext) - t * extend_poly(avoid, ext));
  return is_unit_ideal(S, B);
}

// Largest k with h in (N + theta^k) stalk-wise near the open stratum;
// INFINITY iff h is in N there.
ExtNat theta_order(const Poly& h, const Ideal& N, const Poly& theta,
                   const Ideal& Z, const Poly& avoid, unsigned kmax,
                   const Budget& B) {
  if (member_at(h, N, Z, avoid, B)) return ExtNat::infinity();
  unsigned k = 0;
  while (k < kmax) {
    if (!member_at(h, plus(N, theta.pow(k + 1)), Z, avoid, B)) break;
    ++k;
  }
  if (k == kmax)
    throw OrderBudgetExceeded("divisor order filtration did not stabilize");
  return ExtNat(static_cast<long>(k));
}

// Integer direction vectors: nonzero, first nonzero entry positive,
// grouped by increasing max-norm, each coordinate cycling 0,1,-1,2,-2,...
std::vector<std::vector<long>> directions(size_t n, long bound) {
  if (n > 5 && bound > 1) bound = 1;
  std::vector<std::vector<long>> out;
  std::vector<long> v(n, 0);
  for (long R = 1; R <= bound; ++R) {
    std::function<void(size_t)> rec = [&](size_t i) {
      if (out.size() >= 500) return;
      if (i == n) {
        long mx = 0;
        long first = 0;
        for (long c : v) {
          mx = std::max(mx, std::abs(c));
          if (first == 0) first = c;
        }
        if (mx == R && first > 0) out.push_back(v);
        return;
      }
      for (long a = 0; a <= R; ++a) {
        v[i] = a;
        rec(i + 1);
        if (a > 0) {
          v[i] = -a;
          rec(i + 1);
        }
      }
      v[i] = 0;
    };
    rec(0);
  }
  return out;
}

struct Derivation {
  std::vector<Poly> coef;  // one per variable; zero entries allowed

  Poly apply(const Poly& p) const {
    Poly r(p.vars());
    for (size_t i = 0; i < coef.size(); ++i) {
      if (coef[i].is_zero()) continue;
      r = r + coef[i] * partial_derivative(p, i);
    }
    return r;
  }
  Poly apply(const Poly& p, unsigned times) const {
    Poly r = p;
    for (unsigned q = 0; q < times; ++q) r = apply(r);
    return r;
  }
};

// Derivations tangent to N (they map N into N): constant directions in
// spiral order, then the Hamiltonian-style pair derivations of the basis
// elements of N.
std::vector<Derivation> tangent_derivations(const Ideal& N,
                                            const VarList& vars, long bound,
                                            const Budget& B) {
  GroebnerBasis GN = groebner(N.empty() ? zero_ideal(vars) : N, {}, B);
  size_t n = vars.size();
  std::vector<Derivation> out;
  for (const auto& v : directions(n, bound)) {
    bool ok = true;
    for (const Poly& b : GN.basis) {
      Poly t(vars);
      for (size_t i = 0; i < n; ++i)
        if (v[i] != 0)
          t = t + partial_derivative(b, i) * Rational(v[i]);
      if (!ideal_member(t, GN)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    Derivation D;
    D.coef.assign(n, Poly(vars));
    for (size_t i = 0; i < n; ++i)
      if (v[i] != 0) D.coef[i] = Poly::constant(vars, Rational(v[i]));
    out.push_back(std::move(D));
  }
  for (const Poly& b : GN.basis) {
    for (size_t i = 0; i + 1 < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) {
        Poly bi = partial_derivative(b, i);
        Poly bj = partial_derivative(b, j);
        if (bi.is_zero() && bj.is_zero()) continue;
        Derivation D;
        D.coef.assign(n, Poly(vars));
        D.coef[i] = bj;
        D.coef[j] = -bi;
        bool ok = true;
        for (const Poly& c : GN.basis) {
          if (!ideal_member(D.apply(c), GN)) {
            ok = false;
            break;
          }
        }
        if (ok) out.push_back(std::move(D));
        if (out.size() >= 600) return out;
      }
    }
  }
  // Two-generator Jacobian minors: for gens b, c and coordinates i<j<k the
  // signed 2x2 minors of their gradients give a derivation tangent to both
  // (the cross product of the gradients when n = 3).  Needed once V(N) has
  // codimension two, where no single-generator skew derivation survives.
  for (size_t a = 0; a + 1 < GN.basis.size(); ++a) {
    for (size_t b = a + 1; b < GN.basis.size(); ++b) {
      std::vector<Poly> da, db;
      for (size_t i = 0; i < n; ++i) {
        da.push_back(partial_derivative(GN.basis[a], i));
        db.push_back(partial_derivative(GN.basis[b], i));
      }
      for (size_t i = 0; i + 2 < n; ++i) {
        for (size_t j = i + 1; j + 1 < n; ++j) {
          for (size_t k = j + 1; k < n; ++k) {
            Derivation D;
            D.coef.assign(n, Poly(vars));
            D.coef[i] = da[j] * db[k] - da[k] * db[j];
            D.coef[j] = da[k] * db[i] - da[i] * db[k];
            D.coef[k] = da[i] * db[j] - da[j] * db[i];
            if (D.coef[i].is_zero() && D.coef[j].is_zero() &&
                D.coef[k].is_zero())
              continue;
            bool ok = true;
            for (const Poly& c : GN.basis) {
              if (!ideal_member(D.apply(c), GN)) {
                ok = false;
                break;
              }
            }
            if (ok) out.push_back(std::move(D));
            if (out.size() >= 600) return out;
          }
        }
      }
    }
  }
  // Tangent derivations form a module, so pairwise sums and differences are
  // again tangent; they are needed when no single generator certifies a
  // maximal contact (e.g. a mixed direction like y d/dx + d/dy + d/dz).
  const size_t base = out.size();
  for (size_t i = 0; i < base; ++i) {
    for (size_t j = i + 1; j < base; ++j) {
      for (int sign : {1, -1}) {
        Derivation D;
        D.coef.assign(n, Poly(vars));
        bool zero = true;
        for (size_t k = 0; k < n; ++k) {
          D.coef[k] = sign == 1 ? out[i].coef[k] + out[j].coef[k]
                                : out[i].coef[k] - out[j].coef[k];
          if (!D.coef[k].is_zero()) zero = false;
        }
        if (!zero) out.push_back(std::move(D));
        if (out.size() >= 600) return out;
      }
    }
  }
  return out;
}

// Thrown inside the cascade when a contact certificate holds at the
// generic point of the stratum but fails on the proper sublocus V(u);
// the stratification splits along u and retries.
struct NeedsRefinement {
  Poly u;
};

// Iterate reduced-basis + squarefree generator simplification; makes the
// common monomial-style branch loci radical so that the power filtration
// measures orders correctly.
Ideal simplify_locus(const Ideal& Z, const Budget& B) {
  Ideal cur = Z;
  for (int pass = 0; pass < 6; ++pass) {
    GroebnerBasis G = groebner(cur, {}, B);
    Ideal next;
    for (const Poly& b : G.basis) {
      if (b.is_zero()) continue;
      next.push_back(b.is_constant() ? b : squarefree_part(b));
    }
    if (next == G.basis || next == cur) return next;
    cur = next;
  }
  return cur;
}

ExtNat ord_loc(const Poly& h, const Ideal& N, const Ideal& Z,
               const Poly& avoid, const InvariantConfig& cfg) {
  return order_along_stalk(h, N, Z, avoid, cfg.kmax, cfg.budget);
}

struct ContactChoice {
  Poly eta;
  Derivation D;
  size_t pair_index = 0;
};

// Find a maximal-contact witness for the presentation: a pair (h, mu) and
// a derivation D tangent to N with eta = D^{mu-1} h of generic order
// exactly 1 along the stratum, D eta a unit on the stratum, and V(N + eta)
// containing no remaining companion divisor.
ContactChoice find_contact(const std::vector<MarkedPair>& pairs,
                           size_t n_pre, const Ideal& N, const Ideal& Z,
                           const Poly& avoid,
                           const std::vector<std::pair<std::string, Poly>>& erest,
                           const VarList& vars, bool generic_ok,
                           const InvariantConfig& cfg) {
  auto derivs = tangent_derivations(N, vars, cfg.coef_bound, cfg.budget);
  std::vector<ContactChoice> full;
  std::optional<ContactChoice> generic;
  std::optional<Poly> split_u;
  const size_t want = static_cast<size_t>(std::max(0L, cfg.witness_skip)) + 1;
  // Only pairs that participated in the order computation may witness
  // order exactness; divisor pairs appended afterwards would certify the
  // augmented system instead of nu itself.
  for (size_t p = 0; p < std::min(pairs.size(), n_pre) && full.size() < want;
       ++p) {
    const Poly& h = pairs[p].h;
    if (h.is_zero()) continue;
    unsigned mu = to_exp(pairs[p].mu);
    if (mu > 40) continue;
    for (const Derivation& D : derivs) {
      Poly eta = D.apply(h, mu - 1);
      if (eta.is_zero()) continue;
      ExtNat o = ord_loc(eta, N, Z, avoid, cfg);
      if (o.is_infinite() || o.value() != 1) continue;
      bool contains_divisor = false;
      Ideal N1 = plus(N, eta);
      for (const auto& dv : erest) {
        if (vanishes_on_open(dv.second, N1, avoid, cfg.budget)) {
          contains_divisor = true;
          break;
        }
      }
      if (contains_divisor) continue;
      Poly u = D.apply(eta);
      if (vanishes_on_open(u, Z, avoid, cfg.budget)) continue;
      if (unit_on_open(u, Z, avoid, cfg.budget)) {
        full.push_back({eta, D, p});
        if (full.size() >= want) break;
      } else if (!generic) {
        generic = ContactChoice{eta, D, p};
        split_u = u;
      }
    }
  }
  if (!full.empty()) {
    size_t idx = std::min(static_cast<size_t>(std::max(0L, cfg.witness_skip)),
                          full.size() - 1);
    return full[idx];
  }
  if (generic) {
    if (generic_ok) return *generic;
    throw NeedsRefinement{*split_u};
  }
  throw InvariantError("no maximal-contact witness found");
}

Rational lcm_marks(const std::vector<MarkedPair>& pairs) {
  Int L = 1;
  for (const auto& p : pairs) {
    if (den(p.mu) != 1 || num(p.mu) <= 0)
      throw InvariantError("non-integral mark: " + rational_str(p.mu));
    L = lcm_int(L, num(p.mu));
  }
  return Rational(L);
}

// Common-mark monomial extraction localized away from V(avoid).
std::vector<MarkedPair> extract_monomials(
    const std::vector<MarkedPair>& pairs, const std::vector<Poly>& eqs,
    const Ideal& N_in, const Ideal& Z, const Poly& avoid,
    const InvariantConfig& cfg) {
  if (pairs.empty() || eqs.empty()) return pairs;
  const Ideal N =
      N_in.empty() ? zero_ideal(pairs.front().h.vars()) : N_in;
  std::vector<unsigned> exps;
  bool any = false;
  for (const Poly& th : eqs) {
    std::optional<unsigned> e;
    for (const auto& p : pairs) {
      if (p.h.is_zero() || member_at(p.h, N, Z, avoid, cfg.budget)) continue;
      ExtNat k = theta_order(p.h, N, th, Z, avoid, cfg.kmax, cfg.budget);
      unsigned kv = static_cast<unsigned>(k.value());
      e = e ? std::min(*e, kv) : kv;
      if (*e == 0) break;
    }
    exps.push_back(e.value_or(0));
    any = any || exps.back() > 0;
  }
  if (!any) return pairs;
  const VarList& vars = pairs.front().h.vars();
  GroebnerBasis GN =
      groebner(N.empty() ? zero_ideal(vars) : N, {}, cfg.budget);
  auto try_divide = [](Poly q, const std::vector<Poly>& ths,
                       const std::vector<unsigned>& es) -> std::optional<Poly> {
    for (size_t t = 0; t < ths.size(); ++t)
      for (unsigned c = 0; c < es[t] && !q.is_zero(); ++c) {
        auto d = exact_divide(q, ths[t]);
        if (!d) return std::nullopt;
        q = *d;
      }
    return q;
  };
  std::vector<MarkedPair> out;
  for (const auto& p : pairs) {
    std::optional<Poly> q = try_divide(normal_form(p.h, GN), eqs, exps);
    // The stalk order along Z can exceed the plain divisibility order of
    // the default normal form (h may be theta-divisible only modulo N).
    // Retry with representatives reduced under each single-variable
    // elimination order, which rewrites h in terms of the remaining
    // variables whenever N permits it.
    for (size_t v = 0; !q && v < vars.size(); ++v) {
      VarList pv{vars[v]};
      for (size_t i = 0; i < vars.size(); ++i)
        if (i != v) pv.push_back(vars[i]);
      auto reparse = [](const Poly& f, const VarList& target) {
        return f.is_zero() ? Poly::constant(target, Rational(0))
                           : parse_poly(f.str(), target);
      };
      Ideal Np;
      for (const auto& n : N)
        if (!n.is_zero()) Np.push_back(reparse(n, pv));
      if (Np.empty()) break;
      GroebnerBasis GNp = groebner(Np, MonomialOrder{1}, cfg.budget);
      std::vector<Poly> eqsp;
      for (const auto& th : eqs) eqsp.push_back(reparse(th, pv));
      auto qp = try_divide(normal_form(reparse(p.h, pv), GNp), eqsp, exps);
      if (qp) q = reparse(*qp, vars);
    }
    if (!q)
      throw InvariantError(
          "monomial extraction failed: divisor factor is not exact");
    out.push_back({*q, p.denom, p.mu});
  }
  return out;
}

Rational companion_total(const std::vector<MarkedPair>& pairs,
                         const std::vector<std::pair<std::string, Poly>>& erest,
                         const Ideal& N, const Ideal& Z, const Poly& avoid,
                         const InvariantConfig& cfg) {
  Rational m = lcm_marks(pairs);
  auto scaled = scale_to_common_mark(pairs, m);
  std::optional<Rational> best;
  for (const auto& p : scaled) {
    if (p.h.is_zero() || member_at(p.h, N, Z, avoid, cfg.budget)) continue;
    Rational total(0);
    bool ok = true;
    for (const auto& dv : erest) {
      ExtNat k = theta_order(p.h, N, dv.second, Z, avoid, cfg.kmax, cfg.budget);
      if (k.is_infinite()) {
        ok = false;
        break;
      }
      total = total + Rational(k.value());
    }
    if (!ok) continue;
    Rational cand = total / m;
    if (!best || cand < *best) best = cand;
  }
  if (!best) throw InvariantError("companion order undefined");
  return *best;
}

}  // namespace

// ---------------------------------------------------------------------------
// Words

std::string InvariantWord::str() const {
  std::ostringstream os;
  os << "(";
  for (const auto& e : entries)
    os << rational_str(e.first) << "," << e.second << "; ";
  os << (terminal == Terminal::INF ? "inf" : "0") << ")";
  return os.str();
}

int word_compare(const InvariantWord& a, const InvariantWord& b) {
  auto slots = [](const InvariantWord& w) {
    std::vector<ExtRat> v;
    for (const auto& e : w.entries) {
      v.push_back(ExtRat(e.first));
      v.push_back(ExtRat(Rational(static_cast<long>(e.second))));
    }
    v.push_back(w.terminal == InvariantWord::Terminal::INF
                    ? ExtRat::infinity()
                    : ExtRat(Rational(0)));
    return v;
  };
  auto va = slots(a);
  auto vb = slots(b);
  size_t n = std::min(va.size(), vb.size());
  for (size_t i = 0; i < n; ++i) {
    if (va[i] < vb[i]) return -1;
    if (vb[i] < va[i]) return 1;
  }
  if (va.size() != vb.size()) return va.size() < vb.size() ? -1 : 1;
  if (a.terminal == InvariantWord::Terminal::ZERO) {
    Rational ca = a.companion.value_or(Rational(0));
    Rational cb = b.companion.value_or(Rational(0));
    if (ca < cb) return -1;
    if (cb < ca) return 1;
  }
  return 0;
}

bool e_bounds_check(const InvariantWord& w) {
  auto natural = [](const Rational& q) -> std::optional<Int> {
    if (den(q) != 1 || num(q) < 0) return std::nullopt;
    return num(q);
  };
  auto factorial = [](const Int& e) -> std::optional<Int> {
    if (e > 400) return std::nullopt;
    Int f = 1;
    for (Int i = 2; i <= e; ++i) f *= i;
    return f;
  };
  Int e = 1;
  if (!w.entries.empty()) {
    auto e2 = natural(w.entries[0].first);
    if (!e2) return false;
    e = *e2;
  }
  for (size_t r = 1; r < w.entries.size(); ++r) {
    auto f = factorial(e);
    if (!f) return false;
    Rational scaled = w.entries[r].first * Rational(*f);
    auto sn = natural(scaled);
    if (!sn) return false;
    e = std::max(*f, *sn);
  }
  if (w.terminal == InvariantWord::Terminal::ZERO && w.companion) {
    auto f = factorial(e);
    if (!f) return false;
    if (!natural(*w.companion * Rational(*f))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Cascade primitives

ExtRat nu_next(const std::vector<MarkedPair>& pairs, const Ideal& N,
               const Ideal& Z, const Poly& avoid, const InvariantConfig& cfg) {
  ExtRat best = ExtRat::infinity();
  for (const auto& p : pairs) {
    if (p.h.is_zero()) continue;
    ExtNat o = ord_loc(p.h, N, Z, avoid, cfg);
    if (o.is_infinite()) continue;
    ExtRat ratio(Rational(o.value()) / p.mu);
    if (ratio < best) best = ratio;
  }
  return best;
}

CompanionData companion_subtract(
    const std::vector<MarkedPair>& pairs,
    const std::vector<std::pair<std::string, Poly>>& erest, const Ideal& N,
    const Ideal& Z, const Poly& avoid, const InvariantConfig& cfg) {
  CompanionData out{ExtRat::infinity(), ExtRat::infinity(), {}};
  out.mu = nu_next(pairs, N, Z, avoid, cfg);
  if (out.mu.is_infinite()) return out;
  Rational total(0);
  for (const auto& dv : erest) {
    std::optional<Rational> muH;
    for (const auto& p : pairs) {
      if (p.h.is_zero()) continue;
      ExtNat k = theta_order(p.h, N, dv.second, Z, avoid, cfg.kmax, cfg.budget);
      if (k.is_infinite()) continue;
      Rational cand = Rational(k.value()) / p.mu;
      if (!muH || cand < *muH) muH = cand;
    }
    if (muH && *muH > 0) {
      out.per_divisor[dv.first] = *muH;
      total = total + *muH;
    }
  }
  Rational nu = out.mu.value() - total;
  if (nu < 0)
    throw InvariantError("negative residual order after companion subtraction");
  out.nu = ExtRat(nu);
  return out;
}

std::vector<MarkedPair> scale_to_common_mark(
    const std::vector<MarkedPair>& pairs, const Rational& m) {
  std::vector<MarkedPair> out;
  for (const auto& p : pairs) {
    Rational q = m / p.mu;
    if (den(q) != 1 || num(q) < 1)
      throw InvariantError("common mark " + rational_str(m) +
                           " is not an integer multiple of " +
                           rational_str(p.mu));
    unsigned e = to_exp(q);
    MarkedPair np{p.h.pow(e), std::nullopt, m};
    if (p.denom) np.denom = p.denom->pow(e);
    out.push_back(std::move(np));
  }
  return out;
}

std::vector<MarkedPair> scale_pairs(const std::vector<MarkedPair>& pairs,
                                    const Rational& nu) {
  if (!(nu > 0)) throw InvariantError("pair scaling requires a positive factor");
  std::vector<MarkedPair> out = pairs;
  for (auto& p : out) p.mu = p.mu * nu;
  return out;
}

std::vector<MarkedPair> monomial_divide(const std::vector<MarkedPair>& pairs,
                                        const std::vector<Poly>& divisor_eqs,
                                        const Ideal& N,
                                        const InvariantConfig& cfg) {
  if (pairs.empty()) return pairs;
  for (const auto& p : pairs)
    if (p.mu != pairs.front().mu)
      throw InvariantError("monomial extraction requires a common mark");
  Poly one = one_poly(pairs.front().h.vars());
  return extract_monomials(pairs, divisor_eqs, N, zero_ideal(pairs.front().h.vars()),
                           one, cfg);
}

MaximalContact maximal_contact(const Poly& g, unsigned d, const Ideal& stratum,
                               const InvariantConfig& cfg) {
  if (d == 0) throw InvariantError("maximal contact requires positive order");
  size_t n = g.nvars();
  for (const auto& v : directions(n, cfg.coef_bound)) {
    Derivation D;
    D.coef.assign(n, Poly(g.vars()));
    for (size_t i = 0; i < n; ++i)
      if (v[i] != 0) D.coef[i] = Poly::constant(g.vars(), Rational(v[i]));
    Poly top = D.apply(g, d);
    if (top.is_zero()) continue;
    if (!is_unit_ideal(plus(stratum, top), cfg.budget)) continue;
    Poly eta = D.apply(g, d - 1);
    ExtNat o = order_along_locus(eta, zero_ideal(g.vars()), stratum, cfg.kmax,
                                 cfg.budget);
    if (o.is_infinite() || o.value() != 1) continue;
    return MaximalContact{v, Ideal{eta}};
  }
  throw InvariantError("no maximal-contact direction found");
}

std::vector<MarkedPair> coefficient_pairs(const Poly& g, unsigned d,
                                          const std::vector<long>& direction) {
  if (d == 0)
    throw InvariantError("coefficient pairs require positive multiplicity");
  size_t n = g.nvars();
  Derivation D;
  D.coef.assign(n, Poly(g.vars()));
  for (size_t i = 0; i < n && i < direction.size(); ++i)
    if (direction[i] != 0)
      D.coef[i] = Poly::constant(g.vars(), Rational(direction[i]));
  Poly eta = D.apply(g, d - 1);
  GroebnerBasis GN = groebner(Ideal{eta});
  std::vector<MarkedPair> out;
  for (unsigned q = 0; q + 2 <= d; ++q) {
    Poly h = normal_form(D.apply(g, q), GN);
    if (h.is_zero()) continue;
    out.push_back({h, std::nullopt, Rational(static_cast<long>(d - q))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Engine

InvariantEngine::InvariantEngine(const ResolutionTree& tree,
                                 InvariantConfig cfg)
    : tree_(tree), cfg_(std::move(cfg)) {}

InvariantWord InvariantEngine::cascade(const Chart& chart, const Poly& g,
                                       const Ideal& Z, const Poly& avoid,
                                       bool generic_ok) {
  std::string key = chart.id + "#" + ideal_key(Z, cfg_.budget) + "#" +
                    avoid.str() + "#" + (generic_ok ? "g" : "s");
  auto hit = cache_.find(key);
  if (hit != cache_.end()) return hit->second;

  const Budget& B = cfg_.budget;
  if (g.is_zero())
    throw InvariantError("zero transform has no invariant");
  ExtNat d_ext = ord_loc(g, zero_ideal(chart.vars), Z, avoid, cfg_);
  if (d_ext.is_infinite())
    throw InvariantError("transform vanishes to infinite order on the locus");
  if (d_ext.value() == 0)
    throw InvariantError("the locus is not on the hypersurface");
  Rational nu(d_ext.value());

  InvariantWord w;
  std::vector<Rational> nus;
  std::vector<unsigned> ss;
  std::vector<std::pair<std::string, Poly>> erest;
  for (const auto& dv : chart.divisors)
    if (vanishes_on_open(dv.second, Z, avoid, B)) erest.push_back(dv);

  Ideal N = zero_ideal(chart.vars);
  std::vector<MarkedPair> pairs{{g, std::nullopt, nu}};
  size_t guard = chart.vars.size() + chart.divisors.size() + 6;
  for (size_t level = 1; level <= guard; ++level) {
    // Record nu_r together with its divisor count s_r.
    nus.push_back(nu);
    unsigned iy =
        chart.year == 0 ? 0 : earliest_matching_year(chart, Z, nus, ss);
    std::vector<std::pair<std::string, Poly>> enew, ekeep;
    for (const auto& dv : erest)
      (tree_.divisor(dv.first).birth_year <= iy ? enew : ekeep).push_back(dv);
    ss.push_back(static_cast<unsigned>(enew.size()));
    w.entries.emplace_back(nu, static_cast<unsigned>(enew.size()));

    if (level >= 2) {
      Rational m = lcm_marks(pairs);
      pairs = scale_to_common_mark(pairs, m);
      std::vector<Poly> eqs;
      for (const auto& dv : erest) eqs.push_back(dv.second);
      pairs = extract_monomials(pairs, eqs, N, Z, avoid, cfg_);
      pairs = scale_pairs(pairs, nu);
      for (const auto& p : pairs)
        if (den(p.mu) != 1)
          throw InvariantError("fractional mark after rescaling: " +
                               rational_str(p.mu));
    }
    erest = ekeep;
    size_t n_pre = pairs.size();
    for (const auto& dv : enew)
      pairs.push_back({dv.second, std::nullopt, Rational(1)});

    // Descend to the maximal-contact subspace.
    ContactChoice c = find_contact(pairs, n_pre, N, Z, avoid, erest,
                                   chart.vars, generic_ok, cfg_);
    std::vector<MarkedPair> next;
    for (size_t p = 0; p < pairs.size(); ++p) {
      unsigned mu = to_exp(pairs[p].mu);
      if (mu == 1) {
        if (p != c.pair_index) next.push_back(pairs[p]);
        continue;
      }
      for (unsigned q = 0; q + 2 <= mu; ++q) {
        Poly h = c.D.apply(pairs[p].h, q);
        if (h.is_zero()) continue;
        next.push_back(
            {h, pairs[p].denom, Rational(static_cast<long>(mu - q))});
      }
    }
    N = plus(N, c.eta);
    pairs = std::move(next);

    CompanionData cd = companion_subtract(pairs, erest, N, Z, avoid, cfg_);
    if (cd.mu.is_infinite()) {
      w.terminal = InvariantWord::Terminal::INF;
      cache_.emplace(key, w);
      return w;
    }
    if (cd.nu.value() == 0) {
      w.terminal = InvariantWord::Terminal::ZERO;
      w.companion = companion_total(pairs, erest, N, Z, avoid, cfg_);
      cache_.emplace(key, w);
      return w;
    }
    nu = cd.nu.value();
  }
  throw InvariantError("invariant cascade failed to terminate");
}

unsigned InvariantEngine::earliest_matching_year(
    const Chart& chart, const Ideal& Z, const std::vector<Rational>& nus,
    const std::vector<unsigned>& ss) {
  // Walk the stratum image up the chart chain, oldest first.
  std::vector<const Chart*> chain;
  const Chart* cur = &chart;
  while (!cur->parent_id.empty()) {
    chain.push_back(cur);
    cur = &tree_.chart(cur->parent_id);
  }
  chain.push_back(cur);
  std::reverse(chain.begin(), chain.end());  // chain[0] is the root
  std::vector<Ideal> images(chain.size());
  images.back() = Z;
  for (size_t i = chain.size() - 1; i > 0; --i)
    images[i - 1] = image_ideal(images[i], chain[i - 1]->vars,
                                chain[i]->transition, cfg_.budget);
  for (size_t i = 0; i + 1 < chain.size(); ++i) {
    const Chart& anc = *chain[i];
    auto tf = tree_.transform.find(anc.id);
    if (tf == tree_.transform.end()) continue;
    InvariantWord upw;
    try {
      upw = cascade(anc, tf->second, images[i], one_poly(anc.vars), true);
    } catch (const InvariantError&) {
      continue;  // image locus left the hypersurface; cannot match
    }
    if (upw.entries.size() < nus.size()) continue;
    bool match = true;
    for (size_t t = 0; t < nus.size() && match; ++t)
      match = upw.entries[t].first == nus[t];
    for (size_t t = 0; t < ss.size() && match; ++t)
      match = upw.entries[t].second == ss[t];
    if (match) return anc.year;
  }
  return chart.year;
}

InvariantWord InvariantEngine::at_point(const std::string& chart_id,
                                        const PointQ& a) {
  const Chart& chart = tree_.chart(chart_id);
  if (a.size() != chart.vars.size())
    throw InvariantError("point dimension does not match the chart");
  auto tf = tree_.transform.find(chart_id);
  if (tf == tree_.transform.end())
    throw InvariantError("chart has no hypersurface transform: " + chart_id);
  return cascade(chart, tf->second, point_ideal(chart.vars, a),
                 one_poly(chart.vars), false);
}

InvariantWord InvariantEngine::along(const std::string& chart_id,
                                     const Ideal& Z, const Poly& avoid) {
  const Chart& chart = tree_.chart(chart_id);
  auto tf = tree_.transform.find(chart_id);
  if (tf == tree_.transform.end())
    throw InvariantError("chart has no hypersurface transform: " + chart_id);
  return cascade(chart, tf->second, Z, avoid, true);
}

std::vector<ChartStratum> InvariantEngine::strata(const std::string& chart_id) {
  const Chart& chart = tree_.chart(chart_id);
  std::string cache_key =
      chart_id + "#" + std::to_string(chart.stale.size());
  if (auto hit = strata_cache_.find(cache_key); hit != strata_cache_.end())
    return hit->second;
  auto tf = tree_.transform.find(chart_id);
  if (tf == tree_.transform.end())
    throw InvariantError("chart has no hypersurface transform: " + chart_id);
  const Poly& g = tf->second;
  if (g.is_zero()) throw InvariantError("zero transform has no strata");
  std::vector<ChartStratum> out;
  if (g.is_constant()) return out;
  Poly one = one_poly(chart.vars);

  std::deque<std::pair<Ideal, Poly>> work;
  size_t nd = chart.divisors.size();
  if (nd > 12) throw BudgetExceeded("too many divisors for stratification");
  for (size_t mask = 0; mask < (size_t(1) << nd); ++mask) {
    Ideal Z{g};
    for (size_t i = 0; i < nd; ++i)
      if (mask & (size_t(1) << i)) Z.push_back(chart.divisors[i].second);
    Z = simplify_locus(Z, cfg_.budget);
    if (is_unit_ideal(Z, cfg_.budget)) continue;
    work.push_back({Z, one});
  }

  std::set<std::string> seen;
  long processed = 0;
  while (!work.empty()) {
    auto [Z, avoid] = work.front();
    work.pop_front();
    if (vanishes_on(avoid, Z, cfg_.budget)) continue;  // open part empty
    // Replace Z by the closure of the open part V(Z) minus V(avoid), so
    // the recorded locus is exactly the stratum closure.
    if (!avoid.is_constant())
      for (int pass = 0; pass < 16; ++pass) {
        Ideal Q = ideal_quotient(Z, avoid, cfg_.budget);
        bool same = true;
        for (const Poly& q : Q)
          if (!vanishes_on(q, Z, cfg_.budget)) {
            same = false;
            break;
          }
        if (same) break;
        Z = simplify_locus(Q, cfg_.budget);
      }
    std::string key = ideal_key(Z, cfg_.budget) + "|" + avoid.str();
    if (!seen.insert(key).second) continue;
    if (++processed > cfg_.max_strata)
      throw BudgetExceeded("stratification refinement exceeded its budget");
    bool stale = false;
    for (const Ideal& mask : chart.stale) {
      bool inside = true;
      for (const Poly& mg : mask)
        if (!vanishes_on(mg, Z, cfg_.budget)) {
          inside = false;
          break;
        }
      if (inside && !mask.empty()) {
        stale = true;
        break;
      }
    }
    if (stale) continue;

    InvariantWord w;
    try {
      w = cascade(chart, g, Z, avoid, false);
    } catch (const NeedsRefinement& nr) {
      Ideal A = simplify_locus(plus(Z, nr.u), cfg_.budget);
      if (!is_unit_ideal(A, cfg_.budget)) work.push_back({A, avoid});
      work.push_back({Z, avoid * nr.u});
      continue;
    }
    ChartStratum st{w, Z, avoid, {}};
    for (const auto& dv : chart.divisors)
      if (vanishes_on_open(dv.second, Z, avoid, cfg_.budget))
        st.incident.push_back(dv.first);
    out.push_back(std::move(st));
  }
  strata_cache_.emplace(cache_key, out);
  return out;
}

std::optional<ChartStratum> InvariantEngine::max_stratum_in_chart(
    const std::string& chart_id) {
  auto all = strata(chart_id);
  if (all.empty()) return std::nullopt;
  const ChartStratum* best = &all.front();
  for (const auto& s : all) {
    int c = word_compare(s.word, best->word);
    if (c > 0) {
      best = &s;
    } else if (c == 0) {
      int jc = j_subset_compare(s.incident, best->incident, tree_);
      if (jc > 0 ||
          (jc == 0 && ideal_key(s.locus, cfg_.budget) <
                          ideal_key(best->locus, cfg_.budget))) {
        best = &s;
      }
    }
  }
  return *best;
}

int j_subset_compare(const std::vector<std::string>& a,
                     const std::vector<std::string>& b,
                     const ResolutionTree& tree) {
  auto years = [&](const std::vector<std::string>& v) {
    std::vector<unsigned> y;
    for (const auto& id : v) y.push_back(tree.divisor(id).birth_year);
    std::sort(y.begin(), y.end());
    return y;
  };
  auto ya = years(a);
  auto yb = years(b);
  size_t n = std::min(ya.size(), yb.size());
  for (size_t i = 0; i < n; ++i) {
    if (ya[i] < yb[i]) return 1;  // older divisors weigh more
    if (yb[i] < ya[i]) return -1;
  }
  if (ya.size() != yb.size()) return ya.size() > yb.size() ? 1 : -1;
  auto ids_a = a;
  auto ids_b = b;
  std::sort(ids_a.rbegin(), ids_a.rend());
  std::sort(ids_b.rbegin(), ids_b.rend());
  if (ids_a > ids_b) return 1;
  if (ids_b > ids_a) return -1;
  return 0;
}

}  // namespace desing
