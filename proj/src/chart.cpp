#include "desing/chart.hpp"

#include <algorithm>
#include <sstream>

namespace desing {

namespace {

Ideal coordinate_ideal(const VarList& vars, const std::vector<size_t>& coords) {
  Ideal out;
  for (size_t c : coords) out.push_back(Poly::variable(vars, c));
  return out;
}

// Remap a polynomial to a permuted copy of its own variable list.
Poly permute(const Poly& p, const std::vector<size_t>& new_pos,
             const VarList& new_vars) {
  Poly out(new_vars);
  for (const auto& [e, c] : p.terms()) {
    Exponents ne(e.size(), 0);
    for (size_t i = 0; i < e.size(); ++i) ne[new_pos[i]] = e[i];
    out.set_term(ne, c);
  }
  return out;
}

// Try to read the center off a reduced basis as a graph x_d = p_d(free
// variables) over some q-subset of "dependent" variables; on success
// return the shear straightening it.
std::optional<Straightening> graph_straightening(const VarList& vars,
                                                 const Ideal& C, size_t q,
                                                 const Budget& budget) {
  size_t n = vars.size();
  std::vector<size_t> dep(q);
  for (size_t i = 0; i < q; ++i) dep[i] = i;
  auto advance = [&]() {
    size_t i = q;
    while (i > 0 && dep[i - 1] == n - q + i - 1) --i;
    if (i == 0) return false;
    ++dep[i - 1];
    for (size_t j = i; j < q; ++j) dep[j] = dep[j - 1] + 1;
    return true;
  };
  if (q > n) return std::nullopt;
  do {
    // Ring with the dependent block first.
    VarList ring;
    std::vector<size_t> new_pos(n);
    std::vector<bool> is_dep(n, false);
    for (size_t i = 0; i < q; ++i) is_dep[dep[i]] = true;
    size_t pos = 0;
    for (size_t i = 0; i < n; ++i)
      if (is_dep[i]) {
        ring.push_back(vars[i]);
        new_pos[i] = pos++;
      }
    for (size_t i = 0; i < n; ++i)
      if (!is_dep[i]) {
        ring.push_back(vars[i]);
        new_pos[i] = pos++;
      }
    Ideal embedded;
    for (const auto& g : C) embedded.push_back(permute(g, new_pos, ring));
    MonomialOrder ord;
    ord.elim = q;
    GroebnerBasis G;
    try {
      G = groebner(embedded, ord, budget);
    } catch (const BudgetExceeded&) {
      continue;
    }
    if (G.basis.size() != q) continue;
    // Each basis element must be x_d - p_d with p_d free of the block.
    std::vector<Poly> graph(q, Poly(ring));  // p_d per block position
    bool ok = true;
    std::vector<bool> seen(q, false);
    for (const auto& b : G.basis) {
      int var_slot = -1;
      Poly p(ring);
      for (const auto& [e, c] : b.terms()) {
        unsigned tot = 0, block = 0;
        size_t idx = 0;
        for (size_t i = 0; i < n; ++i) {
          tot += e[i];
          if (i < q && e[i] != 0) {
            block += e[i];
            idx = i;
          }
        }
        if (block == 1 && tot == 1 && c == 1 && var_slot < 0 &&
            !seen[idx]) {
          var_slot = static_cast<int>(idx);
        } else if (block == 0) {
          p.set_term(e, -c);
        } else {
          ok = false;
        }
      }
      if (var_slot < 0) ok = false;
      if (!ok) break;
      seen[static_cast<size_t>(var_slot)] = true;
      graph[static_cast<size_t>(var_slot)] = p;
    }
    if (!ok) continue;
    // Shear substitution in the original variable order.
    Substitution s = Substitution::identity(vars);
    std::vector<size_t> back(n);  // ring position -> original index
    for (size_t i = 0; i < n; ++i) back[new_pos[i]] = i;
    for (size_t k = 0; k < q; ++k) {
      size_t d = back[k];
      Poly pd = permute(graph[k], back, vars);
      s.forward[d] = Poly::variable(vars, d) + pd;
      s.inverse[d] = Poly::variable(vars, d) - pd;
    }
    // Verify: the transformed ideal equals the coordinate ideal.
    Ideal moved;
    for (const auto& g : C) moved.push_back(s.apply(g));
    std::vector<size_t> coords(dep.begin(), dep.end());
    if (!ideal_equal(moved, coordinate_ideal(vars, coords), budget)) continue;
    return Straightening{s, coords};
  } while (advance());
  return std::nullopt;
}

std::optional<Straightening> try_straighten(const VarList& vars,
                                            const Ideal& C, size_t q,
                                            const Budget& budget) {
  size_t n = vars.size();
  auto G = groebner(C, {}, budget);
  // Already a coordinate subspace?
  {
    std::vector<size_t> coords;
    bool plain = G.basis.size() == q;
    for (const auto& b : G.basis) {
      if (b.terms().size() == 1 && b.total_degree() == 1 &&
          b.leading_coefficient() == 1) {
        const Exponents& e = b.leading_exponents();
        for (size_t i = 0; i < n; ++i)
          if (e[i] == 1) coords.push_back(i);
      } else {
        plain = false;
      }
    }
    if (plain) {
      std::sort(coords.begin(), coords.end());
      return Straightening{Substitution::identity(vars), coords};
    }
  }
  // A zero-dimensional center: translate the single rational point to the
  // origin.
  if (q == n) {
    auto pts = rational_points(G.basis, budget);
    if (pts && pts->size() == 1) {
      const PointQ& a = (*pts)[0];
      Substitution s = Substitution::identity(vars);
      for (size_t i = 0; i < n; ++i) {
        s.forward[i] =
            Poly::variable(vars, i) + Poly::constant(vars, a[i]);
        s.inverse[i] =
            Poly::variable(vars, i) - Poly::constant(vars, a[i]);
      }
      std::vector<size_t> coords(n);
      for (size_t i = 0; i < n; ++i) coords[i] = i;
      Ideal moved;
      for (const auto& g : C) moved.push_back(s.apply(g));
      if (ideal_equal(moved, coordinate_ideal(vars, coords), budget))
        return Straightening{s, coords};
    }
    return std::nullopt;
  }
  return graph_straightening(vars, G.basis, q, budget);
}

}  // namespace

Substitution Substitution::identity(const VarList& vars) {
  Substitution s;
  for (size_t i = 0; i < vars.size(); ++i) {
    s.forward.push_back(Poly::variable(vars, i));
    s.inverse.push_back(Poly::variable(vars, i));
  }
  return s;
}

bool Substitution::is_identity() const {
  for (size_t i = 0; i < forward.size(); ++i) {
    Poly v = Poly::variable(forward[i].vars(), i);
    if (!(forward[i] == v) || !(inverse[i] == v)) return false;
  }
  return true;
}

Poly Substitution::apply(const Poly& p) const { return substitute(p, forward); }

Ideal Substitution::apply(const Ideal& I) const {
  Ideal out;
  for (const auto& g : I) out.push_back(apply(g));
  return out;
}

PointQ Substitution::point_to_old(const PointQ& a_new) const {
  PointQ out;
  for (const auto& f : forward) out.push_back(f.eval(a_new));
  return out;
}

PointQ Substitution::point_to_new(const PointQ& a_old) const {
  PointQ out;
  for (const auto& f : inverse) out.push_back(f.eval(a_old));
  return out;
}

Substitution Substitution::then(const Substitution& next) const {
  Substitution s;
  for (const auto& f : forward) s.forward.push_back(substitute(f, next.forward));
  for (const auto& g : next.inverse)
    s.inverse.push_back(substitute(g, inverse));
  return s;
}

const Poly* Chart::divisor_equation(const std::string& divisor_id) const {
  for (const auto& [id, eq] : divisors)
    if (id == divisor_id) return &eq;
  return nullptr;
}

const Chart& ResolutionTree::chart(const std::string& id) const {
  for (const auto& c : charts)
    if (c.id == id) return c;
  throw std::invalid_argument("unknown chart " + id);
}

Chart& ResolutionTree::chart(const std::string& id) {
  for (auto& c : charts)
    if (c.id == id) return c;
  throw std::invalid_argument("unknown chart " + id);
}

const DivisorRecord& ResolutionTree::divisor(const std::string& id) const {
  for (const auto& d : divisors)
    if (d.id == id) return d;
  throw std::invalid_argument("unknown divisor " + id);
}

Poly pullback(const Poly& f_parent, const Chart& chart) {
  if (chart.transition.empty()) return f_parent;
  return substitute_named(f_parent, chart.vars, chart.transition);
}

Ideal pullback(const Ideal& I_parent, const Chart& chart) {
  Ideal out;
  for (const auto& g : I_parent) out.push_back(pullback(g, chart));
  return out;
}

PointQ to_parent(const Chart& chart, const PointQ& a) {
  if (chart.transition.empty()) return a;
  PointQ out;
  for (const auto& v : chart.vars) {
    auto it = chart.transition.find(v);
    if (it == chart.transition.end())
      throw std::invalid_argument("to_parent: incomplete transition");
    out.push_back(it->second.eval(a));
  }
  return out;
}

std::vector<Chart> blowup(const Chart& parent, const Substitution& straighten,
                          const std::vector<size_t>& center_coords,
                          unsigned year) {
  const VarList& vars = parent.vars;
  size_t n = vars.size(), q = center_coords.size();
  if (q == 0) throw std::invalid_argument("blowup: empty center");
  std::vector<bool> in_center(n, false);
  for (size_t c : center_coords) {
    if (c >= n || in_center[c])
      throw std::invalid_argument("blowup: bad center coordinate");
    in_center[c] = true;
  }
  std::vector<Chart> out;
  for (size_t i = 0; i < q; ++i) {
    size_t ci = center_coords[i];
    Chart child;
    child.id = parent.id + "." + std::to_string(i + 1);
    child.year = year;
    child.vars = vars;
    child.parent_id = parent.id;
    // Monomial map of the i-th standard chart.
    std::vector<Poly> img;
    for (size_t k = 0; k < n; ++k) {
      if (in_center[k] && k != ci)
        img.push_back(Poly::variable(vars, ci) * Poly::variable(vars, k));
      else
        img.push_back(Poly::variable(vars, k));
    }
    for (size_t k = 0; k < n; ++k)
      child.transition[vars[k]] = substitute(straighten.forward[k], img);
    child.exceptional = Poly::variable(vars, ci);
    for (const auto& g : parent.canon) child.canon.push_back(pullback(g, child));
    for (size_t t = 0; t < i; ++t)
      child.canon.push_back(Poly::variable(vars, center_coords[t]));
    for (const auto& mask : parent.stale) child.stale.push_back(pullback(mask, child));
    out.push_back(std::move(child));
  }
  return out;
}

Straightening straighten_center(const Chart& chart, const Ideal& C,
                                long coef_bound, const Budget& budget) {
  const VarList& vars = chart.vars;
  size_t n = vars.size();
  if (is_unit_ideal(C, budget))
    throw StraighteningError("straighten_center: empty center");
  size_t q = n - static_cast<size_t>(dim_ideal(C, budget));
  if (!jacobian_smooth(C, static_cast<unsigned>(q), zero_ideal(vars), budget))
    throw StraighteningError("straighten_center: center is not smooth");
  if (auto s = try_straighten(vars, C, q, budget)) return *s;
  // Retry after elementary integer changes x_i -> x_i + c x_j, depth <= 2.
  std::vector<Substitution> elementary;
  for (long c = 1; c <= coef_bound; ++c)
    for (long sign : {1L, -1L})
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          Substitution e = Substitution::identity(vars);
          Poly shift = Poly::constant(vars, Rational(sign * c)) *
                       Poly::variable(vars, j);
          e.forward[i] = Poly::variable(vars, i) + shift;
          e.inverse[i] = Poly::variable(vars, i) - shift;
          elementary.push_back(std::move(e));
        }
  for (const auto& e : elementary) {
    if (auto s = try_straighten(vars, e.apply(C), q, budget))
      return Straightening{e.then(s->subst), s->coords};
  }
  for (const auto& e1 : elementary)
    for (const auto& e2 : elementary) {
      Substitution pre = e1.then(e2);
      if (auto s = try_straighten(vars, pre.apply(C), q, budget))
        return Straightening{pre.then(s->subst), s->coords};
    }
  throw StraighteningError(
      "straighten_center: no straightening found within coefficient bound " +
      std::to_string(coef_bound) + " for center " + ideal_key(C, budget));
}

std::pair<Poly, unsigned> strict_transform(const Poly& f, const Chart& chart,
                                           const Poly& theta) {
  if (f.is_zero())
    throw std::invalid_argument("strict_transform: zero polynomial");
  Poly g = pullback(f, chart);
  ExtNat d = divisibility_order(g, theta);
  unsigned k = static_cast<unsigned>(d.value());
  for (unsigned t = 0; t < k; ++t) g = *exact_divide(g, theta);
  return {g, k};
}

std::pair<Ideal, unsigned> weak_transform_ideal(const Ideal& I,
                                                const Chart& chart,
                                                const Poly& theta) {
  Ideal pulled;
  ExtNat mu = ExtNat::infinity();
  for (const auto& gen : I) {
    if (gen.is_zero()) continue;
    Poly g = pullback(gen, chart);
    ExtNat d = divisibility_order(g, theta);
    if (d < mu) mu = d;
    pulled.push_back(std::move(g));
  }
  if (pulled.empty())
    throw std::invalid_argument("weak_transform_ideal: zero ideal");
  unsigned k = static_cast<unsigned>(mu.value());
  Ideal out;
  for (auto& g : pulled) {
    for (unsigned t = 0; t < k; ++t) g = *exact_divide(g, theta);
    out.push_back(std::move(g));
  }
  return {out, k};
}

void update_divisors(const Chart& parent, std::vector<Chart>& children,
                     const std::string& new_divisor_id, const Budget& budget) {
  for (auto& child : children) {
    const Poly& theta = *child.exceptional;
    for (const auto& [id, eq] : parent.divisors) {
      auto [st, k] = strict_transform(eq, child, theta);
      if (st.is_constant()) continue;  // divisor misses this chart
      if (!jacobian_smooth({st}, 1, zero_ideal(child.vars), budget))
        throw std::runtime_error(
            "update_divisors: transformed divisor " + id +
            " fails the smoothness certificate (inadmissible center)");
      child.divisors.emplace_back(id, st);
    }
    child.divisors.emplace_back(new_divisor_id, theta);
  }
}

std::optional<std::map<std::string, unsigned>> nc_check(const Poly& f,
                                                        const Chart& chart,
                                                        const Ideal& at,
                                                        const Budget& budget) {
  if (f.is_zero()) return std::nullopt;
  Poly u = f;
  std::map<std::string, unsigned> exps;
  for (const auto& [id, theta] : chart.divisors) {
    unsigned k = 0;
    ExtNat d = divisibility_order(u, theta);
    k = static_cast<unsigned>(d.value());
    for (unsigned t = 0; t < k; ++t) u = *exact_divide(u, theta);
    exps[id] = k;
  }
  // Residual factor must vanish nowhere on V(at).
  Ideal test = at;
  test.push_back(u);
  if (!is_unit_ideal(test, budget)) return std::nullopt;
  return exps;
}

bool snc_check(const Ideal& X, const Chart& chart, const Budget& budget) {
  const VarList& vars = chart.vars;
  if (is_unit_ideal(X, budget)) return true;
  if (!jacobian_smooth(X, 1, zero_ideal(vars), budget))
    throw std::invalid_argument("snc_check: X is not smooth of codimension 1");
  size_t m = chart.divisors.size();
  if (m > 20) throw std::invalid_argument("snc_check: too many divisors");
  for (size_t mask = 1; mask < (size_t(1) << m); ++mask) {
    Ideal J = X;
    unsigned codim = 1;
    for (size_t h = 0; h < m; ++h)
      if (mask & (size_t(1) << h)) {
        J.push_back(chart.divisors[h].second);
        ++codim;
      }
    if (codim > vars.size()) {
      if (!is_unit_ideal(J, budget)) return false;
    } else if (!jacobian_smooth(J, codim, zero_ideal(vars), budget)) {
      return false;
    }
  }
  return true;
}

bool misses_canonical_region(const Ideal& center, const Chart& chart,
                             const Budget& budget) {
  Ideal J = center;
  for (const auto& g : chart.canon) J.push_back(g);
  return is_unit_ideal(J, budget);
}

bool ideal_equal(const Ideal& a, const Ideal& b, const Budget& budget) {
  auto Ga = groebner(a, {}, budget);
  auto Gb = groebner(b, {}, budget);
  if (Ga.basis.size() != Gb.basis.size()) return false;
  for (size_t i = 0; i < Ga.basis.size(); ++i)
    if (!(Ga.basis[i] == Gb.basis[i])) return false;
  return true;
}

}  // namespace desing
