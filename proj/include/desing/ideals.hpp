#ifndef DESING_IDEALS_HPP
#define DESING_IDEALS_HPP

// Ideal-theoretic order computations: equimultiple loci via derivative
// ideals, maximum order on a variety, order along a subvariety by the
// membership filtration N + L^k, Jacobian smoothness certificates, radical
// membership, and images of subvarieties under polynomial maps.

#include <map>
#include <optional>

#include "desing/groebner.hpp"

namespace desing {

// Distinct failure for order_along hitting kmax without stabilizing.
struct OrderBudgetExceeded : std::runtime_error {
  explicit OrderBudgetExceeded(const std::string& what)
      : std::runtime_error(what) {}
};

// Ideal generated by all partial derivatives of g of total order <= s-1
// (including g itself); its variety is exactly {x : order of g at x >= s}.
Ideal derivative_ideal(const Poly& g, unsigned s);

// Derivative ideal of an ideal: union over generators.
Ideal derivative_ideal(const Ideal& I, unsigned s);

// The largest d such that V(derivative_ideal(g,d) + D) is nonempty;
// 0 if g vanishes nowhere on V(D).
long max_order_on_variety(const Poly& g, const Ideal& D,
                          const Budget& budget = {});

// Order of h along the locus V(L) inside the submanifold V(N): the largest
// k <= kmax with h in N + L^k.  INFINITY iff h in N.  L is typically the
// maximal ideal of a point (see point_ideal) or a stratum ideal.
ExtNat order_along_locus(const Poly& h, const Ideal& N, const Ideal& L,
                         unsigned kmax = 64, const Budget& budget = {});

// Point-flavored wrapper matching the operation contract: errors when a is
// not on V(N).
ExtNat order_along(const Poly& h, const Ideal& N, const PointQ& a,
                   unsigned kmax = 64, const Budget& budget = {});

// Maximal ideal (x_1 - a_1, ..., x_n - a_n).
Ideal point_ideal(const VarList& vars, const PointQ& a);

// Zero ideal (single zero generator) over the given variables.
Ideal zero_ideal(const VarList& vars);

// Concatenation of generator lists.
Ideal ideal_sum(const Ideal& a, const Ideal& b);

// True iff on every point of V(I) ∩ V(D) the Jacobian of the generators of
// I has an invertible codim x codim minor (scheme-theoretic emptiness of
// the singular locus, über the algebraic closure).
bool jacobian_smooth(const Ideal& I, unsigned codim, const Ideal& D,
                     const Budget& budget = {});

// The ideal cutting the non-smooth points of V(I) ∩ V(D) in codimension
// `codim`: generators of I and D plus all codim-minors of the Jacobian.
// jacobian_smooth is emptiness of its variety.
Ideal singular_locus_ideal(const Ideal& I, unsigned codim, const Ideal& D);

// f vanishes on V(I) (radical membership via the Rabinowitsch trick).
bool vanishes_on(const Poly& f, const Ideal& I, const Budget& budget = {});

// Membership in the saturation (J : f^inf), i.e. membership after
// inverting f (adjoin t with 1 - t*f; h is f-free, so plain membership in
// the extended ring decides it).
bool localized_member(const Poly& h, const Ideal& J, const Poly& f,
                      const Budget& budget = {});

// Largest k <= kmax with h in ((N + L^k) : f^inf); INFINITY iff h in
// (N : f^inf).  The locus-order computation of order_along_locus localized
// away from V(f).
ExtNat order_along_localized(const Poly& h, const Ideal& N, const Ideal& L,
                             const Poly& f, unsigned kmax = 64,
                             const Budget& budget = {});

// Ideal quotient (J : h): the intersection J ∩ (h) via the t-filtration
// trick, divided by h.
Ideal ideal_quotient(const Ideal& J, const Poly& h, const Budget& budget = {});

// Stalk membership: h lies in the localization of J at every point of
// V(Z) minus V(avoid) — equivalently V(J : h) misses that open stratum.
// Strictly finer than localized_member (it sees components of J away from
// the stratum).
bool member_at(const Poly& h, const Ideal& J, const Ideal& Z,
               const Poly& avoid, const Budget& budget = {});

// Largest k <= kmax with h in (N + Z^k) stalk-wise on the open stratum
// V(Z) minus V(avoid); INFINITY iff h is in N there.
ExtNat order_along_stalk(const Poly& h, const Ideal& N, const Ideal& Z,
                         const Poly& avoid, unsigned kmax = 64,
                         const Budget& budget = {});

// Image of V(Z) under the polynomial map whose components are given per
// target variable name: the ideal of the Zariski closure of the image, as
// polynomials over target_vars.  Computed by block elimination.
Ideal image_ideal(const Ideal& Z, const VarList& target_vars,
                  const std::map<std::string, Poly>& components,
                  const Budget& budget = {});

// All k-fold products of generators (generators of L^k).
Ideal ideal_power(const Ideal& L, unsigned k);

// Canonical string of an ideal's reduced basis (deterministic key).
std::string ideal_key(const Ideal& I, const Budget& budget = {});

// Rational points of a zero-dimensional variety V(I), found by lex
// triangularization and rational root extraction.  Returns std::nullopt if
// some coordinate has no rational expression (irrational points present or
// the shape is not triangular-solvable); returns an empty vector for the
// empty variety.
std::optional<std::vector<PointQ>> rational_points(const Ideal& I,
                                                   const Budget& budget = {});

}  // namespace desing

#endif  // DESING_IDEALS_HPP
