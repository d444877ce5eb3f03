#ifndef DESING_GROEBNER_HPP
#define DESING_GROEBNER_HPP

// Buchberger engine with graded-reverse-lexicographic default order and an
// optional elimination block (block grevlex), deterministic pair selection,
// product and chain criteria, and explicit resource budgets.  Budget
// exhaustion is a distinct failure (BudgetExceeded), never a silent answer.

#include <stdexcept>
#include <vector>

#include "desing/poly.hpp"

namespace desing {

using Ideal = std::vector<Poly>;

struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what)
      : std::runtime_error(what) {}
};

struct Budget {
  long max_pairs = 100000;   // S-pair reductions processed
  long max_degree = 200;     // total degree of any intermediate polynomial
};

// Monomial order descriptor: the first `elim` variables form a block that
// is eliminated (compared first, grevlex within each block).  elim == 0 is
// plain grevlex.
struct MonomialOrder {
  size_t elim = 0;
  // Returns -1/0/+1 for a < b / equal / a > b.
  int cmp(const Exponents& a, const Exponents& b) const;
};

struct GroebnerBasis {
  std::vector<Poly> basis;  // reduced: monic, auto-reduced, sorted
  MonomialOrder order;
  VarList vars;
  bool reduced = true;
};

// Reduced Groebner basis of the ideal generated by `gens` (which may
// contain zero polynomials; the zero ideal yields an empty basis list).
GroebnerBasis groebner(const Ideal& gens, MonomialOrder order = {},
                       const Budget& budget = {});

// Remainder of full multivariate division of p by G (tail-reduced).
Poly normal_form(const Poly& p, const GroebnerBasis& G);

// Membership of p in the ideal with the given reduced basis.
bool ideal_member(const Poly& p, const GroebnerBasis& G);

// 1 in I, i.e. V(I) empty over the algebraic closure.
bool is_unit_ideal(const Ideal& I, const Budget& budget = {});

// Krull dimension of the quotient ring, from the leading-term staircase of
// a reduced grevlex basis (maximal independent variable set).  Errors on
// the unit ideal.
long dim_ideal(const Ideal& I, const Budget& budget = {});

// Deterministic total order on polynomials (for canonical sorting).
int poly_cmp(const Poly& a, const Poly& b);

}  // namespace desing

#endif  // DESING_GROEBNER_HPP
