#ifndef DESING_POLY_HPP
#define DESING_POLY_HPP

// Multivariate polynomials over Q with exact coefficients, stored in a
// canonical form: terms keyed by exponent vector, ordered by graded
// reverse-lexicographic order (leading term first).  The variable list is
// part of the value; operations across charts must rename explicitly.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "desing/rational.hpp"

namespace desing {

using Exponents = std::vector<unsigned>;
using PointQ = std::vector<Rational>;
using VarList = std::vector<std::string>;

// Graded reverse-lexicographic comparison on exponent vectors of equal
// length: higher total degree wins; on ties, the vector whose LAST
// nonzero entry of the difference is negative is the larger one.
// Returns -1, 0, +1 for a < b, a == b, a > b.
int grevlex_cmp(const Exponents& a, const Exponents& b);

struct GrevlexGreater {
  bool operator()(const Exponents& a, const Exponents& b) const {
    return grevlex_cmp(a, b) > 0;
  }
};

class Poly {
 public:
  using TermMap = std::map<Exponents, Rational, GrevlexGreater>;

  Poly() = default;
  explicit Poly(VarList vars) : vars_(std::move(vars)) {}
  static Poly constant(const VarList& vars, const Rational& c);
  static Poly variable(const VarList& vars, size_t index);

  const VarList& vars() const { return vars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  // Nonzero constant (a unit of the polynomial ring).
  bool is_unit() const { return is_constant() && !is_zero(); }
  size_t nvars() const { return vars_.size(); }
  long total_degree() const;  // -1 for the zero polynomial

  const Exponents& leading_exponents() const;
  const Rational& leading_coefficient() const;

  void set_term(const Exponents& e, const Rational& c);  // erases when c == 0
  Rational coefficient(const Exponents& e) const;

  Poly operator-() const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(const Rational& c) const;
  bool operator==(const Poly& o) const {
    return vars_ == o.vars_ && terms_ == o.terms_;
  }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  Poly pow(unsigned k) const;

  Rational eval(const PointQ& a) const;
  std::string str() const;  // human-readable, deterministic

 private:
  void check_same_vars(const Poly& o) const;
  VarList vars_;
  TermMap terms_;
};

// Iterated formal partial derivative d^order/d x_i^order.
Poly partial_derivative(const Poly& p, size_t var_index, unsigned order = 1);

// q(x) = p(x + a).
Poly taylor_shift(const Poly& p, const PointQ& a);

// Least total degree of a nonzero term of taylor_shift(p, a); INFINITY iff
// p == 0.
ExtNat order_at_point(const Poly& p, const PointQ& a);

// p composed with x |-> U * x; U must be square of size nvars and
// invertible.
Poly linear_change(const Poly& p, const std::vector<std::vector<Rational>>& U);

// General substitution: replaces each variable by the polynomial given in
// `image` (one entry per variable of p, all over a common variable list).
Poly substitute(const Poly& p, const std::vector<Poly>& image);

// Substitution by variable name: variables of p not present in the map are
// mapped to the same-named variable of `target_vars`.
Poly substitute_named(const Poly& p, const VarList& target_vars,
                      const std::map<std::string, Poly>& image);

// Exact single-divisor division: returns p / d when the multivariate
// division of p by d leaves zero remainder, std::nullopt otherwise.
std::optional<Poly> exact_divide(const Poly& p, const Poly& d);

// Largest k with theta^k | p exactly (INFINITY for p == 0).  theta must be
// a nonconstant polynomial.
ExtNat divisibility_order(const Poly& p, const Poly& theta);

// GCD of multivariate polynomials over Q (primitive, with a deterministic
// sign/scale normalization: leading coefficient positive).
Poly poly_gcd(const Poly& a, const Poly& b);

// Square-free part of p: p divided by gcd(p, dp/dx_1, ..., dp/dx_n),
// normalized so the leading coefficient is 1.
Poly squarefree_part(const Poly& p);

// Parse from the textual format used by tests: terms like
// "y^2 - x^3 + 3/2*x*y" over the given variable list.
Poly parse_poly(const std::string& text, const VarList& vars);

}  // namespace desing

#endif  // DESING_POLY_HPP
