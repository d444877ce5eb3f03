#ifndef DESING_INVARIANT_HPP
#define DESING_INVARIANT_HPP

// The Bierstone-Milman local invariant: infinitesimal presentations,
// maximal contact, coefficient pairs, divisor splitting, companion
// subtraction, monomial factoring, recursion into higher codimension, and
// maximum-stratum extraction per chart.

#include "desing/chart.hpp"

namespace desing {

struct InvariantError : std::runtime_error {
  explicit InvariantError(const std::string& what)
      : std::runtime_error(what) {}
};

struct InvariantWord {
  enum class Terminal { ZERO, INF };
  // (nu_r, s_r) entries; every nu_r is a positive rational.
  std::vector<std::pair<Rational, unsigned>> entries;
  Terminal terminal = Terminal::INF;
  std::optional<Rational> companion;  // recorded when terminal == ZERO

  std::string str() const;  // canonical "(2,0; 3/2,0; inf)" form
};

// Lexicographic total order; -1/0/+1.  INFINITY beats every rational, ZERO
// loses to every positive rational; equal ZERO-terminal words are broken
// by companion-mu.
int word_compare(const InvariantWord& a, const InvariantWord& b);

// Factorial-denominator integrality: e_2 = nu_1, e_{r+1} = max(e_r!,
// e_r! * nu_r); every e_r! * nu_r (and e_{t+1}! * companion) is a natural.
bool e_bounds_check(const InvariantWord& w);

struct MarkedPair {
  Poly h;
  std::optional<Poly> denom;  // unit on the working stratum, if present
  Rational mu;                // positive mark
};

struct Presentation {
  Ideal N;                     // smooth, codim = contacts added so far
  std::vector<MarkedPair> pairs;
  std::vector<std::string> E;  // remaining divisor ids
};

struct InvariantConfig {
  long coef_bound = 3;    // witness search coefficient bound
  unsigned kmax = 64;     // order filtration cap
  long witness_skip = 0;  // skip the first k valid contact witnesses
  long max_strata = 512;  // per-chart stratification cap
  Budget budget;
};

// --- cascade primitives (exposed for direct verification) ---

// min over pairs of order_along(h, N, .)/mu on the locus V(Z) localized
// away from V(avoid); INFINITY for an empty list or all-h-in-N.
ExtRat nu_next(const std::vector<MarkedPair>& pairs, const Ideal& N,
               const Ideal& Z, const Poly& avoid,
               const InvariantConfig& cfg = {});

struct CompanionData {
  ExtRat mu;                           // mu_{r+1}
  ExtRat nu;                           // nu_{r+1} = mu - sum of companions
  std::map<std::string, Rational> per_divisor;
};

// Companion subtraction along the remaining divisors Erest (given as
// (id, theta) in-chart equations).
CompanionData companion_subtract(
    const std::vector<MarkedPair>& pairs,
    const std::vector<std::pair<std::string, Poly>>& erest, const Ideal& N,
    const Ideal& Z, const Poly& avoid, const InvariantConfig& cfg = {});

// Scale every pair to the common mark m: h -> h^(m/mu_h), mu -> m.
// Requires every m/mu_h to be a positive integer.
std::vector<MarkedPair> scale_to_common_mark(
    const std::vector<MarkedPair>& pairs, const Rational& m);

// Multiply every mark by nu (the spec's scale_pairs).
std::vector<MarkedPair> scale_pairs(const std::vector<MarkedPair>& pairs,
                                    const Rational& nu);

// Extract the largest common divisor-equation monomial (membership
// exponents modulo N) from pairs already scaled to a common mark.
std::vector<MarkedPair> monomial_divide(
    const std::vector<MarkedPair>& pairs,
    const std::vector<Poly>& divisor_eqs, const Ideal& N,
    const InvariantConfig& cfg = {});

// Year-zero maximal contact: a deterministic search for an integer
// direction v (spiral order, coefficients <= bound) with the d-th
// directional derivative of g a unit on the stratum; returns the contact
// equation N1 = (d-1st directional derivative) and the witness direction.
struct MaximalContact {
  std::vector<long> direction;
  Ideal N1;
};
MaximalContact maximal_contact(const Poly& g, unsigned d, const Ideal& stratum,
                               const InvariantConfig& cfg = {});

// Year-zero coefficient pairs (directional derivatives of g of order
// q = 0..d-2, marked d-q) for the chosen contact direction.
std::vector<MarkedPair> coefficient_pairs(const Poly& g, unsigned d,
                                          const std::vector<long>& direction);

// --- engine ---

struct ChartStratum {
  InvariantWord word;
  Ideal locus;   // closure of the stratum
  Poly avoid;    // stratum = V(locus) minus V(avoid)
  std::vector<std::string> incident;  // divisor ids containing the stratum
};

// Per-resolution invariant computations with memoized trail words.
class InvariantEngine {
 public:
  InvariantEngine(const ResolutionTree& tree, InvariantConfig cfg = {});

  // Full invariant word at a rational point of the chart.
  InvariantWord at_point(const std::string& chart_id, const PointQ& a);

  // Generic invariant word along the stratum V(Z) minus V(avoid).
  InvariantWord along(const std::string& chart_id, const Ideal& Z,
                      const Poly& avoid);

  // All certified constant-invariant strata of the chart's transform.
  std::vector<ChartStratum> strata(const std::string& chart_id);

  // The maximum-invariant stratum of the chart (nullopt when the transform
  // is a unit there).
  std::optional<ChartStratum> max_stratum_in_chart(
      const std::string& chart_id);

 private:
  struct Level;  // cascade state

  // generic_ok: accept contact witnesses that are valid at the generic
  // point of the stratum even if they degenerate on a proper sublocus
  // (used for trail words; the top-level stratification refines instead).
  InvariantWord cascade(const Chart& chart, const Poly& g, const Ideal& Z,
                        const Poly& avoid, bool generic_ok);
  // First 2r-1 slots (nu_1,s_1;...;nu_r) of the word at the year-k image
  // of the stratum, for trail matching.
  unsigned earliest_matching_year(const Chart& chart, const Ideal& Z,
                                  const std::vector<Rational>& nus,
                                  const std::vector<unsigned>& ss);

  const ResolutionTree& tree_;
  InvariantConfig cfg_;
  std::map<std::string, InvariantWord> cache_;
  // Per-chart stratification cache.  A chart's transform and divisors are
  // immutable; its stale-mask list only grows, so the mask count keys the
  // entry.
  std::map<std::string, std::vector<ChartStratum>> strata_cache_;
};

// Deterministic ordering on divisor-id subsets used for the J-extension:
// heavier birth-year multisets (older divisors weigh more) first, then
// reverse-lexicographic ids.  Returns -1/0/+1.
int j_subset_compare(const std::vector<std::string>& a,
                     const std::vector<std::string>& b,
                     const ResolutionTree& tree);

}  // namespace desing

#endif  // DESING_INVARIANT_HPP
