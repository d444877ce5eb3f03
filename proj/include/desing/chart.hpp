#ifndef DESING_CHART_HPP
#define DESING_CHART_HPP

// Chart atlases, blowups along straightened smooth centers with the
// standard affine charts, exceptional-divisor history, strict/weak
// transforms, and normal-crossings certificates.

#include <map>
#include <optional>
#include <string>

#include "desing/ideals.hpp"

namespace desing {

// Invertible polynomial coordinate change.  `forward` expresses the old
// variables in the new coordinates (so substituting it into a polynomial
// rewrites the polynomial in the new coordinates); `inverse` expresses the
// new variables in the old ones (so evaluating it transports points from
// old to new coordinates).
struct Substitution {
  std::vector<Poly> forward;
  std::vector<Poly> inverse;

  static Substitution identity(const VarList& vars);
  bool is_identity() const;
  Poly apply(const Poly& p) const;
  Ideal apply(const Ideal& I) const;
  PointQ point_to_old(const PointQ& a_new) const;
  PointQ point_to_new(const PointQ& a_old) const;
  // Composite substitution: apply this change first, then `next`.
  Substitution then(const Substitution& next) const;
};

struct Chart {
  std::string id;
  unsigned year = 0;
  VarList vars;
  std::string parent_id;                   // empty for a root chart
  std::map<std::string, Poly> transition;  // parent variable -> Poly here
  // Divisors present in this chart, in birth order: (divisor id, local
  // equation).  Each equation is a nonunit cutting a smooth hypersurface.
  std::vector<std::pair<std::string, Poly>> divisors;
  // Equation of the exceptional divisor born with this chart (absent for
  // root charts).
  std::optional<Poly> exceptional;
  // Canonical region: this chart owns the locus V(canon) of the overlap
  // with its siblings (empty list = whole chart); the first chart of a
  // blowup owns the shared region.  Centers that miss the canonical
  // region may be realized in sibling charts instead.
  Ideal canon;
  // Loci excluded from singularity analysis in this chart because their
  // centers were blown up only in sibling charts (each entry is the
  // pulled-back center ideal).
  std::vector<Ideal> stale;

  const Poly* divisor_equation(const std::string& divisor_id) const;
};

struct DivisorRecord {
  std::string id;
  unsigned birth_year = 0;
};

// Straightened description of a center inside one chart.
struct ChartCenter {
  Ideal ideal;                 // center ideal in current chart coordinates
  Substitution straighten;     // change making the center a coordinate subspace
  std::vector<size_t> coords;  // vanishing coordinate indices after the change
  bool skipped = false;        // center misses this chart's canonical region
};

struct CenterSpec {
  std::map<std::string, ChartCenter> per_chart;
};

struct YearRecord {
  unsigned year = 0;
  CenterSpec center;
  std::string divisor_id;  // exceptional divisor born this year
  std::vector<std::string> new_chart_ids;
};

struct ResolutionTree {
  std::vector<Chart> charts;
  std::vector<DivisorRecord> divisors;
  std::vector<YearRecord> years;
  std::map<std::string, Poly> transform;        // hypersurface mode
  std::map<std::string, Ideal> ideal_transform; // ideal mode
  std::map<std::string, unsigned> weak_mult;    // ideal mode: theta-power removed

  const Chart& chart(const std::string& id) const;
  Chart& chart(const std::string& id);
  const DivisorRecord& divisor(const std::string& id) const;
};

// Pull a polynomial in parent coordinates back through the chart transition.
Poly pullback(const Poly& f_parent, const Chart& chart);
Ideal pullback(const Ideal& I_parent, const Chart& chart);

// Transport a point of this chart to the parent chart.
PointQ to_parent(const Chart& chart, const PointQ& a);

// Blowup along the coordinate subspace (after the straightening change)
// where the listed variables vanish.  Returns q charts; chart i has the
// monomial transition substituting x_{c_j} by x_{c_i} x_{c_j} for j != i.
// q = 1 yields the identity chart with the center as new exceptional
// equation.  Divisor lists are filled separately by update_divisors.
std::vector<Chart> blowup(const Chart& parent, const Substitution& straighten,
                          const std::vector<size_t>& center_coords,
                          unsigned year);

struct StraighteningError : std::runtime_error {
  explicit StraighteningError(const std::string& what)
      : std::runtime_error(what) {}
};

struct Straightening {
  Substitution subst;
  std::vector<size_t> coords;
};

// Find an invertible integer-coefficient change (linear steps with
// coefficients bounded by coef_bound, composed with triangular shears
// x_i -> x_i - p_i(other variables)) carrying V(C) to a coordinate
// subspace.  The result is verified by mutual normal-form membership.
// C must be smooth of pure codimension; zero-dimensional centers must be a
// single rational point (multi-point centers are split by the caller).
Straightening straighten_center(const Chart& chart, const Ideal& C,
                                long coef_bound = 3, const Budget& budget = {});

// Pull f (in parent coordinates) back through the chart transition and
// factor out the largest power of theta: returns (quotient, exponent).
std::pair<Poly, unsigned> strict_transform(const Poly& f, const Chart& chart,
                                           const Poly& theta);

// Weak transform: factor theta^mu from every pulled-back generator, where
// mu is the minimal theta-adic order over the generators.
std::pair<Ideal, unsigned> weak_transform_ideal(const Ideal& I,
                                                const Chart& chart,
                                                const Poly& theta);

// Carry the parent's divisors into each freshly blown-up child (strict
// transform of each equation; divisors whose transform becomes a unit are
// absent) and append the new exceptional divisor under the given id.
// Throws if a transformed divisor equation fails its smoothness
// certificate (signals an inadmissible center).
void update_divisors(const Chart& parent, std::vector<Chart>& children,
                     const std::string& new_divisor_id,
                     const Budget& budget = {});

// If f equals a monomial in the chart's divisor equations times a factor
// nonvanishing on V(at), return the exponent per divisor id; otherwise
// nullopt.
std::optional<std::map<std::string, unsigned>> nc_check(const Poly& f,
                                                        const Chart& chart,
                                                        const Ideal& at,
                                                        const Budget& budget = {});

// True iff the smooth hypersurface V(X) (or empty: unit ideal) meets every
// subset of the chart's divisors transversally (Jacobian certificate on
// each common locus).  Throws on non-smooth X.
bool snc_check(const Ideal& X, const Chart& chart, const Budget& budget = {});

// True when V(center) misses this chart's canonical region.
bool misses_canonical_region(const Ideal& center, const Chart& chart,
                             const Budget& budget = {});

// Mutual-membership equality of ideals.
bool ideal_equal(const Ideal& a, const Ideal& b, const Budget& budget = {});

}  // namespace desing

#endif  // DESING_CHART_HPP
