#ifndef DESING_RESOLVER_HPP
#define DESING_RESOLVER_HPP

// The year loop: extract the maximum-invariant stratum across the leaf
// atlas, certify admissibility, straighten, blow up, transform, and repeat
// until the stopping rule holds; plus the independent whole-tree verifier.

#include "desing/invariant.hpp"

namespace desing {

struct ResolverError : std::runtime_error {
  explicit ResolverError(const std::string& what)
      : std::runtime_error(what) {}
};

struct ResolverConfig {
  unsigned max_years = 30;
  long coef_bound = 3;
  unsigned kmax = 64;
  long witness_skip = 0;
  long max_strata = 512;
  unsigned sample_height = 8;  // height bound for property-check sampling
  enum class Mode { hypersurface, ideal_to_nc } mode = Mode::hypersurface;
  std::optional<long> prime;   // point-domain filter for sampled reports
  Budget budget;

  InvariantConfig invariant() const {
    InvariantConfig c;
    c.coef_bound = coef_bound;
    c.kmax = kmax;
    c.witness_skip = witness_skip;
    c.max_strata = max_strata;
    c.budget = budget;
    return c;
  }
};

// Per-leaf-chart verification outcome.
struct ChartCheck {
  std::string chart_id;
  bool transform_unit = false;
  bool smooth = false;
  bool snc = false;
  bool s1_zero = false;                       // hypersurface mode
  bool weak_unit = false;                     // ideal mode
  bool nc = false;                            // ideal mode: total pullback
  std::map<std::string, unsigned> nc_exponents;
  bool transform_identity = false;  // pullback = theta^e * stored transform
};

struct SemicontinuitySample {
  std::string chart_id;
  PointQ point;
  std::string word;        // canonical word at the sampled fiber point
  std::string image_word;  // word at the blowup image
  bool ok = false;
};

struct Certificate {
  bool passed = false;
  bool budget_exceeded = false;
  std::vector<std::string> failures;  // human-readable failed checks
  std::vector<ChartCheck> charts;     // leaf charts only
  // (year, canonical max word) recorded before each blowup.
  std::vector<std::pair<unsigned, std::string>> year_max_words;
  bool words_strictly_decreasing = false;
  bool semicontinuity_ok = false;
  std::vector<SemicontinuitySample> semicontinuity;
  bool e_bounds_ok = false;
};

// Leaf charts (charts that were never blown up), sorted by id.
std::vector<std::string> leaf_chart_ids(const ResolutionTree& tree);

// One year of the loop: find the maximum stratum over the leaf atlas,
// certify and blow up every component of it.  Returns false when the
// stopping rule already holds (tree unchanged).  Appends the year's
// maximum canonical word to max_words when a step is taken.
bool year_step(ResolutionTree& tree, const ResolverConfig& cfg,
               std::vector<std::pair<unsigned, std::string>>& max_words);

// Embedded resolution of the hypersurface V(g) (input reduced to its
// square-free part first): iterate year_step until the transform is
// smooth, snc with the divisors, and the counter s1 vanishes everywhere,
// then verify.  On budget exhaustion the certificate reports
// budget_exceeded and passed = false.
std::pair<ResolutionTree, Certificate> resolve_hypersurface(
    const Poly& g, const ResolverConfig& cfg = {});

// Principalization: iterate with weak transforms until the weak transform
// is the unit ideal in every chart, certifying that the total pullback is
// a divisor monomial times a unit.
std::pair<ResolutionTree, Certificate> resolve_ideal_to_nc(
    const Ideal& I, const ResolverConfig& cfg = {});

// Re-derive every certificate from scratch on a completed tree:
// smoothness/snc/nc of the leaves, transform identities, strict decrease
// of the recorded per-year maximum words, semicontinuity at sampled fiber
// points, and e-bounds on every word encountered.
Certificate verify_tree(const ResolutionTree& tree, const ResolverConfig& cfg,
                        const std::vector<std::pair<unsigned, std::string>>&
                            max_words = {});

}  // namespace desing

#endif  // DESING_RESOLVER_HPP
