#include "desing/resolver.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstdio>
#include <set>
#include <sstream>

namespace desing {

namespace {

Poly one_poly(const VarList& vars) {
  return Poly::constant(vars, Rational(1));
}

bool has_children(const ResolutionTree& tree, const std::string& id) {
  for (const auto& c : tree.charts)
    if (c.parent_id == id) return true;
  return false;
}

// Atlas in force just before the blowups of year t: charts born earlier
// that had not been blown up by then.
std::vector<std::string> atlas_before_year(const ResolutionTree& tree,
                                           unsigned t) {
  std::vector<std::string> out;
  for (const auto& c : tree.charts) {
    if (c.year >= t) continue;
    bool blown_before = false;
    for (const auto& k : tree.charts)
      if (k.parent_id == c.id && k.year < t) blown_before = true;
    if (!blown_before) out.push_back(c.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Ideal root_image(const ResolutionTree& tree, const Chart& chart,
                 const Ideal& Z, const Budget& B) {
  Ideal cur = Z;
  const Chart* c = &chart;
  while (!c->parent_id.empty()) {
    const Chart& par = tree.chart(c->parent_id);
    cur = image_ideal(cur, par.vars, c->transition, B);
    c = &par;
  }
  return cur;
}

// V(G) contained in the union of the mask varieties (vacuously: empty).
bool contained_in_masks(const Ideal& G, const std::vector<Ideal>& masks,
                        const Budget& B) {
  if (is_unit_ideal(G, B)) return true;
  if (masks.empty()) return false;
  std::vector<Poly> prods{one_poly(G.front().vars())};
  for (const auto& m : masks) {
    std::vector<Poly> next;
    for (const auto& p : prods)
      for (const auto& g : m)
        if (!g.is_zero()) next.push_back(p * g);
    if (next.empty()) return true;  // zero mask: the whole chart is stale
    prods = std::move(next);
  }
  for (const auto& p : prods)
    if (!vanishes_on(p, G, B)) return false;
  return true;
}

// Smoothness of V(X) in the given codimension away from the stale loci.
bool smooth_modulo(const Ideal& X, unsigned codim, const Chart& chart,
                   const Budget& B) {
  return contained_in_masks(singular_locus_ideal(X, codim, Ideal{}),
                            chart.stale, B);
}

// Simple normal crossings of V(f) with the divisor arrangement, away from
// the stale loci: every subset meets transversally.
bool snc_modulo(const Poly& f, const Chart& chart, const Budget& B) {
  const VarList& vars = chart.vars;
  size_t m = chart.divisors.size();
  if (m > 20) throw ResolverError("snc check: too many divisors");
  bool with_x_max = !f.is_constant();
  for (size_t mask = 0; mask < (size_t(1) << m); ++mask) {
    for (int with_x = 0; with_x <= (with_x_max ? 1 : 0); ++with_x) {
      Ideal J;
      unsigned codim = 0;
      if (with_x) {
        J.push_back(f);
        ++codim;
      }
      for (size_t h = 0; h < m; ++h)
        if (mask & (size_t(1) << h)) {
          J.push_back(chart.divisors[h].second);
          ++codim;
        }
      if (codim == 0) continue;
      if (codim > vars.size()) {
        if (!contained_in_masks(J, chart.stale, B)) return false;
      } else if (!smooth_modulo(J, codim, chart, B)) {
        return false;
      }
    }
  }
  return true;
}

bool s1_zero_everywhere(InvariantEngine& eng, const std::string& chart_id) {
  for (const auto& st : eng.strata(chart_id))
    if (!st.word.entries.empty() && st.word.entries.front().second != 0)
      return false;
  return true;
}

// Per-leaf stopping data, shared by the year loop and the verifier.
struct LeafStatus {
  bool transform_unit = false;
  bool smooth = false;
  bool snc = false;
  bool s1 = false;
  bool weak_unit = false;

  bool resolved(ResolverConfig::Mode mode) const {
    if (mode == ResolverConfig::Mode::ideal_to_nc) return weak_unit;
    return transform_unit || (smooth && snc && s1);
  }
};

LeafStatus leaf_status(const ResolutionTree& tree, InvariantEngine* eng,
                       const Chart& chart, const ResolverConfig& cfg) {
  LeafStatus s;
  if (cfg.mode == ResolverConfig::Mode::ideal_to_nc) {
    s.weak_unit = is_unit_ideal(tree.ideal_transform.at(chart.id), cfg.budget);
    return s;
  }
  const Poly& f = tree.transform.at(chart.id);
  if (f.is_constant()) {
    s.transform_unit = s.smooth = s.snc = s.s1 = true;
    return s;
  }
  s.smooth = smooth_modulo({f}, 1, chart, cfg.budget);
  s.snc = s.smooth && snc_modulo(f, chart, cfg.budget);
  s.s1 = eng ? s1_zero_everywhere(*eng, chart.id) : false;
  return s;
}

// One candidate center trace in one chart.
struct Seed {
  std::string chart_id;
  Ideal locus;
  std::string locus_key;
  std::string root_key;
  bool owned = false;
};

// Closure of the open stratum V(Z) minus V(avoid): saturate by avoid.
Ideal saturate(Ideal Z, const Poly& avoid, const Budget& B) {
  if (avoid.is_constant()) return Z;
  for (int pass = 0; pass < 16; ++pass) {
    Ideal Q = ideal_quotient(Z, avoid, B);
    if (ideal_equal(Q, Z, B)) return Z;
    Z = Q;
  }
  throw ResolverError("stratum saturation did not stabilize");
}

Ideal reduce_locus(const Ideal& Z, const Budget& B) {
  Ideal cur = Z;
  for (int pass = 0; pass < 4; ++pass) {
    GroebnerBasis G = groebner(cur, {}, B);
    Ideal next;
    for (const auto& b : G.basis) {
      if (b.is_zero()) continue;
      next.push_back(b.is_constant() ? b : squarefree_part(b));
    }
    if (next == cur || next == G.basis) return next;
    cur = next;
  }
  return cur;
}

// Split zero-dimensional multi-point loci into per-point seeds.
std::vector<Ideal> split_points(const Ideal& Z, const VarList& vars,
                                const Budget& B) {
  if (dim_ideal(Z, B) != 0) return {Z};
  auto pts = rational_points(Z, B);
  if (!pts || pts->size() <= 1) return {Z};
  std::sort(pts->begin(), pts->end());
  std::vector<Ideal> out;
  for (const auto& p : *pts) out.push_back(point_ideal(vars, p));
  return out;
}

// Emit center seeds for one maximum stratum.  Ownership is decided on the
// whole stratum first so that a skipped copy is masked by the exact locus
// the stratification engine sees; only owned strata are split into their
// rational points.
void append_seeds(std::vector<Seed>& seeds, const ResolutionTree& tree,
                  const Chart& chart, const Ideal& locus, const Budget& B) {
  auto make = [&](const Ideal& L, bool owned) {
    Seed s;
    s.chart_id = chart.id;
    s.locus = L;
    s.locus_key = ideal_key(L, B);
    s.root_key = ideal_key(root_image(tree, chart, L, B), B);
    s.owned = owned;
    seeds.push_back(std::move(s));
  };
  if (misses_canonical_region(locus, chart, B)) {
    make(locus, false);
    return;
  }
  for (const auto& P : split_points(locus, chart.vars, B))
    make(reduce_locus(P, B), !misses_canonical_region(P, chart, B));
}

// Maximum invariant word over the atlas and all strata attaining it.
struct MaxData {
  std::optional<InvariantWord> word;  // hypersurface mode
  unsigned order = 0;                 // ideal mode
  std::vector<std::string> J;         // extended-invariant index (ZERO words)
  std::vector<Seed> seeds;
};

// Compare words by entries and terminal only (no companion tie-break): the
// equimultiple strata of a ZERO-terminal value share the word but may carry
// distinct companion orders.
int base_compare(InvariantWord a, InvariantWord b) {
  a.companion.reset();
  b.companion.reset();
  return word_compare(a, b);
}

MaxData hypersurface_max(const ResolutionTree& tree, InvariantEngine& eng,
                         const std::vector<std::string>& atlas,
                         const ResolverConfig& cfg) {
  const Budget& B = cfg.budget;
  MaxData out;
  std::vector<std::pair<std::string, ChartStratum>> all;
  for (const auto& id : atlas) {
    const Poly& f = tree.transform.at(id);
    if (f.is_constant()) continue;
    for (const auto& st : eng.strata(id)) {
      if (!out.word || base_compare(st.word, *out.word) > 0) {
        out.word = st.word;
      } else if (base_compare(st.word, *out.word) == 0 && st.word.companion &&
                 (!out.word->companion ||
                  *st.word.companion > *out.word->companion)) {
        // Record the largest companion order attained on the word.
        out.word->companion = st.word.companion;
      }
      all.emplace_back(id, st);
    }
  }
  if (!out.word) return out;
  std::map<std::string,
           std::vector<std::pair<Ideal, std::vector<std::string>>>>
      per_chart;
  for (const auto& [id, st] : all)
    if (base_compare(st.word, *out.word) == 0)
      per_chart[id].emplace_back(
          reduce_locus(saturate(st.locus, st.avoid, B), B), st.incident);
  std::vector<std::tuple<std::string, Ideal, std::vector<std::string>>> picked;
  for (auto& [id, loci] : per_chart) {
    // Refinement can emit a point and an open stratum whose closure
    // contains it with equal words; keep only the maximal loci.
    std::vector<bool> drop(loci.size(), false);
    auto contains = [&](const Ideal& big, const Ideal& small) {
      for (const auto& g : big)
        if (!vanishes_on(g, small, B)) return false;
      return true;
    };
    for (size_t i = 0; i < loci.size(); ++i)
      for (size_t j = 0; j < loci.size(); ++j) {
        if (i == j || drop[j] || drop[i]) continue;
        if (!contains(loci[j].first, loci[i].first)) continue;
        if (!contains(loci[i].first, loci[j].first) || j < i) {
          drop[i] = true;
          break;
        }
      }
    for (size_t i = 0; i < loci.size(); ++i)
      if (!drop[i]) picked.emplace_back(id, loci[i].first, loci[i].second);
  }
  if (out.word->terminal == InvariantWord::Terminal::ZERO) {
    // Extended invariant: the center is the component cut out by the
    // maximal set J of divisors containing it; components with smaller J
    // wait for a later year.
    bool first = true;
    for (const auto& [id, locus, j] : picked) {
      if (first || j_subset_compare(j, out.J, tree) > 0) out.J = j;
      first = false;
    }
    std::erase_if(picked, [&](const auto& p) {
      return j_subset_compare(std::get<2>(p), out.J, tree) != 0;
    });
  }
  for (const auto& [id, locus, j] : picked)
    append_seeds(out.seeds, tree, tree.chart(id), locus, B);
  return out;
}

unsigned ideal_max_order(const Ideal& W, const Budget& B) {
  unsigned d = 0;
  for (unsigned s = 1; s <= 64; ++s) {
    if (is_unit_ideal(derivative_ideal(W, s), B)) break;
    d = s;
  }
  return d;
}

MaxData ideal_max(const ResolutionTree& tree,
                  const std::vector<std::string>& atlas,
                  const ResolverConfig& cfg) {
  const Budget& B = cfg.budget;
  MaxData out;
  std::vector<std::pair<std::string, unsigned>> orders;
  for (const auto& id : atlas) {
    const Ideal& W = tree.ideal_transform.at(id);
    if (is_unit_ideal(W, B)) continue;
    unsigned d = ideal_max_order(W, B);
    if (d == 0)
      throw ResolverError("ideal mode: nonunit weak transform of order 0");
    orders.emplace_back(id, d);
    out.order = std::max(out.order, d);
  }
  for (const auto& [id, d] : orders) {
    if (d != out.order) continue;
    const Chart& chart = tree.chart(id);
    Ideal L = reduce_locus(derivative_ideal(tree.ideal_transform.at(id),
                                            out.order),
                           B);
    append_seeds(out.seeds, tree, chart, L, B);
  }
  return out;
}

// A component of the maximum locus: the same center seen from one or more
// charts (matched by the image ideal in the root chart).
struct Component {
  std::string root_key;
  std::vector<Seed> seeds;  // owned traces to blow up
};

std::vector<Component> group_components(std::vector<Seed> seeds) {
  std::map<std::string, std::vector<Seed>> owned, skipped;
  for (auto& s : seeds) (s.owned ? owned : skipped)[s.root_key].push_back(s);
  for (const auto& [key, group] : skipped)
    if (!owned.count(key))
      throw ResolverError(
          "center component is canonically owned by no chart: " + key);
  std::vector<Component> out;
  for (auto& [key, group] : owned) {
    std::sort(group.begin(), group.end(), [](const Seed& a, const Seed& b) {
      return std::tie(a.chart_id, a.locus_key) <
             std::tie(b.chart_id, b.locus_key);
    });
    std::set<std::string> charts;
    for (const auto& s : group) charts.insert(s.chart_id);
    if (charts.size() == group.size() || charts.size() == 1) {
      if (charts.size() == 1 && group.size() > 1) {
        // Disjoint strata of one chart with equal words: one component each.
        for (auto& s : group) out.push_back({key, {s}});
      } else {
        out.push_back({key, std::move(group)});
      }
    } else {
      throw ResolverError(
          "ambiguous cross-chart center identification for root image " + key);
    }
  }
  std::sort(out.begin(), out.end(), [](const Component& a, const Component& b) {
    if (a.root_key != b.root_key) return a.root_key < b.root_key;
    return a.seeds.front().locus_key < b.seeds.front().locus_key;
  });
  return out;
}

void certify_admissible(const ResolutionTree& tree, const Chart& chart,
                        const Ideal& center, const ResolverConfig& cfg) {
  const Budget& B = cfg.budget;
  if (cfg.mode == ResolverConfig::Mode::ideal_to_nc) {
    for (const auto& g : tree.ideal_transform.at(chart.id))
      if (!vanishes_on(g, center, B))
        throw ResolverError("inadmissible center: not inside the cosupport");
    return;
  }
  const Poly& f = tree.transform.at(chart.id);
  bool in_sing = true;
  for (const auto& g : derivative_ideal(f, 2))
    if (!vanishes_on(g, center, B)) {
      in_sing = false;
      break;
    }
  if (in_sing) return;
  // The center must lie on the transform and miss its singular locus.
  Ideal meet = singular_locus_ideal({f}, 1, Ideal{});
  for (const auto& g : center) meet.push_back(g);
  if (!is_unit_ideal(meet, B) || !vanishes_on(f, center, B))
    throw ResolverError(
        "inadmissible center: neither inside the singular locus nor along a "
        "smooth part of the transform (chart " + chart.id + ", center " +
        ideal_key(center, B) + ", transform " + f.str() + ")");
  bool in_divisor = false;
  for (const auto& [id, theta] : chart.divisors)
    if (vanishes_on(theta, center, B)) {
      in_divisor = true;
      break;
    }
  if (!in_divisor)
    throw ResolverError(
        "inadmissible center: smooth transform but center meets no divisor");
}

// Blow the component up in one chart; appends children and transforms.
void blow_in_chart(ResolutionTree& tree, const std::string& chart_id,
                   const Ideal& center, const std::string& divisor_id,
                   unsigned year, YearRecord& rec, const ResolverConfig& cfg) {
  const Budget& B = cfg.budget;
  Chart parent = tree.chart(chart_id);  // copy: tree.charts reallocates
  certify_admissible(tree, parent, center, cfg);
  Straightening st = straighten_center(parent, center, cfg.coef_bound, B);
  std::vector<Chart> children = blowup(parent, st.subst, st.coords, year);
  update_divisors(parent, children, divisor_id, B);
  ChartCenter cc{center, st.subst, st.coords, false};
  rec.center.per_chart[chart_id] = cc;
  for (auto& child : children) {
    const Poly& theta = *child.exceptional;
    if (cfg.mode == ResolverConfig::Mode::ideal_to_nc) {
      auto [w, k] = weak_transform_ideal(tree.ideal_transform.at(chart_id),
                                         child, theta);
      tree.ideal_transform[child.id] = w;
      tree.weak_mult[child.id] = k;
    } else {
      auto [f1, k] = strict_transform(tree.transform.at(chart_id), child,
                                      theta);
      (void)k;
      tree.transform[child.id] = f1;
    }
    rec.new_chart_ids.push_back(child.id);
    tree.charts.push_back(std::move(child));
  }
}

// Current leaf descendants of a chart (the chart itself when unblown).
std::vector<std::string> leaf_descendants(const ResolutionTree& tree,
                                          const std::string& id) {
  if (!has_children(tree, id)) return {id};
  std::vector<std::string> out;
  for (const auto& c : tree.charts)
    if (c.parent_id == id)
      for (auto& d : leaf_descendants(tree, c.id)) out.push_back(d);
  std::sort(out.begin(), out.end());
  return out;
}

std::string word_or_order_string(const MaxData& m,
                                 ResolverConfig::Mode mode) {
  if (mode == ResolverConfig::Mode::ideal_to_nc)
    return "order " + std::to_string(m.order);
  std::string out = m.word->str();
  if (m.word->terminal == InvariantWord::Terminal::ZERO) {
    out += " [mu=" + (m.word->companion ? rational_str(*m.word->companion)
                                        : std::string("0")) +
           "; J=";
    auto ids = m.J;
    std::sort(ids.begin(), ids.end());
    for (size_t i = 0; i < ids.size(); ++i) out += (i ? "," : "") + ids[i];
    out += "]";
  }
  return out;
}

}  // namespace

std::vector<std::string> leaf_chart_ids(const ResolutionTree& tree) {
  std::vector<std::string> out;
  for (const auto& c : tree.charts)
    if (!has_children(tree, c.id)) out.push_back(c.id);
  std::sort(out.begin(), out.end());
  return out;
}

bool year_step(ResolutionTree& tree, const ResolverConfig& cfg,
               std::vector<std::pair<unsigned, std::string>>& max_words) {
  const Budget& B = cfg.budget;
  const bool ideal_mode = cfg.mode == ResolverConfig::Mode::ideal_to_nc;
  auto leaves = leaf_chart_ids(tree);
  InvariantEngine eng(tree, cfg.invariant());

  bool all_resolved = true;
  for (const auto& id : leaves)
    if (!leaf_status(tree, &eng, tree.chart(id), cfg).resolved(cfg.mode)) {
      all_resolved = false;
      break;
    }
  if (all_resolved) return false;

  MaxData mx = ideal_mode ? ideal_max(tree, leaves, cfg)
                          : hypersurface_max(tree, eng, leaves, cfg);
  if (mx.seeds.empty())
    throw ResolverError("unresolved leaves but no maximum stratum found");

  unsigned year = static_cast<unsigned>(
      tree.years.empty() ? 1 : tree.years.back().year + 1);
  max_words.emplace_back(year, word_or_order_string(mx, cfg.mode));

  auto components = group_components(mx.seeds);
  std::vector<bool> masked(mx.seeds.size(), false);
  for (size_t ci = 0; ci < components.size(); ++ci) {
    std::string divisor_id = "E" + std::to_string(year);
    if (components.size() > 1) divisor_id += static_cast<char>('a' + ci);
    YearRecord rec;
    rec.year = year;
    rec.divisor_id = divisor_id;
    // Traces whose straightening failed; they may be masked afterwards if a
    // blown sibling chart covers them.
    std::vector<std::pair<std::string, Ideal>> unstraightened;
    std::string straighten_err;
    for (const auto& seed : components[ci].seeds) {
      // The seed chart may have been blown up by an earlier component of
      // this year; transport the center into its current leaves.
      for (const auto& leaf_id : leaf_descendants(tree, seed.chart_id)) {
        Ideal center = seed.locus;
        if (leaf_id != seed.chart_id) {
          Ideal pulled = seed.locus;
          // Pull back through the chain seed.chart_id -> leaf.
          std::vector<const Chart*> chain;
          for (const Chart* c = &tree.chart(leaf_id); c->id != seed.chart_id;
               c = &tree.chart(c->parent_id))
            chain.push_back(c);
          for (auto it = chain.rbegin(); it != chain.rend(); ++it)
            pulled = pullback(pulled, **it);
          if (is_unit_ideal(pulled, B)) continue;
          center = reduce_locus(pulled, B);
        }
        Chart& leaf = tree.chart(leaf_id);
        if (misses_canonical_region(center, leaf, B)) {
          leaf.stale.push_back(center);
          ChartCenter cc{center, Substitution::identity(leaf.vars), {}, true};
          rec.center.per_chart[leaf_id] = cc;
          continue;
        }
        try {
          blow_in_chart(tree, leaf_id, center, divisor_id, year, rec, cfg);
        } catch (const StraighteningError& e) {
          unstraightened.emplace_back(leaf_id, center);
          if (straighten_err.empty()) straighten_err = e.what();
        }
      }
    }
    if (rec.new_chart_ids.empty() && !straighten_err.empty())
      throw StraighteningError(straighten_err);
    if (rec.new_chart_ids.empty())
      throw ResolverError("center component " + components[ci].root_key +
                          " was skipped in every chart");
    // An unstraightenable trace C in chart A may be dropped when a sibling
    // chart B (standard chart j of the same blowup) blew its own trace of
    // this component and covers C: the gluing A -> B is defined away from
    // {x_{c_j} = 0}, so V(C) disjoint from that hyperplane means every
    // point of C is realized in B's children and A \ C stays a valid chart.
    for (const auto& [leaf_id, center] : unstraightened) {
      const Chart& fail_chart = tree.chart(leaf_id);
      bool covered = false;
      // The covering sibling may be interior: its copy of the component was
      // then realized (blown or masked with its own coverage) in its leaf
      // descendants during this same year.
      for (const Chart& sib : tree.charts) {
        if (sib.id == leaf_id || sib.parent_id != fail_chart.parent_id ||
            sib.year != fail_chart.year || !sib.exceptional)
          continue;
        Ideal probe = center;
        probe.push_back(*sib.exceptional);
        if (!is_unit_ideal(probe, B)) continue;
        // Break justification cycles: the sibling's subtree must itself
        // realize the component by an actual blowup.
        for (const auto& [blown_id, cc] : rec.center.per_chart) {
          if (cc.skipped) continue;
          if (blown_id == sib.id ||
              blown_id.compare(0, sib.id.size() + 1, sib.id + ".") == 0) {
            covered = true;
            break;
          }
        }
        if (covered) break;
      }
      if (!covered) {
        if (std::getenv("DESING_DEBUG")) {
          std::fprintf(stderr, "[demote-fail] chart %s parent %s center %s\n",
                       leaf_id.c_str(), fail_chart.parent_id.c_str(),
                       ideal_key(center, B).c_str());
          for (const auto& [blown_id, cc] : rec.center.per_chart)
            std::fprintf(stderr, "  blown %s skipped=%d parent %s exc %s\n",
                         blown_id.c_str(), int(cc.skipped),
                         tree.chart(blown_id).parent_id.c_str(),
                         tree.chart(blown_id).exceptional
                             ? tree.chart(blown_id).exceptional->str().c_str()
                             : "-");
        }
        throw StraighteningError(straighten_err);
      }
      Chart& ch = tree.chart(leaf_id);
      ch.stale.push_back(center);
      ChartCenter cc{center, Substitution::identity(ch.vars), {}, true};
      rec.center.per_chart[leaf_id] = cc;
    }
    // Mask the unblown copies carried by other leaves.
    for (size_t si = 0; si < mx.seeds.size(); ++si) {
      const Seed& seed = mx.seeds[si];
      if (seed.owned || masked[si] ||
          seed.root_key != components[ci].root_key)
        continue;
      masked[si] = true;
      Chart& ch = tree.chart(seed.chart_id);
      ch.stale.push_back(seed.locus);
      ChartCenter cc{seed.locus, Substitution::identity(ch.vars), {}, true};
      rec.center.per_chart[seed.chart_id] = cc;
    }
    tree.divisors.push_back({divisor_id, year});
    tree.years.push_back(std::move(rec));
  }
  return true;
}

std::pair<ResolutionTree, Certificate> resolve_hypersurface(
    const Poly& g, const ResolverConfig& cfg) {
  if (g.is_zero() || g.is_constant())
    throw ResolverError("resolve_hypersurface: input must be a nonzero "
                        "nonunit polynomial");
  ResolverConfig c = cfg;
  c.mode = ResolverConfig::Mode::hypersurface;
  ResolutionTree tree;
  Chart root;
  root.id = "c0";
  root.year = 0;
  root.vars = g.vars();
  tree.charts.push_back(std::move(root));
  tree.transform["c0"] = squarefree_part(g);

  std::vector<std::pair<unsigned, std::string>> max_words;
  bool stopped = false;
  for (unsigned y = 0; y < c.max_years; ++y) {
    if (!year_step(tree, c, max_words)) {
      stopped = true;
      break;
    }
  }
  Certificate cert = verify_tree(tree, c, max_words);
  if (!stopped) {
    cert.budget_exceeded = true;
    cert.passed = false;
    cert.failures.push_back("max-years budget exhausted before the stopping "
                            "rule held");
  }
  return {std::move(tree), std::move(cert)};
}

std::pair<ResolutionTree, Certificate> resolve_ideal_to_nc(
    const Ideal& I, const ResolverConfig& cfg) {
  Ideal gens;
  for (const auto& g : I)
    if (!g.is_zero()) gens.push_back(g);
  if (gens.empty())
    throw ResolverError("resolve_ideal_to_nc: the zero ideal has no "
                        "principalization");
  if (is_unit_ideal(gens, cfg.budget))
    throw ResolverError("resolve_ideal_to_nc: the unit ideal is already "
                        "trivial");
  ResolverConfig c = cfg;
  c.mode = ResolverConfig::Mode::ideal_to_nc;
  ResolutionTree tree;
  Chart root;
  root.id = "c0";
  root.year = 0;
  root.vars = gens.front().vars();
  tree.charts.push_back(std::move(root));
  tree.ideal_transform["c0"] = gens;
  tree.weak_mult["c0"] = 0;

  std::vector<std::pair<unsigned, std::string>> max_words;
  bool stopped = false;
  for (unsigned y = 0; y < c.max_years; ++y) {
    if (!year_step(tree, c, max_words)) {
      stopped = true;
      break;
    }
  }
  Certificate cert = verify_tree(tree, c, max_words);
  if (!stopped) {
    cert.budget_exceeded = true;
    cert.passed = false;
    cert.failures.push_back("max-years budget exhausted before the stopping "
                            "rule held");
  }
  return {std::move(tree), std::move(cert)};
}

namespace {

// Deterministic list of rationals ordered by height (max of |num|, den).
std::vector<Rational> height_values(unsigned hmax) {
  std::vector<Rational> out;
  out.push_back(Rational(0));
  for (long h = 1; h <= static_cast<long>(hmax); ++h) {
    for (long p = -h; p <= h; ++p) {
      for (long q = 1; q <= h; ++q) {
        if (std::max(std::abs(p), q) != h) continue;
        if (boost::multiprecision::gcd(Int(std::abs(p)), Int(q)) != 1)
          continue;
        out.push_back(Rational(p) / Rational(q));
      }
    }
  }
  return out;
}

// Sampled rational points on the exceptional fiber of one new chart.
std::vector<PointQ> fiber_samples(const Chart& chart, const Poly& transform,
                                  unsigned hmax, size_t cap) {
  std::vector<PointQ> out;
  size_t n = chart.vars.size();
  size_t exc = n;
  for (size_t i = 0; i < n; ++i)
    if (Poly::variable(chart.vars, i) == *chart.exceptional) exc = i;
  if (exc == n) return out;  // non-coordinate exceptional: skip sampling
  std::vector<Rational> vals = height_values(hmax);
  std::vector<size_t> idx(n > 1 ? n - 1 : 0, 0);
  while (true) {
    PointQ a(n, Rational(0));
    size_t k = 0;
    for (size_t i = 0; i < n; ++i)
      if (i != exc) a[i] = vals[idx[k++]];
    if (transform.eval(a) == 0) {
      out.push_back(a);
      if (out.size() >= cap) return out;
    }
    // Odometer over the free coordinates.
    size_t j = 0;
    for (; j < idx.size(); ++j) {
      if (++idx[j] < vals.size()) break;
      idx[j] = 0;
    }
    if (j == idx.size() || idx.empty()) break;
  }
  return out;
}

Ideal total_pullback(const ResolutionTree& tree, const Chart& chart,
                     const Ideal& root_gens) {
  std::vector<const Chart*> chain;
  for (const Chart* c = &chart; !c->parent_id.empty();
       c = &tree.chart(c->parent_id))
    chain.push_back(c);
  Ideal cur = root_gens;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it)
    cur = pullback(cur, **it);
  return cur;
}

}  // namespace

Certificate verify_tree(const ResolutionTree& tree, const ResolverConfig& cfg,
                        const std::vector<std::pair<unsigned, std::string>>&
                            max_words) {
  const Budget& B = cfg.budget;
  const bool ideal_mode = cfg.mode == ResolverConfig::Mode::ideal_to_nc;
  Certificate cert;
  cert.e_bounds_ok = true;
  cert.semicontinuity_ok = true;
  cert.words_strictly_decreasing = true;

  InvariantEngine eng(tree, cfg.invariant());
  auto note = [&](const std::string& f) { cert.failures.push_back(f); };
  auto check_word = [&](const InvariantWord& w) {
    if (!e_bounds_check(w)) {
      cert.e_bounds_ok = false;
      note("e-bounds violated by word " + w.str());
    }
  };

  // Recompute the per-year maximum words from scratch and compare against
  // the recorded run (when provided).
  std::set<unsigned> year_values;
  for (const auto& rec : tree.years) year_values.insert(rec.year);
  std::vector<std::string> recomputed;
  std::optional<InvariantWord> prev_word;
  std::vector<std::string> prev_J;
  std::optional<unsigned> prev_order;
  for (unsigned t : year_values) {
    auto atlas = atlas_before_year(tree, t);
    MaxData mx = ideal_mode ? ideal_max(tree, atlas, cfg)
                            : hypersurface_max(tree, eng, atlas, cfg);
    if (!ideal_mode && !mx.word) {
      note("year " + std::to_string(t) + ": no maximum word recomputable");
      continue;
    }
    std::string ws = word_or_order_string(mx, cfg.mode);
    cert.year_max_words.emplace_back(t, ws);
    if (ideal_mode) {
      if (prev_order && mx.order >= *prev_order) {
        cert.words_strictly_decreasing = false;
        note("year " + std::to_string(t) + ": maximum order did not drop");
      }
      prev_order = mx.order;
    } else {
      check_word(*mx.word);
      if (prev_word) {
        int c = word_compare(*mx.word, *prev_word);
        // Equal ZERO-terminal maxima must descend in the extended index J.
        if (c > 0 || (c == 0 && j_subset_compare(mx.J, prev_J, tree) >= 0)) {
          cert.words_strictly_decreasing = false;
          note("year " + std::to_string(t) + ": maximum word did not drop");
        }
      }
      prev_word = *mx.word;
      prev_J = mx.J;
    }
  }
  if (!max_words.empty()) {
    bool same = max_words.size() == cert.year_max_words.size();
    for (size_t i = 0; same && i < max_words.size(); ++i)
      same = max_words[i] == cert.year_max_words[i];
    if (!same) {
      cert.words_strictly_decreasing = false;
      note("recorded per-year maximum words differ from the recomputation");
    }
  }

  // Transform identities on every non-root chart.
  bool transforms_ok = true;
  for (const auto& chart : tree.charts) {
    if (chart.parent_id.empty()) continue;
    const Poly& theta = *chart.exceptional;
    if (ideal_mode) {
      auto [w, k] = weak_transform_ideal(
          tree.ideal_transform.at(chart.parent_id), chart, theta);
      if (!ideal_equal(w, tree.ideal_transform.at(chart.id), B) ||
          k != tree.weak_mult.at(chart.id))
        transforms_ok = false;
    } else {
      auto [f1, k] = strict_transform(tree.transform.at(chart.parent_id),
                                      chart, theta);
      (void)k;
      if (!(f1 == tree.transform.at(chart.id))) transforms_ok = false;
    }
    if (!transforms_ok) {
      note("transform identity fails in chart " + chart.id);
      break;
    }
  }

  // Leaf checks.
  const Ideal root_gens = ideal_mode
                              ? tree.ideal_transform.at(tree.charts.front().id)
                              : Ideal{tree.transform.at(
                                    tree.charts.front().id)};
  for (const auto& id : leaf_chart_ids(tree)) {
    const Chart& chart = tree.chart(id);
    LeafStatus ls = leaf_status(tree, &eng, chart, cfg);
    ChartCheck cc;
    cc.chart_id = id;
    cc.transform_unit = ls.transform_unit;
    cc.smooth = ls.smooth;
    cc.snc = ls.snc;
    cc.s1_zero = ls.s1;
    cc.weak_unit = ls.weak_unit;
    if (!ls.resolved(cfg.mode))
      note("leaf " + id + " fails the stopping certificate");
    // Total-pullback normal crossings bookkeeping.
    Ideal total = total_pullback(tree, chart, root_gens);
    if (ideal_mode) {
      for (const auto& g : total) {
        if (g.is_zero()) continue;
        for (const auto& [did, theta] : chart.divisors) {
          unsigned k = static_cast<unsigned>(
              divisibility_order(g, theta).value());
          auto it = cc.nc_exponents.find(did);
          if (it == cc.nc_exponents.end() || k < it->second)
            cc.nc_exponents[did] = k;
        }
      }
      Ideal divided;
      for (const auto& g : total) {
        Poly r = g;
        for (const auto& [did, theta] : chart.divisors)
          for (unsigned t = 0; t < cc.nc_exponents[did]; ++t)
            r = *exact_divide(r, theta);
        divided.push_back(r);
      }
      cc.nc = is_unit_ideal(divided, B);
      if (!cc.nc)
        note("leaf " + id + ": total pullback is not a divisor monomial "
             "times a unit");
    } else {
      Poly r = total.front();
      bool ok = !r.is_zero();
      if (ok) {
        for (const auto& [did, theta] : chart.divisors) {
          ExtNat d = divisibility_order(r, theta);
          unsigned k = static_cast<unsigned>(d.value());
          cc.nc_exponents[did] = k;
          for (unsigned t = 0; t < k; ++t) r = *exact_divide(r, theta);
        }
        auto q = exact_divide(r, tree.transform.at(id));
        ok = q.has_value() && q->is_unit();
      }
      cc.nc = ok;
      if (!ok)
        note("leaf " + id + ": total pullback is not divisors^e times the "
             "stored transform");
    }
    cc.transform_identity = transforms_ok;
    if (!ideal_mode)
      for (const auto& st : eng.strata(id)) check_word(st.word);
    cert.charts.push_back(std::move(cc));
  }

  // Semicontinuity sampling along every blowup (hypersurface mode).
  if (!ideal_mode) {
    for (const auto& rec : tree.years) {
      for (const auto& cid : rec.new_chart_ids) {
        const Chart& chart = tree.chart(cid);
        const Poly& f = tree.transform.at(cid);
        if (f.is_constant()) continue;
        for (const auto& a :
             fiber_samples(chart, f, cfg.sample_height, 8)) {
          SemicontinuitySample s;
          s.chart_id = cid;
          s.point = a;
          try {
            InvariantWord w = eng.at_point(cid, a);
            InvariantWord wi = eng.at_point(chart.parent_id,
                                            to_parent(chart, a));
            s.word = w.str();
            s.image_word = wi.str();
            check_word(w);
            check_word(wi);
            int c = word_compare(w, wi);
            s.ok = wi.terminal == InvariantWord::Terminal::INF ? c < 0
                                                               : c <= 0;
          } catch (const std::exception& e) {
            s.ok = false;
            s.word = std::string("error: ") + e.what();
          }
          if (!s.ok) {
            cert.semicontinuity_ok = false;
            std::ostringstream os;
            os << "semicontinuity fails in chart " << cid << " at (";
            for (size_t i = 0; i < a.size(); ++i)
              os << (i ? "," : "") << rational_str(a[i]);
            os << "): " << s.word << " vs " << s.image_word;
            note(os.str());
          }
          cert.semicontinuity.push_back(std::move(s));
        }
      }
    }
  }

  bool leaves_ok = true;
  for (const auto& c : cert.charts)
    if (ideal_mode ? !(c.weak_unit && c.nc)
                   : !((c.transform_unit || (c.smooth && c.snc && c.s1_zero)) &&
                       c.nc && c.transform_identity))
      leaves_ok = false;
  cert.passed = leaves_ok && cert.words_strictly_decreasing &&
                cert.semicontinuity_ok && cert.e_bounds_ok &&
                cert.failures.empty() && !cert.budget_exceeded;
  return cert;
}

}  // namespace desing
