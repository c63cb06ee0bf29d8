#include "galois.hpp"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

#include "linalg.hpp"

namespace gpd {

namespace {

RingElem coord_lhs(const ActionSystem& sys, const GaloisCoords& c, int g) {
  const SplitRing& r = sys.ring();
  RingElem acc = r.zero();
  for (size_t i = 0; i < c.a.size(); ++i)
    acc = r.add(acc, r.mul(c.a[i], sys.apply(g, c.b[i])));
  return acc;
}

// Defining equations over the given objects and morphisms only; the
// morphism sums are shared across objects.
CoordsCheck verify_on(const ActionSystem& sys, const GaloisCoords& c,
                      const std::vector<int>& objects, const MorphSet& morphs) {
  const SplitRing& r = sys.ring();
  std::vector<RingElem> lhs;
  lhs.reserve(morphs.size());
  for (int g : morphs) lhs.push_back(coord_lhs(sys, c, g));
  for (int z : objects) {
    RingElem oz = r.idempotent_sum(sys.indices_of_object(z));
    for (size_t gi = 0; gi < morphs.size(); ++gi) {
      int g = morphs[gi];
      RingElem want =
          g == sys.groupoid().identity(z) ? oz : r.zero();
      if (r.mul(lhs[gi], oz) != want) return {false, z, g};
    }
  }
  return {true, -1, -1};
}

MorphSet all_morphs(const Groupoid& g) {
  MorphSet all(g.size());
  for (int i = 0; i < g.size(); ++i) all[i] = i;
  return all;
}

std::string morph_names(const Groupoid& g, const MorphSet& h) {
  std::string out = "{";
  for (size_t i = 0; i < h.size(); ++i) {
    if (i) out += ", ";
    out += g.morph_name(h[i]);
  }
  return out + "}";
}

// Nonzero 0/1 idempotents supported in the image of g or of h, in sorted
// support order.
std::vector<std::vector<int>> e_supports(const ActionSystem& sys, int g,
                                         int h) {
  std::set<std::vector<int>> supp;
  for (int side = 0; side < 2; ++side) {
    const auto& img = sys.img_indices(side ? h : g);
    for (unsigned mask = 1; mask < (1u << img.size()); ++mask) {
      std::vector<int> s;
      for (size_t i = 0; i < img.size(); ++i)
        if (mask & (1u << i)) s.push_back(img[i]);
      supp.insert(s);
    }
  }
  return {supp.begin(), supp.end()};
}

// Some basis element of the subring slice has to tell g and h apart on e;
// linearity extends the separation from the spanning set.
bool separated(const ActionSystem& sys, const std::vector<RingElem>& basis,
               int g, int h, const std::vector<int>& supp) {
  const SplitRing& r = sys.ring();
  RingElem e = r.idempotent_sum(supp);
  for (const auto& tb : basis)
    if (r.mul(sys.apply(g, tb), e) != r.mul(sys.apply(h, tb), e)) return true;
  return false;
}

// First unseparated (g, h, e) among the given same-endpoint morphisms, with
// pairs in list order and g^-1 h membership in `skip` exempting a pair.
std::optional<SeparationFailure> scan_pairs(const ActionSystem& sys,
                                            const std::vector<int>& in_z,
                                            const MorphSet& skip,
                                            const std::vector<RingElem>& basis) {
  const Groupoid& g = sys.groupoid();
  for (size_t i = 0; i < in_z.size(); ++i)
    for (size_t j = i + 1; j < in_z.size(); ++j) {
      int u = g.compose(g.inverse(in_z[i]), in_z[j]);
      if (std::binary_search(skip.begin(), skip.end(), u)) continue;
      for (const auto& supp : e_supports(sys, in_z[i], in_z[j]))
        if (!separated(sys, basis, in_z[i], in_z[j], supp))
          return SeparationFailure{in_z[i], in_z[j], supp};
    }
  return std::nullopt;
}

}  // namespace

CoordsCheck verify_coords(const ActionSystem& sys, const GaloisCoords& c) {
  std::vector<int> objects(sys.groupoid().num_objects());
  for (size_t i = 0; i < objects.size(); ++i) objects[i] = (int)i;
  return verify_on(sys, c, objects, all_morphs(sys.groupoid()));
}

std::optional<GaloisCoords> find_coords(const ActionSystem& sys) {
  const SplitRing& r = sys.ring();
  GaloisCoords c;
  for (int i = 0; i < r.dim(); ++i) {
    c.a.push_back(r.idempotent(i));
    c.b.push_back(r.idempotent(i));
  }
  if (verify_coords(sys, c).ok) return c;

  // Keep a at the idempotents and solve the defining equations for b.
  // With that a-choice the sum at morphism m pins component i of the
  // equation to phi_{m,j}((b_i)_j) for j = sigma_m^-1(i), so the system is
  // linear over the prime field in the coordinates of the b_i.
  const CoeffField& k = r.field();
  PrimeCtx ctx{k.characteristic()};
  int d = k.prime_degree(), n = r.dim();
  auto var = [&](int i, int j, int cc) { return (i * n + j) * d + cc; };
  Mat rows;
  Vec rhs;
  const Groupoid& g = sys.groupoid();
  for (int m = 0; m < g.size(); ++m) {
    const ArrowMap& am = sys.arrow_map(m);
    for (size_t pos = 0; pos < am.dom.size(); ++pos) {
      int j = am.dom[pos], i = am.img[pos], a = am.aut[pos];
      for (int rr = 0; rr < d; ++rr) {
        Vec row(n * n * d, Rat(0));
        for (int cc = 0; cc < d; ++cc)
          row[var(i, j, cc)] = k.apply_aut(a, k.basis_elem(cc)).c[rr];
        rows.push_back(std::move(row));
        rhs.push_back(g.is_identity(m) ? k.one().c[rr] : Rat(0));
      }
    }
  }
  auto sol = solve(rows, rhs, ctx);
  if (!sol.has_value()) return std::nullopt;
  for (int i = 0; i < n; ++i) {
    RingElem bi(n, k.zero());
    for (int j = 0; j < n; ++j) {
      FieldElem fe = k.zero();
      for (int cc = 0; cc < d; ++cc) fe.c[cc] = (*sol)[var(i, j, cc)];
      bi[j] = fe;
    }
    c.b[i] = bi;
  }
  if (!verify_coords(sys, c).ok) return std::nullopt;
  return c;
}

std::optional<std::vector<GaloisCoords>> split_coords(const ActionSystem& sys,
                                                      const GaloisCoords& c,
                                                      std::string* err) {
  const SplitRing& r = sys.ring();
  const Groupoid& g = sys.groupoid();
  auto comps = g.components();
  std::vector<GaloisCoords> out;
  for (size_t j = 0; j < comps.size(); ++j) {
    std::vector<int> idx;
    for (int y : comps[j])
      for (int i : sys.indices_of_object(y)) idx.push_back(i);
    std::sort(idx.begin(), idx.end());
    RingElem mask = r.idempotent_sum(idx);
    GaloisCoords cj;
    for (size_t i = 0; i < c.a.size(); ++i) {
      cj.a.push_back(r.mul(c.a[i], mask));
      cj.b.push_back(r.mul(c.b[i], mask));
    }
    MorphSet morphs;
    for (int m = 0; m < g.size(); ++m)
      if (std::binary_search(comps[j].begin(), comps[j].end(), g.src(m)))
        morphs.push_back(m);
    auto chk = verify_on(sys, cj, comps[j], morphs);
    if (!chk.ok) {
      if (err)
        *err = "split: component " + std::to_string(j) + " coordinates fail at (" +
               g.object_name(chk.fail_object) + ", " +
               g.morph_name(chk.fail_morph) + ")";
      return std::nullopt;
    }
    out.push_back(std::move(cj));
  }
  return out;
}

std::optional<GaloisCoords> glue_coords(const ActionSystem& sys,
                                        const std::vector<GaloisCoords>& parts,
                                        std::string* err) {
  const SplitRing& r = sys.ring();
  auto comps = sys.groupoid().components();
  if (parts.size() != comps.size()) {
    if (err) *err = "glue: expected one coordinate system per component";
    return std::nullopt;
  }
  size_t m = 0;
  for (const auto& p : parts) m = std::max(m, p.a.size());
  GaloisCoords out;
  out.a.assign(m, r.zero());
  out.b.assign(m, r.zero());
  for (const auto& p : parts)
    for (size_t i = 0; i < p.a.size(); ++i) {
      out.a[i] = r.add(out.a[i], p.a[i]);
      out.b[i] = r.add(out.b[i], p.b[i]);
    }
  auto chk = verify_coords(sys, out);
  if (!chk.ok) {
    if (err)
      *err = "glue: combined coordinates fail at (" +
             sys.groupoid().object_name(chk.fail_object) + ", " +
             sys.groupoid().morph_name(chk.fail_morph) + ")";
    return std::nullopt;
  }
  return out;
}

GaloisCoords object_coords(const ActionSystem& sys, const GaloisCoords& c,
                           int obj) {
  const SplitRing& r = sys.ring();
  RingElem mask = r.idempotent_sum(sys.indices_of_object(obj));
  GaloisCoords out;
  for (size_t i = 0; i < c.a.size(); ++i) {
    out.a.push_back(r.mul(c.a[i], mask));
    out.b.push_back(r.mul(c.b[i], mask));
  }
  return out;
}

CoordsCheck verify_isotropy_coords(const ActionSystem& sys,
                                   const GaloisCoords& c, int obj) {
  return verify_on(sys, c, {obj}, sys.groupoid().isotropy(obj));
}

StrongResult alpha_strong_check(const ActionSystem& sys,
                                const BlockSubring& t) {
  const Groupoid& g = sys.groupoid();
  const SplitRing& r = sys.ring();
  StrongResult out;

  std::vector<std::vector<RingElem>> basis_at(g.num_objects());
  std::vector<MorphSet> fix_at(g.num_objects());
  for (int y = 0; y < g.num_objects(); ++y) {
    basis_at[y] = r.prime_basis(r.restrict(t, sys.indices_of_object(y)));
    fix_at[y] = isotropy_fixer(sys, t, y);
  }

  // Hom-set-local route: pairs share source and target, skipping by the
  // isotropy fixer of the source slice.
  out.local_ok = true;
  for (int y = 0; y < g.num_objects() && out.local_ok; ++y)
    for (int z = 0; z < g.num_objects() && out.local_ok; ++z) {
      auto fail = scan_pairs(sys, g.hom(y, z), fix_at[y], basis_at[y]);
      if (fail.has_value()) {
        out.local_ok = false;
        out.local_fail = *fail;
      }
    }

  // Same-target route over the global fixer set.
  FixerSet fx = fixer_of(sys, t);
  auto basis = r.prime_basis(t);
  out.strong = true;
  for (int z = 0; z < g.num_objects() && out.strong; ++z) {
    std::vector<int> in_z;
    for (int m = 0; m < g.size(); ++m)
      if (g.tgt(m) == z) in_z.push_back(m);
    auto fail = scan_pairs(sys, in_z, fx.morphisms, basis);
    if (fail.has_value()) {
      out.strong = false;
      out.pair_fail = *fail;
    }
  }

  // Base-object route, available when the fixer is a wide group-type
  // subgroupoid: the full isotropy groups at the witness bases decide.
  if (fx.is_subgroupoid && g.is_wide(fx.morphisms)) {
    auto gt = sys.group_type(fx.morphisms);
    if (gt.ok) {
      bool ok = true;
      for (int y = 0; y < g.num_objects() && ok; ++y) {
        if (gt.tau_by_obj[y] != g.identity(y)) continue;
        if (scan_pairs(sys, g.isotropy(y), fix_at[y], basis_at[y]).has_value())
          ok = false;
      }
      out.per_base_ok = ok;
    }
  }

  out.agree = out.local_ok == out.strong &&
              (!out.per_base_ok.has_value() || *out.per_base_ok == out.strong);
  return out;
}

ClassBResult class_B(const ActionSystem& sys) {
  ClassBResult out;
  if (!find_coords(sys).has_value()) {
    out.err =
        "correspondence hypothesis unmet: no coordinate system found for the "
        "full extension";
    return out;
  }
  const Groupoid& g = sys.groupoid();
  const SplitRing& r = sys.ring();
  BlockSubring base = invariants_of(sys, all_morphs(g));
  for (const auto& t : r.enumerate_block_subrings()) {
    if (!r.subring_contains(t, base)) continue;
    if (!r.separability_check(t, base).separable) continue;
    FixerSet fx = fixer_of(sys, t);
    if (!fx.is_subgroupoid || !g.is_wide(fx.morphisms)) continue;
    if (!sys.group_type(fx.morphisms).ok) continue;
    if (!alpha_strong_check(sys, t).strong) continue;
    out.rings.push_back(t);
  }
  out.ok = true;
  return out;
}

CorrespondenceTable correspondence(const ActionSystem& sys) {
  CorrespondenceTable out;
  const Groupoid& g = sys.groupoid();
  const SplitRing& r = sys.ring();
  if (!find_coords(sys).has_value()) {
    out.err =
        "correspondence hypothesis unmet: no coordinate system found for the "
        "full extension";
    return out;
  }
  auto gt_full = sys.group_type(all_morphs(g));
  if (!gt_full.ok) {
    out.err = "the action is not group-type: no transversal into object " +
              g.object_name(gt_full.failing_object);
    return out;
  }

  auto cb = class_B(sys);
  assert(cb.ok);
  for (const auto& h : g.enumerate_subgroupoids(true)) {
    if (!sys.group_type(h).ok) continue;
    BlockSubring t = invariants_of(sys, h);
    FixerSet fx = fixer_of(sys, t);
    if (fx.morphisms != h) {
      out.err = "round trip failed: fixer of the invariants of " +
                morph_names(g, h) + " is " + morph_names(g, fx.morphisms);
      return out;
    }
    bool listed = false;
    for (const auto& ct : cb.rings)
      if (r.subring_equal(ct, t)) listed = true;
    if (!listed) {
      out.err = "invariants of " + morph_names(g, h) +
                " missing from the filtered subring class";
      return out;
    }
    out.rows.push_back({h, t});
  }
  for (const auto& ct : cb.rings) {
    int cnt = 0;
    for (const auto& row : out.rows)
      if (r.subring_equal(row.ring, ct)) ++cnt;
    if (cnt != 1) {
      out.err = "subring " + r.subring_to_string(ct) + " covered " +
                std::to_string(cnt) + " times by the subgroupoid map";
      out.rows.clear();
      return out;
    }
  }

  // Disconnected inputs: recompute per component, glue the product table,
  // and require it to match the direct rows.
  auto comps = g.components();
  if (comps.size() > 1) {
    std::vector<std::vector<CorrespondenceRow>> comp_rows;
    std::vector<std::vector<int>> inv_morph, inv_index;
    for (size_t j = 0; j < comps.size(); ++j) {
      auto rest = sys.restrict_to_objects(comps[j]);
      auto sub = correspondence(rest.sys);
      if (!sub.ok) {
        out.err = "component " + std::to_string(j) + ": " + sub.err;
        out.rows.clear();
        return out;
      }
      comp_rows.push_back(sub.rows);
      std::vector<int> im(rest.sys.groupoid().size(), -1);
      for (int m = 0; m < g.size(); ++m)
        if (rest.morph_map[m] != -1) im[rest.morph_map[m]] = m;
      inv_morph.push_back(std::move(im));
      std::vector<int> ii(rest.sys.ring().dim(), -1);
      for (int i = 0; i < r.dim(); ++i)
        if (rest.index_map[i] != -1) ii[rest.index_map[i]] = i;
      inv_index.push_back(std::move(ii));
    }
    std::vector<CorrespondenceRow> glued;
    std::vector<size_t> pick(comps.size(), 0);
    while (true) {
      CorrespondenceRow row;
      for (size_t j = 0; j < comps.size(); ++j) {
        const auto& cr = comp_rows[j][pick[j]];
        for (int m : cr.subgroupoid) row.subgroupoid.push_back(inv_morph[j][m]);
        for (const auto& blk : cr.ring.blocks) {
          SubringBlock nb = blk;
          for (auto& i : nb.indices) i = inv_index[j][i];
          row.ring.blocks.push_back(std::move(nb));
        }
      }
      std::sort(row.subgroupoid.begin(), row.subgroupoid.end());
      std::sort(row.ring.blocks.begin(), row.ring.blocks.end(),
                [](const SubringBlock& a, const SubringBlock& b) {
                  return a.indices[0] < b.indices[0];
                });
      glued.push_back(std::move(row));
      size_t j = 0;
      while (j < pick.size() && ++pick[j] == comp_rows[j].size())
        pick[j++] = 0;
      if (j == pick.size()) break;
    }
    bool match = glued.size() == out.rows.size();
    std::vector<char> used(out.rows.size(), 0);
    for (const auto& gr : glued) {
      bool found = false;
      for (size_t i = 0; i < out.rows.size() && !found; ++i) {
        if (used[i]) continue;
        if (out.rows[i].subgroupoid == gr.subgroupoid &&
            r.subring_equal(out.rows[i].ring, gr.ring)) {
          used[i] = 1;
          found = true;
        }
      }
      if (!found) match = false;
    }
    if (!match) {
      out.err = "component gluing does not reproduce the direct table";
      out.rows.clear();
      return out;
    }
  }

  out.ok = true;
  return out;
}

}  // namespace gpd
