#include "invariants.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

namespace gpd {

namespace {

RingElem masked(const SplitRing& r, const RingElem& a,
                const std::vector<int>& idx) {
  RingElem out = r.zero();
  for (int i : idx) out[i] = a[i];
  return out;
}

bool in_set(const MorphSet& s, int m) {
  return std::binary_search(s.begin(), s.end(), m);
}

// Union-find over idempotent indices carrying an automorphism weight:
// value_i = weight[i] applied to the value at the root.  Constraint cycles
// deposit automorphisms the root's value must be fixed by.
struct WeightedUf {
  const CoeffField* k;
  std::vector<int> parent, weight;
  std::vector<std::vector<int>> pending;

  WeightedUf(const CoeffField* kk, int n)
      : k(kk), parent(n), weight(n, 0), pending(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  int find(int i) {
    if (parent[i] == i) return i;
    int p = parent[i];
    int r = find(p);
    weight[i] = k->aut_compose(weight[i], weight[p]);
    parent[i] = r;
    return r;
  }

  // Imposes value_j = phi(value_i).
  void relate(int i, int j, int phi) {
    int ri = find(i), rj = find(j);
    int a = k->aut_compose(phi, weight[i]);
    if (ri == rj) {
      int gamma = k->aut_compose(k->aut_inverse(weight[j]), a);
      if (gamma != 0) pending[ri].push_back(gamma);
      return;
    }
    parent[rj] = ri;
    weight[rj] = k->aut_compose(k->aut_inverse(weight[j]), a);
    int w = weight[rj], winv = k->aut_inverse(w);
    for (int gmm : pending[rj])
      pending[ri].push_back(k->aut_compose(winv, k->aut_compose(gmm, w)));
    pending[rj].clear();
  }
};

// Joint solution of v_{sigma_h(i)} = phi_{h,i}(v_i) over h in morphs,
// reported on the given (sorted) index subset, which the constraints must
// not leave.
std::vector<SubringBlock> solve_blocks(const ActionSystem& sys,
                                       const MorphSet& morphs,
                                       const std::vector<int>& indices) {
  WeightedUf uf(&sys.field(), sys.ring().dim());
  for (int h : morphs)
    for (int i : sys.dom_indices(h))
      uf.relate(i, sys.sigma(h, i), sys.phi(h, i));
  std::vector<std::vector<int>> members(sys.ring().dim());
  for (int i : indices) members[uf.find(i)].push_back(i);
  std::vector<SubringBlock> out;
  for (size_t r = 0; r < members.size(); ++r) {
    if (members[r].empty()) continue;
    SubringBlock b;
    b.indices = members[r];
    b.subfield = sys.field().fixed_subfield(uf.pending[r]);
    for (int i : b.indices) b.transport.push_back(uf.weight[i]);
    out.push_back(std::move(b));
  }
  return out;
}

// Connected components of the objects H covers, each sorted, ordered by
// least object.
std::vector<std::vector<int>> h_components(const Groupoid& g,
                                           const MorphSet& H) {
  int n = g.num_objects();
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int y) {
    while (parent[y] != y) y = parent[y] = parent[parent[y]];
    return y;
  };
  for (int m : H) {
    int a = find(g.src(m)), b = find(g.tgt(m));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<int>> by_root(n), out;
  for (int y = 0; y < n; ++y)
    if (in_set(H, g.identity(y))) by_root[find(y)].push_back(y);
  for (int y = 0; y < n; ++y)
    if (!by_root[y].empty() && by_root[y].front() == y)
      out.push_back(std::move(by_root[y]));
  return out;
}

bool fixes(const ActionSystem& sys, int m,
           const std::vector<RingElem>& basis) {
  for (const auto& b : basis)
    if (sys.apply(m, b) != masked(sys.ring(), b, sys.img_indices(m)))
      return false;
  return true;
}

}  // namespace

BlockSubring invariants_of(const ActionSystem& sys, const MorphSet& H) {
  std::vector<int> all(sys.ring().dim());
  std::iota(all.begin(), all.end(), 0);
  return sys.ring().canonicalize(BlockSubring{solve_blocks(sys, H, all)});
}

bool is_invariant(const ActionSystem& sys, const MorphSet& H,
                  const RingElem& v) {
  for (int h : H)
    if (sys.apply(h, v) != masked(sys.ring(), v, sys.img_indices(h)))
      return false;
  return true;
}

std::optional<BlockSubring> invariants_via_phi(
    const ActionSystem& sys, const MorphSet& H, std::string* err,
    std::vector<IsotropyPiece>* pieces) {
  const Groupoid& g = sys.groupoid();
  auto gt = sys.group_type(H);
  if (!gt.ok) {
    if (err)
      *err = "group-type witness required: no full transversal into object " +
             g.object_name(gt.failing_object);
    return std::nullopt;
  }
  BlockSubring out;
  std::vector<char> covered(g.num_objects(), 0);
  std::vector<IsotropyPiece> ps;
  for (auto& comp : h_components(g, H)) {
    IsotropyPiece p;
    p.base = comp.front();
    p.objects = comp;
    for (int y : comp) {
      covered[y] = 1;
      p.tau.push_back(gt.tau_by_obj[y]);
    }
    MorphSet iso;
    for (int h : H)
      if (g.src(h) == p.base && g.tgt(h) == p.base) iso.push_back(h);
    auto base_blocks = solve_blocks(sys, iso, sys.indices_of_object(p.base));
    p.base_ring = sys.ring().canonicalize(BlockSubring{base_blocks});
    for (const auto& b : base_blocks) {
      SubringBlock nb;
      nb.subfield = b.subfield;
      for (int m : p.tau)
        for (size_t j = 0; j < b.indices.size(); ++j) {
          nb.indices.push_back(sys.sigma(m, b.indices[j]));
          nb.transport.push_back(sys.field().aut_compose(
              sys.phi(m, b.indices[j]), b.transport[j]));
        }
      out.blocks.push_back(std::move(nb));
    }
    if (pieces) ps.push_back(std::move(p));
  }
  for (int y = 0; y < g.num_objects(); ++y) {
    if (covered[y]) continue;
    for (int i : sys.indices_of_object(y))
      out.blocks.push_back({{i}, sys.field().full_subfield(), {0}});
  }
  if (pieces) *pieces = std::move(ps);
  return sys.ring().canonicalize(std::move(out));
}

bool invariant_by_tau(const ActionSystem& sys, const std::vector<int>& tau,
                      const RingElem& v) {
  const Groupoid& g = sys.groupoid();
  int n = g.num_objects();
  assert((int)tau.size() == n && !tau.empty());
  int base = g.src(tau[0]);
  for (int y = 0; y < n; ++y) {
    assert(tau[y] >= 0 && g.tgt(tau[y]) == y && g.src(tau[y]) == base);
    assert(sys.dom_indices(tau[y]).size() ==
           sys.indices_of_object(base).size());
    assert(sys.img_indices(tau[y]).size() ==
           sys.indices_of_object(y).size());
  }
  assert(tau[base] == g.identity(base));
  std::vector<RingElem> c;
  for (int y = 0; y < n; ++y)
    c.push_back(sys.apply(g.inverse(tau[y]),
                          masked(sys.ring(), v, sys.indices_of_object(y))));
  for (int m = 0; m < g.size(); ++m) {
    int u = g.tau_conj(tau, m);
    if (sys.apply(u, c[g.src(m)]) !=
        masked(sys.ring(), c[g.tgt(m)], sys.img_indices(u)))
      return false;
  }
  return true;
}

FixerSet fixer_of(const ActionSystem& sys, const BlockSubring& t) {
  FixerSet out;
  auto basis = sys.ring().prime_basis(t);
  for (int m = 0; m < sys.groupoid().size(); ++m)
    if (fixes(sys, m, basis)) out.morphisms.push_back(m);
  out.is_subgroupoid = sys.groupoid().is_subgroupoid(out.morphisms);
  return out;
}

MorphSet isotropy_fixer(const ActionSystem& sys, const BlockSubring& t,
                        int obj) {
  MorphSet out;
  auto basis = sys.ring().prime_basis(
      sys.ring().restrict(t, sys.indices_of_object(obj)));
  for (int m : sys.groupoid().isotropy(obj))
    if (fixes(sys, m, basis)) out.push_back(m);
  return out;
}

FixerAgreement fixer_characterization(const ActionSystem& sys,
                                      const MorphSet& H) {
  FixerAgreement r;
  const Groupoid& g = sys.groupoid();
  if (!g.is_wide(H)) {
    r.err = "wide subgroupoid required";
    return r;
  }
  auto gt = sys.group_type(H);
  if (!gt.ok) {
    r.err = "group-type witness required";
    return r;
  }
  BlockSubring t = invariants_of(sys, H);
  FixerSet direct = fixer_of(sys, t);
  auto comps = h_components(g, H);
  std::vector<int> comp_of(g.num_objects(), -1);
  std::vector<MorphSet> base_fix;
  for (size_t c = 0; c < comps.size(); ++c) {
    for (int y : comps[c]) comp_of[y] = (int)c;
    base_fix.push_back(isotropy_fixer(sys, t, comps[c].front()));
  }
  r.direct.assign(g.size(), 0);
  for (int m : direct.morphisms) r.direct[m] = 1;
  r.by_components.assign(g.size(), 0);
  for (int m = 0; m < g.size(); ++m) {
    int cs = comp_of[g.src(m)];
    if (cs < 0 || cs != comp_of[g.tgt(m)]) continue;
    int u = g.tau_conj(gt.tau_by_obj, m);
    r.by_components[m] = in_set(base_fix[cs], u) ? 1 : 0;
  }
  r.ok = r.direct == r.by_components;
  return r;
}

std::optional<GlobalInvariantsDecomp> global_invariants_decomposition(
    const ActionSystem& sys, const MorphSet& H, std::string* err) {
  if (!sys.is_global()) {
    if (err) *err = "global action required";
    return std::nullopt;
  }
  GlobalInvariantsDecomp d;
  std::string perr;
  auto glued = invariants_via_phi(sys, H, &perr, &d.pieces);
  if (!glued) {
    if (err) *err = perr;  // unreachable for a global action
    return std::nullopt;
  }
  d.glued = std::move(*glued);
  d.matches_direct = sys.ring().subring_equal(d.glued, invariants_of(sys, H));
  return d;
}

std::optional<GlobalFixerDecomp> global_fixer_decomposition(
    const ActionSystem& sys, const BlockSubring& t, std::string* err) {
  if (!sys.is_global()) {
    if (err) *err = "global action required";
    return std::nullopt;
  }
  const Groupoid& g = sys.groupoid();
  FixerSet direct = fixer_of(sys, t);
  GlobalFixerDecomp d;
  for (auto& comp : h_components(g, direct.morphisms)) {
    FixerPiece p;
    p.base = comp.front();
    p.objects = comp;
    p.base_group = isotropy_fixer(sys, t, p.base);
    for (int y : p.objects) {
      int arrow = -1;
      for (int m : direct.morphisms)
        if (g.src(m) == p.base && g.tgt(m) == y) {
          arrow = m;
          break;
        }
      p.tau.push_back(arrow);
      if (arrow < 0) d.applicable = false;
    }
    for (int ty : p.tau)
      for (int tz : p.tau) {
        if (ty < 0 || tz < 0) continue;
        for (int u : p.base_group)
          d.reconstructed.push_back(
              g.compose(ty, g.compose(u, g.inverse(tz))));
      }
    d.pieces.push_back(std::move(p));
  }
  std::sort(d.reconstructed.begin(), d.reconstructed.end());
  d.reconstructed.erase(
      std::unique(d.reconstructed.begin(), d.reconstructed.end()),
      d.reconstructed.end());
  d.matches_direct = d.applicable && d.reconstructed == direct.morphisms;
  return d;
}

}  // namespace gpd
