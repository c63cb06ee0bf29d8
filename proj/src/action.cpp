#include "action.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <set>

namespace gpd {

namespace {

bool sorted_unique(const std::vector<int>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i - 1] >= v[i]) return false;
  return true;
}

}  // namespace

std::optional<ActionSystem> ActionSystem::make(
    Groupoid g, SplitRing ring, std::vector<std::vector<int>> obj_idx,
    std::vector<ArrowMap> maps, std::string* err) {
  auto fail = [&](const std::string& m) -> std::optional<ActionSystem> {
    if (err) *err = m;
    return std::nullopt;
  };
  int n = ring.dim();
  int k = g.num_objects();
  int mm = g.size();
  if ((int)obj_idx.size() != k)
    return fail("object index lists do not match the object count");
  std::vector<int> owner(n, -1);
  for (int x = 0; x < k; ++x) {
    if (!sorted_unique(obj_idx[x]))
      return fail("indices of object " + g.object_name(x) +
                  " must be sorted and distinct");
    for (int i : obj_idx[x]) {
      if (i < 0 || i >= n) return fail("idempotent index out of range");
      if (owner[i] != -1)
        return fail("index e" + std::to_string(i + 1) +
                    " assigned to two objects");
      owner[i] = x;
    }
  }
  for (int i = 0; i < n; ++i)
    if (owner[i] == -1)
      return fail("index e" + std::to_string(i + 1) +
                  " is not assigned to an object");
  if ((int)maps.size() != mm)
    return fail("arrow map list does not match the morphism count");

  for (int m = 0; m < mm; ++m) {
    auto& am = maps[m];
    if (am.dom.size() != am.img.size() || am.dom.size() != am.aut.size())
      return fail("arrow map of '" + g.morph_name(m) + "' is ragged");
    // Normalize to sorted domain.
    std::vector<int> order(am.dom.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return am.dom[a] < am.dom[b]; });
    ArrowMap s;
    for (int j : order) {
      s.dom.push_back(am.dom[j]);
      s.img.push_back(am.img[j]);
      s.aut.push_back(am.aut[j]);
    }
    am = std::move(s);
    if (!sorted_unique(am.dom))
      return fail("arrow map of '" + g.morph_name(m) +
                  "' lists an index twice");
    std::set<int> imgs;
    for (size_t j = 0; j < am.dom.size(); ++j) {
      int i = am.dom[j], o = am.img[j], a = am.aut[j];
      if (i < 0 || i >= n || o < 0 || o >= n)
        return fail("arrow map of '" + g.morph_name(m) +
                    "' has an index out of range");
      if (owner[i] != g.src(m))
        return fail("domain of alpha_'" + g.morph_name(m) +
                    "' must lie over its source object");
      if (owner[o] != g.tgt(m))
        return fail("image of alpha_'" + g.morph_name(m) +
                    "' must lie over its target object");
      if (a < 0 || a >= ring.field().aut_count())
        return fail("automorphism label out of range on alpha_'" +
                    g.morph_name(m) + "'");
      if (!imgs.insert(o).second)
        return fail("alpha_'" + g.morph_name(m) + "' is not bijective");
    }
  }
  for (int x = 0; x < k; ++x) {
    const auto& am = maps[x];
    bool ok = am.dom == obj_idx[x] && am.img == am.dom;
    if (ok)
      for (int a : am.aut) ok = ok && a == 0;
    if (!ok)
      return fail("identity arrow of " + g.object_name(x) +
                  " must act as the identity on its summand");
  }
  auto find_pos = [&](const ArrowMap& am, int i) -> int {
    auto it = std::lower_bound(am.dom.begin(), am.dom.end(), i);
    if (it == am.dom.end() || *it != i) return -1;
    return (int)(it - am.dom.begin());
  };
  for (int m = 0; m < mm; ++m) {
    const auto& am = maps[m];
    const auto& bm = maps[g.inverse(m)];
    std::vector<int> img_sorted = am.img;
    std::sort(img_sorted.begin(), img_sorted.end());
    if (img_sorted != bm.dom)
      return fail("alpha_'" + g.morph_name(g.inverse(m)) +
                  "' is not inverse to alpha_'" + g.morph_name(m) + "'");
    for (size_t j = 0; j < am.dom.size(); ++j) {
      int p = find_pos(bm, am.img[j]);
      if (bm.img[p] != am.dom[j] ||
          bm.aut[p] != ring.field().aut_inverse(am.aut[j]))
        return fail("alpha_'" + g.morph_name(g.inverse(m)) +
                    "' is not inverse to alpha_'" + g.morph_name(m) + "'");
    }
  }
  for (int a = 0; a < mm; ++a)
    for (int b = 0; b < mm; ++b) {
      if (!g.composable(a, b)) continue;
      int c = g.compose(a, b);
      const auto& fa = maps[a];
      const auto& fb = maps[b];
      const auto& fc = maps[c];
      for (size_t j = 0; j < fb.dom.size(); ++j) {
        int i = fb.dom[j], mid = fb.img[j];
        int pa = find_pos(fa, mid);
        if (pa == -1) continue;
        int pc = find_pos(fc, i);
        if (pc == -1)
          return fail("domain of alpha_'" + g.morph_name(c) +
                      "' misses e" + std::to_string(i + 1) +
                      " required by alpha_'" + g.morph_name(a) +
                      "' . alpha_'" + g.morph_name(b) + "'");
        int want_aut = ring.field().aut_compose(fa.aut[pa], fb.aut[j]);
        if (fc.img[pc] != fa.img[pa] || fc.aut[pc] != want_aut)
          return fail("composition rule fails at alpha_'" + g.morph_name(a) +
                      "' . alpha_'" + g.morph_name(b) + "' on e" +
                      std::to_string(i + 1));
      }
    }

  ActionSystem sys(std::move(g), std::move(ring));
  sys.obj_idx_ = std::move(obj_idx);
  sys.obj_of_idx_ = std::move(owner);
  sys.maps_ = std::move(maps);
  sys.img_sorted_.resize(mm);
  for (int m = 0; m < mm; ++m) {
    sys.img_sorted_[m] = sys.maps_[m].img;
    std::sort(sys.img_sorted_[m].begin(), sys.img_sorted_[m].end());
  }
  return sys;
}

int ActionSystem::sigma(int m, int i) const {
  const auto& am = maps_[m];
  auto it = std::lower_bound(am.dom.begin(), am.dom.end(), i);
  assert(it != am.dom.end() && *it == i);
  return am.img[it - am.dom.begin()];
}

int ActionSystem::phi(int m, int i) const {
  const auto& am = maps_[m];
  auto it = std::lower_bound(am.dom.begin(), am.dom.end(), i);
  assert(it != am.dom.end() && *it == i);
  return am.aut[it - am.dom.begin()];
}

RingElem ActionSystem::apply(int m, const RingElem& a) const {
  RingElem out = ring_.zero();
  const auto& am = maps_[m];
  for (size_t j = 0; j < am.dom.size(); ++j)
    out[am.img[j]] = field().apply_aut(am.aut[j], a[am.dom[j]]);
  return out;
}

bool ActionSystem::is_global() const {
  for (int m = 0; m < g_.size(); ++m)
    if (img_sorted_[m] != obj_idx_[g_.tgt(m)]) return false;
  return true;
}

ActionSystem::GroupType ActionSystem::group_type(
    const MorphSet& subgroupoid) const {
  GroupType out;
  out.tau_by_obj.assign(g_.num_objects(), -1);
  std::vector<int> objs;
  for (int m : subgroupoid)
    if (g_.is_identity(m)) objs.push_back(m);
  // Component structure inside the subgroupoid.
  std::vector<int> parent(g_.num_objects());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int m : subgroupoid) {
    int a = find(g_.src(m)), b = find(g_.tgt(m));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  for (int y : objs) {
    int base = find(y);
    int chosen = -1;
    for (int m : subgroupoid) {
      if (g_.src(m) != base || g_.tgt(m) != y) continue;
      if (maps_[m].dom == obj_idx_[base] && img_sorted_[m] == obj_idx_[y]) {
        chosen = m;
        break;
      }
    }
    if (chosen == -1) {
      out.ok = false;
      out.failing_object = y;
      return out;
    }
    out.tau_by_obj[y] = chosen;
  }
  out.ok = true;
  return out;
}

RestrictedActionSystem ActionSystem::restrict_to_objects(
    const std::vector<int>& objs) const {
  RestrictedGroupoid rg = g_.restrict_to_objects(objs);
  std::string err;
  auto ng = Groupoid::make(
      {rg.object_names, rg.morph_names, rg.src, rg.tgt, rg.table}, &err);
  assert(ng.has_value());

  std::vector<int> index_map(ring_.dim(), -1);
  std::vector<std::vector<int>> new_idx;
  int counter = 0;
  for (int x = 0; x < g_.num_objects(); ++x) {
    if (rg.object_map[x] == -1) continue;
    std::vector<int> lst;
    for (int i : obj_idx_[x]) {
      index_map[i] = counter++;
      lst.push_back(index_map[i]);
    }
    new_idx.push_back(std::move(lst));
  }
  std::vector<ArrowMap> new_maps;
  for (int m = 0; m < g_.size(); ++m) {
    if (rg.morph_map[m] == -1) continue;
    ArrowMap am;
    for (size_t j = 0; j < maps_[m].dom.size(); ++j) {
      am.dom.push_back(index_map[maps_[m].dom[j]]);
      am.img.push_back(index_map[maps_[m].img[j]]);
      am.aut.push_back(maps_[m].aut[j]);
    }
    new_maps.push_back(std::move(am));
  }
  auto sys = ActionSystem::make(std::move(*ng), SplitRing(field(), counter),
                                std::move(new_idx), std::move(new_maps), &err);
  assert(sys.has_value());
  return {std::move(*sys), rg.object_map, rg.morph_map, index_map};
}

}  // namespace gpd
