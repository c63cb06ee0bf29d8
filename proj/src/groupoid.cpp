#include "groupoid.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <queue>
#include <set>

namespace gpd {

namespace {

std::string mname(const GroupoidData& d, int g) {
  return "'" + d.morph_names[g] + "'";
}

}  // namespace

bool validate_groupoid(const GroupoidData& d, std::string* err) {
  auto fail = [&](const std::string& m) {
    if (err) *err = m;
    return false;
  };
  int k = (int)d.object_names.size();
  int n = (int)d.src.size();
  if (k < 1) return fail("groupoid needs at least one object");
  if (n < k) return fail("missing identity morphisms");
  if ((int)d.tgt.size() != n || (int)d.morph_names.size() != n ||
      (int)d.table.size() != n)
    return fail("inconsistent table dimensions");
  for (int g = 0; g < n; ++g)
    if ((int)d.table[g].size() != n)
      return fail("inconsistent table dimensions");
  for (int x = 0; x < k; ++x) {
    if (d.src[x] != x || d.tgt[x] != x)
      return fail("identity morphism " + mname(d, x) +
                  " must have source and target " + d.object_names[x]);
    if (d.morph_names[x] != d.object_names[x])
      return fail("identity morphism names must match object names");
  }
  for (int g = 0; g < n; ++g) {
    if (d.src[g] < 0 || d.src[g] >= k || d.tgt[g] < 0 || d.tgt[g] >= k)
      return fail("morphism " + mname(d, g) + " has an out-of-range object");
  }
  {
    std::set<std::string> seen;
    for (auto& s : d.morph_names)
      if (!seen.insert(s).second)
        return fail("duplicate morphism name '" + s + "'");
  }
  for (int g = 0; g < n; ++g)
    for (int h = 0; h < n; ++h) {
      int c = d.table[g][h];
      bool ok = d.src[g] == d.tgt[h];
      if (!ok && c != -1)
        return fail("composite declared for non-composable pair " +
                    mname(d, g) + " . " + mname(d, h));
      if (ok && c == -1)
        return fail("composite of " + mname(d, g) + " . " + mname(d, h) +
                    " is undefined");
      if (c != -1) {
        if (c < 0 || c >= n)
          return fail("composite out of range at " + mname(d, g) + " . " +
                      mname(d, h));
        if (d.src[c] != d.src[h] || d.tgt[c] != d.tgt[g])
          return fail("composite " + mname(d, g) + " . " + mname(d, h) +
                      " = " + mname(d, c) + " has the wrong source or target");
      }
    }
  for (int g = 0; g < n; ++g) {
    if (d.table[g][d.src[g]] != g || d.table[d.tgt[g]][g] != g)
      return fail("identity law fails at " + mname(d, g));
  }
  for (int g = 0; g < n; ++g) {
    int found = -1;
    for (int h = 0; h < n; ++h) {
      if (d.src[h] != d.tgt[g] || d.tgt[h] != d.src[g]) continue;
      if (d.table[g][h] == d.tgt[g] && d.table[h][g] == d.src[g]) {
        if (found != -1)
          return fail("morphism " + mname(d, g) + " has two inverses");
        found = h;
      }
    }
    if (found == -1)
      return fail("morphism " + mname(d, g) + " has no inverse");
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (d.src[a] != d.tgt[b]) continue;
      for (int c = 0; c < n; ++c) {
        if (d.src[b] != d.tgt[c]) continue;
        if (d.table[d.table[a][b]][c] != d.table[a][d.table[b][c]])
          return fail("composition is not associative at " + mname(d, a) +
                      " . " + mname(d, b) + " . " + mname(d, c));
      }
    }
  return true;
}

std::optional<Groupoid> Groupoid::make(GroupoidData d, std::string* err) {
  if (!validate_groupoid(d, err)) return std::nullopt;
  Groupoid g;
  g.n_obj_ = (int)d.object_names.size();
  g.d_ = std::move(d);
  int n = g.size();
  g.inverse_.assign(n, -1);
  for (int a = 0; a < n; ++a)
    for (int h = 0; h < n; ++h)
      if (g.d_.src[h] == g.d_.tgt[a] && g.d_.tgt[h] == g.d_.src[a] &&
          g.d_.table[a][h] == g.d_.tgt[a] && g.d_.table[h][a] == g.d_.src[a])
        g.inverse_[a] = h;
  return g;
}

int Groupoid::compose(int g, int h) const {
  assert(composable(g, h));
  return d_.table[g][h];
}

std::optional<int> Groupoid::morph_by_name(const std::string& name) const {
  for (int g = 0; g < size(); ++g)
    if (d_.morph_names[g] == name) return g;
  return std::nullopt;
}

std::optional<int> Groupoid::object_by_name(const std::string& name) const {
  for (int x = 0; x < n_obj_; ++x)
    if (d_.object_names[x] == name) return x;
  return std::nullopt;
}

MorphSet Groupoid::hom(int x, int y) const {
  MorphSet out;
  for (int g = 0; g < size(); ++g)
    if (d_.src[g] == x && d_.tgt[g] == y) out.push_back(g);
  return out;
}

MorphSet Groupoid::identity_ids() const {
  MorphSet out(n_obj_);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

std::vector<std::vector<int>> Groupoid::components() const {
  std::vector<int> parent(n_obj_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int g = 0; g < size(); ++g) {
    int a = find(d_.src[g]), b = find(d_.tgt[g]);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<int>> by_root(n_obj_);
  for (int x = 0; x < n_obj_; ++x) by_root[find(x)].push_back(x);
  std::vector<std::vector<int>> out;
  for (auto& c : by_root)
    if (!c.empty()) out.push_back(c);
  return out;
}

int Groupoid::tau_conj(const std::vector<int>& tau_by_obj, int g) const {
  int ts = tau_by_obj[d_.src[g]];
  int tt = tau_by_obj[d_.tgt[g]];
  return compose(inverse(tt), compose(g, ts));
}

MorphSet Groupoid::closure(const MorphSet& gens) const {
  std::set<int> have(gens.begin(), gens.end());
  std::queue<int> work;
  for (int g : have) work.push(g);
  auto push = [&](int g) {
    if (have.insert(g).second) work.push(g);
  };
  while (!work.empty()) {
    int a = work.front();
    work.pop();
    push(inverse_[a]);
    // Snapshot: anything added later re-enters the queue anyway.
    std::vector<int> cur(have.begin(), have.end());
    for (int b : cur) {
      if (composable(a, b)) push(d_.table[a][b]);
      if (composable(b, a)) push(d_.table[b][a]);
    }
  }
  return MorphSet(have.begin(), have.end());
}

bool Groupoid::is_subgroupoid(const MorphSet& morphs) const {
  if (morphs.empty()) return false;
  std::set<int> have(morphs.begin(), morphs.end());
  for (int a : morphs) {
    if (!have.count(inverse_[a])) return false;
    for (int b : morphs)
      if (composable(a, b) && !have.count(d_.table[a][b])) return false;
  }
  return true;
}

bool Groupoid::is_wide(const MorphSet& morphs) const {
  std::set<int> have(morphs.begin(), morphs.end());
  for (int x = 0; x < n_obj_; ++x)
    if (!have.count(x)) return false;
  return true;
}

std::vector<MorphSet> Groupoid::enumerate_subgroupoids(bool wide_only) const {
  std::set<MorphSet> seen;
  std::queue<MorphSet> work;
  auto push = [&](MorphSet s) {
    if (seen.insert(s).second) work.push(std::move(s));
  };
  if (wide_only) {
    push(closure(identity_ids()));
  } else {
    for (int g = 0; g < size(); ++g) push(closure({g}));
  }
  while (!work.empty()) {
    MorphSet h = work.front();
    work.pop();
    for (int g = 0; g < size(); ++g) {
      if (std::binary_search(h.begin(), h.end(), g)) continue;
      MorphSet ext = h;
      ext.push_back(g);
      push(closure(ext));
    }
  }
  std::vector<MorphSet> out(seen.begin(), seen.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const MorphSet& a, const MorphSet& b) {
                     if (a.size() != b.size()) return a.size() < b.size();
                     return a < b;
                   });
  return out;
}

RestrictedGroupoid Groupoid::restrict_to_objects(
    const std::vector<int>& objs) const {
  std::vector<int> keep = objs;
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  RestrictedGroupoid r;
  r.object_map.assign(n_obj_, -1);
  for (int i = 0; i < (int)keep.size(); ++i) {
    r.object_map[keep[i]] = i;
    r.object_names.push_back(d_.object_names[keep[i]]);
  }
  r.morph_map.assign(size(), -1);
  for (int g = 0; g < size(); ++g) {
    if (r.object_map[d_.src[g]] == -1 || r.object_map[d_.tgt[g]] == -1)
      continue;
    r.morph_map[g] = (int)r.morph_names.size();
    r.morph_names.push_back(d_.morph_names[g]);
    r.src.push_back(r.object_map[d_.src[g]]);
    r.tgt.push_back(r.object_map[d_.tgt[g]]);
  }
  int n = (int)r.morph_names.size();
  r.table.assign(n, std::vector<int>(n, -1));
  for (int g = 0; g < size(); ++g) {
    if (r.morph_map[g] == -1) continue;
    for (int h = 0; h < size(); ++h) {
      if (r.morph_map[h] == -1 || !composable(g, h)) continue;
      r.table[r.morph_map[g]][r.morph_map[h]] = r.morph_map[d_.table[g][h]];
    }
  }
  return r;
}

}  // namespace gpd
