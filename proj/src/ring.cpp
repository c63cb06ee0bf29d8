#include "ring.hpp"

#include <algorithm>
#include <cassert>
#include <set>

namespace gpd {

SplitRing::SplitRing(CoeffField k, int n) : k_(std::move(k)), n_(n) {
  assert(n >= 1);
}

RingElem SplitRing::zero() const { return RingElem(n_, k_.zero()); }

RingElem SplitRing::one() const { return RingElem(n_, k_.one()); }

RingElem SplitRing::idempotent(int i) const {
  assert(i >= 0 && i < n_);
  RingElem e = zero();
  e[i] = k_.one();
  return e;
}

RingElem SplitRing::idempotent_sum(const std::vector<int>& idx) const {
  RingElem e = zero();
  for (int i : idx) e[i] = k_.one();
  return e;
}

RingElem SplitRing::add(const RingElem& a, const RingElem& b) const {
  RingElem r = zero();
  for (int i = 0; i < n_; ++i) r[i] = k_.add(a[i], b[i]);
  return r;
}

RingElem SplitRing::sub(const RingElem& a, const RingElem& b) const {
  RingElem r = zero();
  for (int i = 0; i < n_; ++i) r[i] = k_.sub(a[i], b[i]);
  return r;
}

RingElem SplitRing::neg(const RingElem& a) const {
  RingElem r = zero();
  for (int i = 0; i < n_; ++i) r[i] = k_.neg(a[i]);
  return r;
}

RingElem SplitRing::mul(const RingElem& a, const RingElem& b) const {
  RingElem r = zero();
  for (int i = 0; i < n_; ++i) r[i] = k_.mul(a[i], b[i]);
  return r;
}

RingElem SplitRing::scale(const FieldElem& c, const RingElem& a) const {
  RingElem r = zero();
  for (int i = 0; i < n_; ++i) r[i] = k_.mul(c, a[i]);
  return r;
}

bool SplitRing::is_zero(const RingElem& a) const {
  for (const auto& c : a)
    if (!k_.is_zero(c)) return false;
  return true;
}

std::string SplitRing::to_string(const RingElem& a) const {
  std::string out;
  for (int i = 0; i < n_; ++i) {
    if (k_.is_zero(a[i])) continue;
    std::string term;
    if (!k_.is_one(a[i])) {
      std::string tok = k_.to_string(a[i]);
      bool wrap = tok.find_first_of("+-", 1) != std::string::npos;
      term = (wrap ? "(" + tok + ")" : tok) + " ";
    }
    term += "e" + std::to_string(i + 1);
    if (!out.empty() && term[0] != '-') out += "+";
    out += term;
  }
  return out.empty() ? "0" : out;
}

Vec SplitRing::flatten(const RingElem& a) const {
  int d = k_.prime_degree();
  Vec v(n_ * d);
  for (int i = 0; i < n_; ++i)
    for (int r = 0; r < d; ++r) v[i * d + r] = a[i].c[r];
  return v;
}

RingElem SplitRing::unflatten(const Vec& v) const {
  int d = k_.prime_degree();
  RingElem a = zero();
  for (int i = 0; i < n_; ++i)
    for (int r = 0; r < d; ++r) a[i].c[r] = v[i * d + r];
  return a;
}

BlockSubring SplitRing::full_subring() const {
  BlockSubring t;
  for (int i = 0; i < n_; ++i)
    t.blocks.push_back({{i}, k_.full_subfield(), {0}});
  return t;
}

bool SplitRing::subring_valid(const BlockSubring& t, std::string* err) const {
  auto fail = [&](const std::string& m) {
    if (err) *err = m;
    return false;
  };
  std::vector<int> seen(n_, 0);
  for (const auto& b : t.blocks) {
    if (b.indices.empty()) return fail("empty block");
    if (b.transport.size() != b.indices.size())
      return fail("transport list does not match block size");
    if (b.subfield < 0 || b.subfield >= (int)k_.subfields().size())
      return fail("subfield out of range");
    for (int i : b.indices) {
      if (i < 0 || i >= n_) return fail("idempotent index out of range");
      if (seen[i]++) return fail("index e" + std::to_string(i + 1) +
                                 " appears in two blocks");
    }
    for (int a : b.transport)
      if (a < 0 || a >= k_.aut_count()) return fail("transport out of range");
  }
  for (int i = 0; i < n_; ++i)
    if (!seen[i])
      return fail("index e" + std::to_string(i + 1) + " not covered");
  return true;
}

BlockSubring SplitRing::canonicalize(BlockSubring t) const {
  for (auto& b : t.blocks) {
    std::vector<std::pair<int, int>> items;
    for (size_t j = 0; j < b.indices.size(); ++j)
      items.push_back({b.indices[j], b.transport[j]});
    std::sort(items.begin(), items.end());
    int root_inv = k_.aut_inverse(items[0].second);
    const auto& fixing = k_.subfields()[b.subfield].fixing_auts;
    for (size_t j = 0; j < items.size(); ++j) {
      int a = k_.aut_compose(items[j].second, root_inv);
      int best = -1;
      for (int g : fixing) {
        int cand = k_.aut_compose(a, g);
        if (best == -1 || cand < best) best = cand;
      }
      b.indices[j] = items[j].first;
      b.transport[j] = best;
    }
  }
  std::sort(t.blocks.begin(), t.blocks.end(),
            [](const SubringBlock& a, const SubringBlock& b) {
              return a.indices[0] < b.indices[0];
            });
  return t;
}

bool SplitRing::subring_equal(const BlockSubring& a,
                              const BlockSubring& b) const {
  BlockSubring ca = canonicalize(a), cb = canonicalize(b);
  if (ca.blocks.size() != cb.blocks.size()) return false;
  for (size_t i = 0; i < ca.blocks.size(); ++i) {
    if (ca.blocks[i].indices != cb.blocks[i].indices) return false;
    if (ca.blocks[i].subfield != cb.blocks[i].subfield) return false;
    if (ca.blocks[i].transport != cb.blocks[i].transport) return false;
  }
  return true;
}

bool SplitRing::contains(const BlockSubring& t, const RingElem& v) const {
  BlockSubring c = canonicalize(t);
  for (const auto& b : c.blocks) {
    const FieldElem& w = v[b.indices[0]];
    if (!k_.in_subfield(w, b.subfield)) return false;
    for (size_t j = 0; j < b.indices.size(); ++j)
      if (!(v[b.indices[j]] == k_.apply_aut(b.transport[j], w))) return false;
  }
  return true;
}

std::vector<RingElem> SplitRing::prime_basis(const BlockSubring& t) const {
  BlockSubring c = canonicalize(t);
  std::vector<RingElem> out;
  for (const auto& b : c.blocks) {
    for (const auto& base : k_.subfields()[b.subfield].basis) {
      RingElem v = zero();
      for (size_t j = 0; j < b.indices.size(); ++j)
        v[b.indices[j]] = k_.apply_aut(b.transport[j], base);
      out.push_back(std::move(v));
    }
  }
  return out;
}

bool SplitRing::subring_contains(const BlockSubring& a,
                                 const BlockSubring& b) const {
  for (const auto& v : prime_basis(b))
    if (!contains(a, v)) return false;
  return true;
}

BlockSubring SplitRing::restrict(const BlockSubring& t,
                                 const std::vector<int>& idx) const {
  std::set<int> keep(idx.begin(), idx.end());
  BlockSubring out;
  for (const auto& b : t.blocks) {
    SubringBlock nb;
    nb.subfield = b.subfield;
    for (size_t j = 0; j < b.indices.size(); ++j) {
      if (!keep.count(b.indices[j])) continue;
      nb.indices.push_back(b.indices[j]);
      nb.transport.push_back(b.transport[j]);
    }
    if (!nb.indices.empty()) out.blocks.push_back(std::move(nb));
  }
  return canonicalize(out);
}

std::string SplitRing::subring_to_string(const BlockSubring& t) const {
  BlockSubring c = canonicalize(t);
  std::string out;
  for (const auto& b : c.blocks) {
    if (!out.empty()) out += " + ";
    out += k_.subfields()[b.subfield].name;
    out += "(";
    for (size_t j = 0; j < b.indices.size(); ++j) {
      if (j) out += "+";
      if (b.transport[j] != 0) out += k_.aut_name(b.transport[j]) + " ";
      out += "e" + std::to_string(b.indices[j] + 1);
    }
    out += ")";
  }
  return out;
}

std::vector<BlockSubring> SplitRing::enumerate_block_subrings() const {
  assert(n_ <= 12 && "block subring enumeration is exponential");
  // Coset representatives of Aut(K) / Gal(K / subfield), per subfield.
  std::vector<std::vector<int>> coset_reps(k_.subfields().size());
  for (size_t f = 0; f < k_.subfields().size(); ++f) {
    const auto& fixing = k_.subfields()[f].fixing_auts;
    std::set<int> reps;
    for (int a = 0; a < k_.aut_count(); ++a) {
      int best = -1;
      for (int g : fixing) {
        int cand = k_.aut_compose(a, g);
        if (best == -1 || cand < best) best = cand;
      }
      reps.insert(best);
    }
    coset_reps[f].assign(reps.begin(), reps.end());
  }

  std::vector<BlockSubring> out;
  std::vector<std::vector<int>> parts;
  auto emit = [&]() {
    // For the fixed partition, walk every subfield/transport decoration.
    std::vector<BlockSubring> acc = {BlockSubring{}};
    for (const auto& p : parts) {
      std::vector<BlockSubring> next;
      for (size_t f = 0; f < k_.subfields().size(); ++f) {
        std::vector<std::vector<int>> tchoices = {{0}};
        for (size_t j = 1; j < p.size(); ++j) {
          std::vector<std::vector<int>> grown;
          for (const auto& pre : tchoices)
            for (int r : coset_reps[f]) {
              auto ext = pre;
              ext.push_back(r);
              grown.push_back(std::move(ext));
            }
          tchoices = std::move(grown);
        }
        for (const auto& tr : tchoices)
          for (const auto& base : acc) {
            BlockSubring b = base;
            b.blocks.push_back({p, (int)f, tr});
            next.push_back(std::move(b));
          }
      }
      acc = std::move(next);
    }
    for (auto& t : acc) out.push_back(std::move(t));
  };
  // Set partitions by restricted growth: element i joins an existing part or
  // opens a new one.
  auto rec = [&](auto&& self, int i) -> void {
    if (i == n_) {
      emit();
      return;
    }
    // Deeper levels push and pop parts; index with a snapshot, the vector
    // may reallocate underneath a range-for.
    size_t existing = parts.size();
    for (size_t pi = 0; pi < existing; ++pi) {
      parts[pi].push_back(i);
      self(self, i + 1);
      parts[pi].pop_back();
    }
    parts.push_back({i});
    self(self, i + 1);
    parts.pop_back();
  };
  rec(rec, 0);
  for (auto& t : out) t = canonicalize(t);
  std::sort(out.begin(), out.end(), [&](const BlockSubring& a,
                                        const BlockSubring& b) {
    return subring_to_string(a) < subring_to_string(b);
  });
  return out;
}

namespace {

// Reduce v against rref rows (leading coefficient 1 at pivot_cols[r]).
void reduce_against(const Mat& rows, const std::vector<int>& pivot_cols,
                    Vec& v, const PrimeCtx& ctx) {
  for (size_t r = 0; r < rows.size(); ++r) {
    Rat c = ctx.norm(v[pivot_cols[r]]);
    if (ctx.is_zero(c)) continue;
    for (size_t j = 0; j < v.size(); ++j)
      v[j] = ctx.sub(v[j], ctx.mul(c, rows[r][j]));
  }
  for (auto& x : v) x = ctx.norm(x);
}

}  // namespace

SplitRing::SeparabilityResult SplitRing::separability_check(
    const BlockSubring& t, const BlockSubring& r) const {
  SeparabilityResult res;
  std::string err;
  if (!subring_valid(t, &err)) {
    res.precondition_ok = false;
    res.err = "separability: invalid T: " + err;
    return res;
  }
  if (!subring_valid(r, &err)) {
    res.precondition_ok = false;
    res.err = "separability: invalid R: " + err;
    return res;
  }
  if (!subring_contains(t, r)) {
    res.precondition_ok = false;
    res.err = "separability: R is not contained in T";
    return res;
  }
  PrimeCtx ctx{k_.characteristic()};
  auto tb = prime_basis(t);
  auto rb = prime_basis(r);
  const size_t nb = tb.size();

  // Coordinates of elements of t on tb, via the flattened ring coordinates.
  Mat basis_cols(flatten(zero()).size(), Vec(nb, 0));
  for (size_t kk = 0; kk < nb; ++kk) {
    Vec f = flatten(tb[kk]);
    for (size_t row = 0; row < f.size(); ++row) basis_cols[row][kk] = f[row];
  }
  auto expand = [&](const RingElem& v) {
    auto x = solve(basis_cols, flatten(v), ctx);
    assert(x.has_value());  // products of basis elements stay in t
    return *x;
  };

  // Bimodule relations spanning the kernel of the quotient map onto the
  // tensor square over r.
  Mat rel;
  for (size_t i = 0; i < nb; ++i)
    for (size_t j = 0; j < nb; ++j)
      for (const auto& b : rb) {
        Vec w(nb * nb, 0);
        Vec left = expand(mul(tb[i], b));
        Vec right = expand(mul(b, tb[j]));
        for (size_t kk = 0; kk < nb; ++kk) {
          w[kk * nb + j] = ctx.add(w[kk * nb + j], left[kk]);
          w[i * nb + kk] = ctx.sub(w[i * nb + kk], right[kk]);
        }
        rel.push_back(std::move(w));
      }
  std::vector<int> rel_pivots;
  int rel_rank = rref(rel, ctx, &rel_pivots);
  rel.resize(rel_rank);
  rel_pivots.resize(rel_rank);
  std::vector<char> is_pivot(nb * nb, 0);
  for (int pc : rel_pivots) is_pivot[pc] = 1;
  std::vector<int> free_cols;
  for (size_t c = 0; c < nb * nb; ++c)
    if (!is_pivot[c]) free_cols.push_back(static_cast<int>(c));

  // Unknowns: coordinates on the free columns (one representative per class).
  // Equations: m(e) = 1 on flattened ring coordinates, then for each basis
  // element a of t, the reduction of (a (x) 1)e - (1 (x) a)e must vanish.
  std::vector<Vec> prod_coords(nb * nb);
  for (size_t i = 0; i < nb; ++i)
    for (size_t j = 0; j < nb; ++j)
      prod_coords[i * nb + j] = expand(mul(tb[i], tb[j]));

  const size_t nf = free_cols.size();
  Mat sys;
  Vec rhs;
  {
    Vec one_t = expand(one());
    for (size_t row = 0; row < nb; ++row) {
      Vec eq(nf, 0);
      for (size_t fc = 0; fc < nf; ++fc)
        eq[fc] = prod_coords[free_cols[fc]][row];
      sys.push_back(std::move(eq));
      rhs.push_back(ctx.norm(one_t[row]));
    }
  }
  for (size_t l = 0; l < nb; ++l) {
    // Columns of the centering map on the free part, reduced mod relations.
    Mat cols(nf);
    for (size_t fc = 0; fc < nf; ++fc) {
      size_t i = free_cols[fc] / nb, j = free_cols[fc] % nb;
      Vec img(nb * nb, 0);
      Vec li = expand(mul(tb[l], tb[i]));
      Vec lj = expand(mul(tb[l], tb[j]));
      for (size_t kk = 0; kk < nb; ++kk) {
        img[kk * nb + j] = ctx.add(img[kk * nb + j], li[kk]);
        img[i * nb + kk] = ctx.sub(img[i * nb + kk], lj[kk]);
      }
      reduce_against(rel, rel_pivots, img, ctx);
      cols[fc] = std::move(img);
    }
    for (size_t fr = 0; fr < nf; ++fr) {
      Vec eq(nf, 0);
      bool nonzero = false;
      for (size_t fc = 0; fc < nf; ++fc) {
        eq[fc] = cols[fc][free_cols[fr]];
        nonzero = nonzero || !ctx.is_zero(eq[fc]);
      }
      if (!nonzero) continue;
      sys.push_back(std::move(eq));
      rhs.push_back(0);
    }
  }
  auto sol = solve(sys, rhs, ctx);
  if (!sol) return res;  // precondition_ok, not separable
  res.separable = true;
  res.witness.assign(nb * nb, 0);
  for (size_t fc = 0; fc < nf; ++fc)
    res.witness[free_cols[fc]] = ctx.norm((*sol)[fc]);
  return res;
}

}  // namespace gpd
