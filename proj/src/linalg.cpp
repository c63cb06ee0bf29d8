#include "linalg.hpp"

#include <cassert>

namespace gpd {

Rat PrimeCtx::norm(const Rat& a) const {
  if (p == 0) {
    Rat r = a;
    r.canonicalize();
    return r;
  }
  mpz_class den = a.get_den() % p;
  assert(den != 0);
  mpz_class di;
  int ok = mpz_invert(di.get_mpz_t(), den.get_mpz_t(), mpz_class(p).get_mpz_t());
  assert(ok);
  (void)ok;
  mpz_class r = (a.get_num() % p) * di % p;
  if (r < 0) r += p;
  return Rat(r);
}

Rat PrimeCtx::add(const Rat& a, const Rat& b) const { return norm(a + b); }
Rat PrimeCtx::sub(const Rat& a, const Rat& b) const { return norm(a - b); }
Rat PrimeCtx::mul(const Rat& a, const Rat& b) const { return norm(a * b); }

Rat PrimeCtx::inv(const Rat& a) const {
  if (p == 0) {
    assert(a != 0);
    return Rat(1) / a;
  }
  Rat r = norm(a);
  assert(r != 0);
  mpz_class ri;
  int ok = mpz_invert(ri.get_mpz_t(), r.get_num().get_mpz_t(),
                      mpz_class(p).get_mpz_t());
  assert(ok);
  (void)ok;
  return Rat(ri);
}

bool PrimeCtx::is_zero(const Rat& a) const { return norm(a) == 0; }

int rref(Mat& a, const PrimeCtx& k, std::vector<int>* pivot_cols) {
  if (pivot_cols) pivot_cols->clear();
  if (a.empty()) return 0;
  size_t rows = a.size(), cols = a[0].size();
  for (auto& row : a) {
    assert(row.size() == cols);
    for (auto& x : row) x = k.norm(x);
  }
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = r;
    while (piv < rows && k.is_zero(a[piv][c])) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    Rat d = k.inv(a[r][c]);
    for (size_t j = c; j < cols; ++j) a[r][j] = k.mul(a[r][j], d);
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || k.is_zero(a[i][c])) continue;
      Rat f = a[i][c];
      for (size_t j = c; j < cols; ++j)
        a[i][j] = k.sub(a[i][j], k.mul(f, a[r][j]));
    }
    if (pivot_cols) pivot_cols->push_back((int)c);
    ++r;
  }
  return (int)r;
}

std::optional<Vec> solve(const Mat& a, const Vec& b, const PrimeCtx& k) {
  size_t rows = a.size();
  size_t cols = rows ? a[0].size() : 0;
  assert(b.size() == rows);
  Mat aug(rows, Vec(cols + 1));
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) aug[i][j] = a[i][j];
    aug[i][cols] = b[i];
  }
  std::vector<int> piv;
  int rank = rref(aug, k, &piv);
  for (int i = 0; i < rank; ++i)
    if (piv[i] == (int)cols) return std::nullopt;
  Vec x(cols, Rat(0));
  for (int i = 0; i < rank; ++i) x[piv[i]] = aug[i][cols];
  return x;
}

Mat kernel_basis(const Mat& a, const PrimeCtx& k) {
  if (a.empty()) return {};
  size_t cols = a[0].size();
  Mat r = a;
  std::vector<int> piv;
  int rank = rref(r, k, &piv);
  std::vector<bool> is_piv(cols, false);
  for (int c : piv) is_piv[c] = true;
  Mat out;
  for (size_t free_c = 0; free_c < cols; ++free_c) {
    if (is_piv[free_c]) continue;
    Vec v(cols, Rat(0));
    v[free_c] = 1;
    for (int i = 0; i < rank; ++i)
      v[piv[i]] = k.sub(Rat(0), r[i][free_c]);
    out.push_back(std::move(v));
  }
  return out;
}

Mat rowspace_basis(Mat a, const PrimeCtx& k) {
  int rank = rref(a, k);
  a.resize(rank);
  return a;
}

bool in_rowspace(const Mat& basis, const Vec& v, const PrimeCtx& k) {
  Vec r = v;
  for (auto& x : r) x = k.norm(x);
  for (const auto& row : basis) {
    size_t lead = 0;
    while (lead < row.size() && k.is_zero(row[lead])) ++lead;
    if (lead == row.size()) continue;
    if (k.is_zero(r[lead])) continue;
    Rat f = r[lead];
    for (size_t j = 0; j < r.size(); ++j)
      r[j] = k.sub(r[j], k.mul(f, row[j]));
  }
  for (auto& x : r)
    if (!k.is_zero(x)) return false;
  return true;
}

Vec mat_apply(const Mat& a, const Vec& x, const PrimeCtx& k) {
  Vec out(a.size(), Rat(0));
  for (size_t i = 0; i < a.size(); ++i) {
    Rat acc = 0;
    assert(a[i].size() == x.size());
    for (size_t j = 0; j < x.size(); ++j) acc += a[i][j] * x[j];
    out[i] = k.norm(acc);
  }
  return out;
}

Mat mat_mul(const Mat& a, const Mat& b, const PrimeCtx& k) {
  size_t n = a.size(), mid = b.size(), m = mid ? b[0].size() : 0;
  Mat out(n, Vec(m, Rat(0)));
  for (size_t i = 0; i < n; ++i) {
    assert(a[i].size() == mid);
    for (size_t j = 0; j < m; ++j) {
      Rat acc = 0;
      for (size_t t = 0; t < mid; ++t) acc += a[i][t] * b[t][j];
      out[i][j] = k.norm(acc);
    }
  }
  return out;
}

Mat mat_identity(int n) {
  Mat out(n, Vec(n, Rat(0)));
  for (int i = 0; i < n; ++i) out[i][i] = 1;
  return out;
}

}  // namespace gpd
