#ifndef GPD_LINALG_HPP
#define GPD_LINALG_HPP

#include <optional>
#include <vector>

#include "field.hpp"

namespace gpd {

// Scalar context for exact elimination: rationals when p == 0, otherwise the
// prime field GF(p) with entries kept as canonical residues 0..p-1.
struct PrimeCtx {
  long p = 0;

  Rat norm(const Rat& a) const;
  Rat add(const Rat& a, const Rat& b) const;
  Rat sub(const Rat& a, const Rat& b) const;
  Rat mul(const Rat& a, const Rat& b) const;
  Rat inv(const Rat& a) const;
  bool is_zero(const Rat& a) const;
};

using Vec = std::vector<Rat>;
using Mat = std::vector<Vec>;  // row major; rows may be empty

// In-place reduced row echelon form; returns the rank and, if requested, the
// pivot column of each of the first `rank` rows.
int rref(Mat& a, const PrimeCtx& k, std::vector<int>* pivot_cols = nullptr);

// One solution of A x = b with free variables set to zero.
std::optional<Vec> solve(const Mat& a, const Vec& b, const PrimeCtx& k);

// Rows form an echelonized basis of the null space (canonical for a given
// rref of A: one vector per free column, unit there, zero at other free
// columns).
Mat kernel_basis(const Mat& a, const PrimeCtx& k);

// Echelonized basis of the row space; equal subspaces give equal matrices.
Mat rowspace_basis(Mat a, const PrimeCtx& k);

// `basis` must already be in reduced row echelon form.
bool in_rowspace(const Mat& basis, const Vec& v, const PrimeCtx& k);

Vec mat_apply(const Mat& a, const Vec& x, const PrimeCtx& k);
Mat mat_mul(const Mat& a, const Mat& b, const PrimeCtx& k);
Mat mat_identity(int n);

}  // namespace gpd

#endif
