#ifndef GPD_RING_HPP
#define GPD_RING_HPP

#include <optional>
#include <string>
#include <vector>

#include "field.hpp"
#include "linalg.hpp"

namespace gpd {

// Element of S = K e_1 + ... + K e_n, one field coordinate per primitive
// idempotent.
using RingElem = std::vector<FieldElem>;

// One block of a block-form subring: the indices carry a common value drawn
// from `subfield` (an index into CoeffField::subfields()), the position j
// holding transport[j] applied to that value.  After canonicalization the
// first (least) index is the representative and its transport is the
// identity; the other transports are the least members of their cosets
// modulo Gal(K / subfield).
struct SubringBlock {
  std::vector<int> indices;
  int subfield = 0;
  std::vector<int> transport;
};

struct BlockSubring {
  std::vector<SubringBlock> blocks;  // ordered by least index
};

class SplitRing {
 public:
  SplitRing(CoeffField k, int n);

  const CoeffField& field() const { return k_; }
  int dim() const { return n_; }

  RingElem zero() const;
  RingElem one() const;
  RingElem idempotent(int i) const;
  // Sum of e_i over a sorted index set.
  RingElem idempotent_sum(const std::vector<int>& idx) const;
  RingElem add(const RingElem& a, const RingElem& b) const;
  RingElem sub(const RingElem& a, const RingElem& b) const;
  RingElem neg(const RingElem& a) const;
  RingElem mul(const RingElem& a, const RingElem& b) const;
  RingElem scale(const FieldElem& c, const RingElem& a) const;
  bool is_zero(const RingElem& a) const;
  std::string to_string(const RingElem& a) const;

  // Prime-field coordinates, idempotent-major: position i * prime_degree + r
  // holds coordinate r of the e_{i+1} component.
  Vec flatten(const RingElem& a) const;
  RingElem unflatten(const Vec& v) const;

  // Block subrings.
  BlockSubring full_subring() const;
  bool subring_valid(const BlockSubring& t, std::string* err) const;
  BlockSubring canonicalize(BlockSubring t) const;
  bool subring_equal(const BlockSubring& a, const BlockSubring& b) const;
  // a contains b.
  bool subring_contains(const BlockSubring& a, const BlockSubring& b) const;
  bool contains(const BlockSubring& t, const RingElem& v) const;
  // Basis of t as a vector space over the prime field.
  std::vector<RingElem> prime_basis(const BlockSubring& t) const;
  // t . (sum of e_i over idx): blocks intersected with idx and re-rooted.
  BlockSubring restrict(const BlockSubring& t,
                        const std::vector<int>& idx) const;
  std::string subring_to_string(const BlockSubring& t) const;

  // All block-form subrings: set partitions of the indices crossed with a
  // subfield and transport-coset choice per block.  Exponential; guarded to
  // n <= 12.
  std::vector<BlockSubring> enumerate_block_subrings() const;

  // Separability of t over a subring r <= t: searches the tensor square
  // t (x)_r t (built as the quotient of the plain prime-field tensor square
  // by the relations a.b (x) c - a (x) b.c, b over prime_basis(r)) for an
  // element e with m(e) = 1 and (a (x) 1)e = (1 (x) a)e for all a in t.
  // `witness` holds a representative of e as coordinates on prime_basis(t)
  // pairs, row-major.
  struct SeparabilityResult {
    bool precondition_ok = true;
    std::string err;
    bool separable = false;
    Vec witness;
  };
  SeparabilityResult separability_check(const BlockSubring& t,
                                        const BlockSubring& r) const;

 private:
  CoeffField k_;
  int n_;
};

}  // namespace gpd

#endif
