#ifndef GPD_FIELD_HPP
#define GPD_FIELD_HPP

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

namespace gpd {

using Rat = mpq_class;

enum class FieldKind {
  Rationals,  // Q
  Quadratic,  // Q(sqrt d), d squarefree, d != 0, 1; d = -1 is Q(i)
  Galois,     // GF(p^m), 1 <= m <= 4
};

// An element of a coefficient field, stored as coordinates over the prime
// field in the field's canonical basis: {1} for Q, {1, sqrt d} for Q(sqrt d),
// the power basis {1, t, ..., t^{m-1}} for GF(p^m).  In positive
// characteristic every coordinate is a canonical residue 0..p-1.
struct FieldElem {
  std::vector<Rat> c;

  friend bool operator==(const FieldElem& a, const FieldElem& b) {
    return a.c == b.c;
  }
  friend bool operator!=(const FieldElem& a, const FieldElem& b) {
    return !(a == b);
  }
};

// Exact coefficient field with its automorphism group and subfield lattice.
// Automorphisms are indexed 0..aut_count()-1 with 0 the identity; for
// Q(sqrt d) index 1 is conjugation, for GF(p^m) index a is frob^a where
// frob(x) = x^p.
class CoeffField {
 public:
  static CoeffField rationals();
  static CoeffField quadratic(long d);
  static CoeffField galois(long p, int m);

  // Accepts "Q", "Q(i)", "Q(sqrt d)", "Q(sqrt(d))", "GF(q)", "GF(p^m)".
  // On failure returns nullopt and, if err is non-null, stores a message.
  static std::optional<CoeffField> parse(const std::string& spec,
                                         std::string* err = nullptr);

  FieldKind kind() const { return kind_; }
  long characteristic() const { return p_; }  // 0 in characteristic zero
  int prime_degree() const { return deg_; }   // [K : prime field]
  long quad_d() const { return d_; }
  std::string name() const;

  // Monic modulus of GF(p^m), coefficients low to high, length m+1.
  const std::vector<long>& modulus() const { return irred_; }

  FieldElem zero() const;
  FieldElem one() const;
  FieldElem from_int(long v) const;
  FieldElem from_rat(const Rat& v) const;
  FieldElem basis_elem(int k) const;
  // sqrt d, i, or t; for Q returns 1.
  FieldElem gen() const;

  FieldElem add(const FieldElem& a, const FieldElem& b) const;
  FieldElem sub(const FieldElem& a, const FieldElem& b) const;
  FieldElem neg(const FieldElem& a) const;
  FieldElem mul(const FieldElem& a, const FieldElem& b) const;
  FieldElem inv(const FieldElem& a) const;  // a must be nonzero
  FieldElem div(const FieldElem& a, const FieldElem& b) const;
  FieldElem scale(const Rat& r, const FieldElem& a) const;
  FieldElem pow(const FieldElem& a, unsigned long e) const;
  bool is_zero(const FieldElem& a) const;
  bool is_one(const FieldElem& a) const;

  int aut_count() const;
  FieldElem apply_aut(int a, const FieldElem& e) const;
  int aut_compose(int a, int b) const;  // a after b
  int aut_inverse(int a) const;
  std::string aut_name(int a) const;
  std::optional<int> aut_by_name(const std::string& name) const;

  struct Subfield {
    std::string name;
    int degree;                    // over the prime field
    std::vector<int> fixing_auts;  // Gal(K / this subfield), sorted
    std::vector<FieldElem> basis;  // echelonized, over the prime field
  };
  // Ascending by degree; first entry is the prime field, last is K itself.
  const std::vector<Subfield>& subfields() const { return subfields_; }
  int prime_subfield() const { return 0; }
  int full_subfield() const { return (int)subfields_.size() - 1; }
  bool in_subfield(const FieldElem& e, int sub) const;
  // Index of the fixed field of the subgroup generated by `auts`.
  int fixed_subfield(const std::vector<int>& auts) const;

  std::string to_string(const FieldElem& e) const;

  friend bool operator==(const CoeffField& a, const CoeffField& b) {
    return a.kind_ == b.kind_ && a.p_ == b.p_ && a.m_ == b.m_ && a.d_ == b.d_;
  }

 private:
  CoeffField() = default;
  void init_galois_tables();
  void init_subfields();
  std::vector<Rat> frob_apply(int a, const std::vector<Rat>& c) const;

  FieldKind kind_ = FieldKind::Rationals;
  long p_ = 0;  // characteristic
  int m_ = 1;   // Galois extension degree
  long d_ = 0;  // quadratic radicand
  int deg_ = 1;
  std::vector<long> irred_;
  // frob_pow_[a] is the matrix of frob^a in the power basis, column-major:
  // frob_pow_[a][j] = image of t^j.
  std::vector<std::vector<std::vector<long>>> frob_pow_;
  std::vector<Subfield> subfields_;
};

}  // namespace gpd

#endif
