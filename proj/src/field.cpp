#include "field.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "linalg.hpp"

namespace gpd {

namespace {

bool is_prime(long n) {
  if (n < 2) return false;
  for (long k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

bool is_squarefree(long d) {
  long a = d < 0 ? -d : d;
  for (long k = 2; k * k <= a; ++k)
    if (a % (k * k) == 0) return false;
  return true;
}

long mod_pos(long v, long p) {
  v %= p;
  return v < 0 ? v + p : v;
}

// Dense polynomials over GF(p), coefficients low to high.
using Poly = std::vector<long>;

void poly_trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo monic b.
Poly poly_rem(Poly a, const Poly& b, long p) {
  assert(!b.empty() && b.back() == 1);
  int db = (int)b.size() - 1;
  poly_trim(a);
  while ((int)a.size() - 1 >= db) {
    long c = a.back();
    int shift = (int)a.size() - 1 - db;
    if (c != 0)
      for (int j = 0; j <= db; ++j)
        a[shift + j] = mod_pos(a[shift + j] - c * b[j], p);
    a.pop_back();
    poly_trim(a);
  }
  return a;
}

Poly poly_mul(const Poly& a, const Poly& b, long p) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      c[i + j] = mod_pos(c[i + j] + a[i] * b[j], p);
  return c;
}

Poly poly_pow_mod(Poly base, unsigned long e, const Poly& mod, long p) {
  Poly r = {1};
  base = poly_rem(std::move(base), mod, p);
  while (e) {
    if (e & 1) r = poly_rem(poly_mul(r, base, p), mod, p);
    base = poly_rem(poly_mul(base, base, p), mod, p);
    e >>= 1;
  }
  return r;
}

bool poly_has_root(const Poly& a, long p) {
  for (long x = 0; x < p; ++x) {
    long v = 0, pw = 1;
    for (long c : a) {
      v = mod_pos(v + c * pw, p);
      pw = mod_pos(pw * x, p);
    }
    if (v == 0) return true;
  }
  return false;
}

// Degree <= 4 suffices: no roots rules out all factorizations except
// quadratic * quadratic, which only matters at degree 4.
bool poly_is_irreducible(const Poly& a, long p) {
  int deg = (int)a.size() - 1;
  assert(deg >= 1 && deg <= 4 && a.back() == 1);
  if (deg == 1) return true;
  if (poly_has_root(a, p)) return false;
  if (deg < 4) return true;
  for (long c1 = 0; c1 < p; ++c1)
    for (long c0 = 0; c0 < p; ++c0) {
      Poly q = {c0, c1, 1};
      if (poly_has_root(q, p)) continue;
      Poly r = poly_rem(a, q, p);
      if (r.empty()) return false;
    }
  return true;
}

// Least monic irreducible of degree m, ordering the non-leading coefficient
// tuples (a_{m-1}, ..., a_1, a_0) lexicographically.
Poly least_irreducible(long p, int m) {
  long total = 1;
  for (int i = 0; i < m; ++i) total *= p;
  for (long n = 0; n < total; ++n) {
    Poly a(m + 1, 0);
    a[m] = 1;
    long v = n;
    for (int i = 0; i < m; ++i) {
      a[i] = v % p;
      v /= p;
    }
    if (poly_is_irreducible(a, p)) return a;
  }
  assert(false && "no irreducible polynomial found");
  return {};
}

long elem_coord(const Rat& r) {
  assert(r.get_den() == 1);
  return r.get_num().get_si();
}

}  // namespace

CoeffField CoeffField::rationals() {
  CoeffField f;
  f.kind_ = FieldKind::Rationals;
  f.deg_ = 1;
  f.init_subfields();
  return f;
}

CoeffField CoeffField::quadratic(long d) {
  assert(d != 0 && d != 1 && is_squarefree(d));
  CoeffField f;
  f.kind_ = FieldKind::Quadratic;
  f.d_ = d;
  f.deg_ = 2;
  f.init_subfields();
  return f;
}

CoeffField CoeffField::galois(long p, int m) {
  assert(is_prime(p) && m >= 1 && m <= 4);
  CoeffField f;
  f.kind_ = FieldKind::Galois;
  f.p_ = p;
  f.m_ = m;
  f.deg_ = m;
  f.init_galois_tables();
  f.init_subfields();
  return f;
}

void CoeffField::init_galois_tables() {
  irred_ = least_irreducible(p_, m_);
  // frob(t^j) = t^{j p} mod irred; frobenius is GF(p)-linear, so powers of
  // the automorphism compose as matrix products.
  std::vector<std::vector<long>> frob(m_);
  for (int j = 0; j < m_; ++j) {
    Poly img = poly_pow_mod({0, 1}, (unsigned long)j * (unsigned long)p_,
                            irred_, p_);
    img.resize(m_, 0);
    frob[j] = img;
  }
  frob_pow_.resize(m_);
  frob_pow_[0].assign(m_, std::vector<long>(m_, 0));
  for (int j = 0; j < m_; ++j) frob_pow_[0][j][j] = 1;
  for (int a = 1; a < m_; ++a) {
    frob_pow_[a].assign(m_, std::vector<long>(m_, 0));
    for (int j = 0; j < m_; ++j)
      for (int k = 0; k < m_; ++k)
        for (int i = 0; i < m_; ++i)
          frob_pow_[a][j][i] = mod_pos(
              frob_pow_[a][j][i] + frob[k][i] * frob_pow_[a - 1][j][k], p_);
  }
}

void CoeffField::init_subfields() {
  subfields_.clear();
  switch (kind_) {
    case FieldKind::Rationals:
      subfields_.push_back({"Q", 1, {0}, {one()}});
      break;
    case FieldKind::Quadratic:
      subfields_.push_back({"Q", 1, {0, 1}, {one()}});
      subfields_.push_back({name(), 2, {0}, {one(), gen()}});
      break;
    case FieldKind::Galois: {
      PrimeCtx ctx{p_};
      for (int d = 1; d <= m_; ++d) {
        if (m_ % d != 0) continue;
        Subfield s;
        long q = 1;
        for (int i = 0; i < d; ++i) q *= p_;
        s.name = "GF(" + std::to_string(q) + ")";
        s.degree = d;
        for (int a = 0; a < m_; ++a)
          if (a % d == 0) s.fixing_auts.push_back(a);
        Mat a(m_, Vec(m_, Rat(0)));
        for (int i = 0; i < m_; ++i)
          for (int j = 0; j < m_; ++j) {
            long v = frob_pow_[d % m_][j][i] - (i == j ? 1 : 0);
            a[i][j] = mod_pos(v, p_);
          }
        for (const auto& row : kernel_basis(a, ctx)) {
          FieldElem e;
          e.c = row;
          s.basis.push_back(std::move(e));
        }
        subfields_.push_back(std::move(s));
      }
      break;
    }
  }
}

std::optional<CoeffField> CoeffField::parse(const std::string& spec,
                                            std::string* err) {
  auto fail = [&](const std::string& m) -> std::optional<CoeffField> {
    if (err) *err = m;
    return std::nullopt;
  };
  std::string s;
  for (char c : spec)
    if (!isspace((unsigned char)c)) s += c;
  if (s == "Q") return rationals();
  if (s == "Q(i)") return quadratic(-1);
  if (s.rfind("Q(sqrt", 0) == 0 && s.size() > 7 && s.back() == ')') {
    std::string inner = s.substr(6, s.size() - 7);
    if (!inner.empty() && inner.front() == '(' && inner.back() == ')')
      inner = inner.substr(1, inner.size() - 2);
    char* end = nullptr;
    long d = strtol(inner.c_str(), &end, 10);
    if (inner.empty() || *end != '\0')
      return fail("bad radicand in '" + spec + "'");
    if (d == 0 || d == 1 || !is_squarefree(d))
      return fail("radicand must be squarefree and not 0 or 1");
    return quadratic(d);
  }
  if (s.rfind("GF(", 0) == 0 && s.back() == ')') {
    std::string inner = s.substr(3, s.size() - 4);
    long p = 0, m = 1;
    auto caret = inner.find('^');
    char* end = nullptr;
    if (caret != std::string::npos) {
      p = strtol(inner.substr(0, caret).c_str(), &end, 10);
      if (*end != '\0') return fail("bad field order in '" + spec + "'");
      m = strtol(inner.substr(caret + 1).c_str(), &end, 10);
      if (*end != '\0') return fail("bad field order in '" + spec + "'");
    } else {
      long q = strtol(inner.c_str(), &end, 10);
      if (inner.empty() || *end != '\0' || q < 2)
        return fail("bad field order in '" + spec + "'");
      p = 2;
      while (p <= q && q % p != 0) ++p;
      long r = q;
      m = 0;
      while (r % p == 0) {
        r /= p;
        ++m;
      }
      if (r != 1) return fail("field order must be a prime power");
    }
    if (!is_prime(p)) return fail("field characteristic must be prime");
    if (m < 1 || m > 4) return fail("extension degree must be 1..4");
    return galois(p, (int)m);
  }
  return fail("unrecognized field '" + spec + "'");
}

std::string CoeffField::name() const {
  switch (kind_) {
    case FieldKind::Rationals:
      return "Q";
    case FieldKind::Quadratic:
      return d_ == -1 ? "Q(i)" : "Q(sqrt " + std::to_string(d_) + ")";
    case FieldKind::Galois: {
      long q = 1;
      for (int i = 0; i < m_; ++i) q *= p_;
      return "GF(" + std::to_string(q) + ")";
    }
  }
  return "?";
}

FieldElem CoeffField::zero() const {
  FieldElem e;
  e.c.assign(deg_, Rat(0));
  return e;
}

FieldElem CoeffField::one() const { return from_int(1); }

FieldElem CoeffField::from_int(long v) const {
  FieldElem e = zero();
  e.c[0] = kind_ == FieldKind::Galois ? Rat(mod_pos(v, p_)) : Rat(v);
  return e;
}

FieldElem CoeffField::from_rat(const Rat& v) const {
  FieldElem e = zero();
  if (kind_ == FieldKind::Galois) {
    PrimeCtx ctx{p_};
    e.c[0] = ctx.norm(v);
  } else {
    e.c[0] = v;
    e.c[0].canonicalize();
  }
  return e;
}

FieldElem CoeffField::basis_elem(int k) const {
  assert(k >= 0 && k < deg_);
  FieldElem e = zero();
  e.c[k] = 1;
  return e;
}

FieldElem CoeffField::gen() const {
  return deg_ == 1 ? one() : basis_elem(1);
}

FieldElem CoeffField::add(const FieldElem& a, const FieldElem& b) const {
  assert((int)a.c.size() == deg_ && (int)b.c.size() == deg_);
  FieldElem r = zero();
  for (int i = 0; i < deg_; ++i) {
    r.c[i] = a.c[i] + b.c[i];
    if (kind_ == FieldKind::Galois)
      r.c[i] = Rat(mod_pos(elem_coord(r.c[i]), p_));
    else
      r.c[i].canonicalize();
  }
  return r;
}

FieldElem CoeffField::sub(const FieldElem& a, const FieldElem& b) const {
  return add(a, neg(b));
}

FieldElem CoeffField::neg(const FieldElem& a) const {
  FieldElem r = zero();
  for (int i = 0; i < deg_; ++i)
    r.c[i] = kind_ == FieldKind::Galois
                 ? Rat(mod_pos(-elem_coord(a.c[i]), p_))
                 : Rat(-a.c[i]);
  return r;
}

FieldElem CoeffField::mul(const FieldElem& a, const FieldElem& b) const {
  assert((int)a.c.size() == deg_ && (int)b.c.size() == deg_);
  FieldElem r = zero();
  switch (kind_) {
    case FieldKind::Rationals:
      r.c[0] = a.c[0] * b.c[0];
      r.c[0].canonicalize();
      break;
    case FieldKind::Quadratic:
      r.c[0] = a.c[0] * b.c[0] + d_ * a.c[1] * b.c[1];
      r.c[1] = a.c[0] * b.c[1] + a.c[1] * b.c[0];
      r.c[0].canonicalize();
      r.c[1].canonicalize();
      break;
    case FieldKind::Galois: {
      Poly pa(deg_), pb(deg_);
      for (int i = 0; i < deg_; ++i) {
        pa[i] = elem_coord(a.c[i]);
        pb[i] = elem_coord(b.c[i]);
      }
      Poly pr = poly_rem(poly_mul(pa, pb, p_), irred_, p_);
      pr.resize(deg_, 0);
      for (int i = 0; i < deg_; ++i) r.c[i] = Rat(pr[i]);
      break;
    }
  }
  return r;
}

FieldElem CoeffField::inv(const FieldElem& a) const {
  assert(!is_zero(a));
  switch (kind_) {
    case FieldKind::Rationals: {
      FieldElem r = zero();
      r.c[0] = Rat(1) / a.c[0];
      return r;
    }
    case FieldKind::Quadratic: {
      Rat n = a.c[0] * a.c[0] - d_ * a.c[1] * a.c[1];
      FieldElem r = zero();
      r.c[0] = a.c[0] / n;
      r.c[1] = -a.c[1] / n;
      r.c[0].canonicalize();
      r.c[1].canonicalize();
      return r;
    }
    case FieldKind::Galois: {
      unsigned long q = 1;
      for (int i = 0; i < m_; ++i) q *= (unsigned long)p_;
      return pow(a, q - 2);
    }
  }
  return zero();
}

FieldElem CoeffField::div(const FieldElem& a, const FieldElem& b) const {
  return mul(a, inv(b));
}

FieldElem CoeffField::scale(const Rat& r, const FieldElem& a) const {
  FieldElem out = zero();
  if (kind_ == FieldKind::Galois) {
    PrimeCtx ctx{p_};
    Rat rr = ctx.norm(r);
    for (int i = 0; i < deg_; ++i) out.c[i] = ctx.mul(rr, a.c[i]);
  } else {
    for (int i = 0; i < deg_; ++i) {
      out.c[i] = r * a.c[i];
      out.c[i].canonicalize();
    }
  }
  return out;
}

FieldElem CoeffField::pow(const FieldElem& a, unsigned long e) const {
  FieldElem r = one();
  FieldElem base = a;
  while (e) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

bool CoeffField::is_zero(const FieldElem& a) const {
  for (const auto& x : a.c)
    if (x != 0) return false;
  return true;
}

bool CoeffField::is_one(const FieldElem& a) const { return a == one(); }

int CoeffField::aut_count() const {
  switch (kind_) {
    case FieldKind::Rationals:
      return 1;
    case FieldKind::Quadratic:
      return 2;
    case FieldKind::Galois:
      return m_;
  }
  return 1;
}

std::vector<Rat> CoeffField::frob_apply(int a, const std::vector<Rat>& c) const {
  std::vector<long> out(m_, 0);
  for (int j = 0; j < m_; ++j) {
    long cj = elem_coord(c[j]);
    for (int i = 0; i < m_; ++i)
      out[i] = mod_pos(out[i] + cj * frob_pow_[a][j][i], p_);
  }
  std::vector<Rat> r(m_);
  for (int i = 0; i < m_; ++i) r[i] = Rat(out[i]);
  return r;
}

FieldElem CoeffField::apply_aut(int a, const FieldElem& e) const {
  assert(a >= 0 && a < aut_count());
  if (a == 0) return e;
  FieldElem r = e;
  if (kind_ == FieldKind::Quadratic) {
    r.c[1] = -r.c[1];
    return r;
  }
  r.c = frob_apply(a, e.c);
  return r;
}

int CoeffField::aut_compose(int a, int b) const {
  return (a + b) % aut_count();
}

int CoeffField::aut_inverse(int a) const {
  return (aut_count() - a) % aut_count();
}

std::string CoeffField::aut_name(int a) const {
  assert(a >= 0 && a < aut_count());
  if (a == 0) return "id";
  if (kind_ == FieldKind::Quadratic) return "conj";
  return a == 1 ? "frob" : "frob^" + std::to_string(a);
}

std::optional<int> CoeffField::aut_by_name(const std::string& name) const {
  if (name == "id") return 0;
  if (kind_ == FieldKind::Quadratic && name == "conj") return 1;
  if (kind_ == FieldKind::Galois) {
    if (name == "frob") return 1 % m_;
    if (name.rfind("frob^", 0) == 0) {
      char* end = nullptr;
      long k = strtol(name.c_str() + 5, &end, 10);
      if (*end == '\0' && k >= 0) return (int)(k % m_);
    }
  }
  return std::nullopt;
}

bool CoeffField::in_subfield(const FieldElem& e, int sub) const {
  assert(sub >= 0 && sub < (int)subfields_.size());
  for (int a : subfields_[sub].fixing_auts)
    if (!(apply_aut(a, e) == e)) return false;
  return true;
}

int CoeffField::fixed_subfield(const std::vector<int>& auts) const {
  switch (kind_) {
    case FieldKind::Rationals:
      return 0;
    case FieldKind::Quadratic:
      for (int a : auts)
        if (a % 2 == 1) return 0;
      return 1;
    case FieldKind::Galois: {
      long g = m_;
      for (int a : auts) g = std::gcd(g, (long)(a % m_));
      for (int i = 0; i < (int)subfields_.size(); ++i)
        if (subfields_[i].degree == g) return i;
      assert(false && "missing subfield");
      return 0;
    }
  }
  return 0;
}

std::string CoeffField::to_string(const FieldElem& e) const {
  switch (kind_) {
    case FieldKind::Rationals:
      return e.c[0].get_str();
    case FieldKind::Quadratic: {
      std::string sym = d_ == -1 ? "i" : "sqrt" + std::to_string(d_);
      const Rat& a = e.c[0];
      const Rat& b = e.c[1];
      if (b == 0) return a.get_str();
      std::string out;
      if (a != 0) out = a.get_str();
      if (b > 0 && !out.empty()) out += "+";
      if (b == -1)
        out += "-";
      else if (b != 1)
        out += b.get_str();
      out += sym;
      return out;
    }
    case FieldKind::Galois: {
      std::string out;
      for (int j = deg_ - 1; j >= 0; --j) {
        long c = elem_coord(e.c[j]);
        if (c == 0) continue;
        if (!out.empty()) out += "+";
        if (j == 0 || c != 1) out += std::to_string(c);
        if (j >= 1) out += "t";
        if (j >= 2) out += "^" + std::to_string(j);
      }
      return out.empty() ? "0" : out;
    }
  }
  return "?";
}

}  // namespace gpd
