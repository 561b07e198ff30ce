#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "endring/arith.hpp"
#include "endring/errors.hpp"
#include "endring/rng.hpp"

namespace endring {

class Field;
class Level;

// Element of F_{p^2} = F_p[s]/(s^2 - nr), stored as a + b*s.
struct Fp2 {
  const Field* F = nullptr;
  u64 a = 0, b = 0;

  bool is_zero() const { return a == 0 && b == 0; }
  bool is_one() const { return a == 1 && b == 0; }
  bool in_prime_field() const { return b == 0; }
  bool operator==(const Fp2& o) const { return a == o.a && b == o.b; }
  bool operator!=(const Fp2& o) const { return !(*this == o); }
  bool operator<(const Fp2& o) const { return a != o.a ? a < o.a : b < o.b; }
};

// Element of a degree-k extension of F_{p^2}: coefficient i lives in
// words c[2i], c[2i+1].
struct Fq {
  const Level* L = nullptr;
  std::vector<u64> c;

  bool is_zero() const;
  bool is_one() const;
  bool operator==(const Fq& o) const { return c == o.c; }
  bool operator!=(const Fq& o) const { return c != o.c; }
};

class Field {
 public:
  // Throws NotPrime, TooSmall, or Unsupported (p must stay below 2^31).
  static std::shared_ptr<const Field> make(const Int& p);

  u64 p() const { return p_; }
  // F_{p^2} is defined by x^2 + c0; nonresidue() = -c0.
  u64 c0() const { return c0_; }
  u64 nonresidue() const { return nr_; }
  const Int& order() const { return q_; }

  Fp2 zero() const { return Fp2{this, 0, 0}; }
  Fp2 one() const { return Fp2{this, 1, 0}; }
  Fp2 gen() const { return Fp2{this, 0, 1}; }
  Fp2 make(u64 a, u64 b) const { return Fp2{this, a % p_, b % p_}; }
  Fp2 from_int(long long v) const;
  Fp2 from_int(const Int& v) const;
  Fp2 random(Rng& rng) const { return Fp2{this, rng.below(p_), rng.below(p_)}; }

  // F_{p^{2k}} as a degree-k extension of F_{p^2}; k = 1 is not a Level
  // (use the field itself). Built on first request and cached; safe to call
  // concurrently.
  const Level& level(int k) const;

  // Tonelli-Shanks data for F_{p^2}.
  const Fp2& non_square() const { return z_; }
  int two_adicity() const { return s_; }
  const Int& odd_part() const { return t_; }

 private:
  Field() = default;
  u64 p_ = 0, c0_ = 0, nr_ = 0;
  Int q_, t_;
  int s_ = 0;
  Fp2 z_;
  mutable std::mutex mu_;
  mutable std::map<int, std::unique_ptr<Level>> levels_;
};

using FieldPtr = std::shared_ptr<const Field>;

// ---- F_{p^2} arithmetic -------------------------------------------------

inline Fp2 operator+(const Fp2& x, const Fp2& y) {
  u64 p = x.F ? x.F->p() : y.F->p();
  u64 a = x.a + y.a, b = x.b + y.b;
  if (a >= p) a -= p;
  if (b >= p) b -= p;
  return Fp2{x.F ? x.F : y.F, a, b};
}
inline Fp2 operator-(const Fp2& x, const Fp2& y) {
  u64 p = x.F ? x.F->p() : y.F->p();
  u64 a = x.a >= y.a ? x.a - y.a : x.a + p - y.a;
  u64 b = x.b >= y.b ? x.b - y.b : x.b + p - y.b;
  return Fp2{x.F ? x.F : y.F, a, b};
}
inline Fp2 operator-(const Fp2& x) {
  u64 p = x.F->p();
  return Fp2{x.F, x.a ? p - x.a : 0, x.b ? p - x.b : 0};
}
inline Fp2 operator*(const Fp2& x, const Fp2& y) {
  const Field* F = x.F ? x.F : y.F;
  u64 p = F->p();
  u64 bd = x.b * y.b % p;
  u64 a = (x.a * y.a + F->nonresidue() * bd) % p;
  u64 b = (x.a * y.b + x.b * y.a) % p;
  return Fp2{F, a, b};
}
inline Fp2& operator+=(Fp2& x, const Fp2& y) { return x = x + y; }
inline Fp2& operator-=(Fp2& x, const Fp2& y) { return x = x - y; }
inline Fp2& operator*=(Fp2& x, const Fp2& y) { return x = x * y; }

Fp2 inv(const Fp2& x);
inline Fp2 operator/(const Fp2& x, const Fp2& y) { return x * inv(y); }
Fp2 pow(const Fp2& x, const Int& e);
Fp2 pow(const Fp2& x, u64 e);
inline Fp2 frobenius(const Fp2& x) { return Fp2{x.F, x.a, x.b ? x.F->p() - x.b : 0}; }
inline Fp2 scale(const Fp2& x, const Fp2& s) { return x * s; }
bool is_square(const Fp2& x);
bool sqrt(const Fp2& x, Fp2* root);
Fp2 norm_to_prime(const Fp2& x);

// ---- tower levels -------------------------------------------------------

class Level {
 public:
  // `modulus` is monic of degree k >= 2 and must be irreducible over F_{p^2}
  // (not checked here; see is_irreducible).
  Level(const Field* F, std::vector<Fp2> modulus);

  int k() const { return k_; }
  const Field& field() const { return *F_; }
  const Int& order() const { return q_; }
  const std::vector<Fp2>& modulus() const { return mod_; }

  Fq zero() const;
  Fq one() const;
  Fq gen() const;  // the class of X
  Fq lift(const Fp2& x) const;
  Fq from_coeffs(const std::vector<Fp2>& c) const;
  Fq random(Rng& rng) const;
  Fp2 coeff(const Fq& x, int i) const { return Fp2{F_, x.c[2 * i], x.c[2 * i + 1]}; }
  bool in_base(const Fq& x) const;
  Fp2 descend(const Fq& x) const;  // requires in_base

  Fq add(const Fq& x, const Fq& y) const;
  Fq sub(const Fq& x, const Fq& y) const;
  Fq neg(const Fq& x) const;
  Fq mul(const Fq& x, const Fq& y) const;
  Fq scale(const Fq& x, const Fp2& s) const;
  Fq inv(const Fq& x) const;
  Fq frobenius(const Fq& x) const;

  const Fq& non_square() const { return z_; }
  int two_adicity() const { return s_; }
  const Int& odd_part() const { return t_; }

 private:
  void reduce(std::vector<u64>& t) const;
  const Field* F_;
  int k_;
  std::vector<Fp2> mod_;
  std::vector<int> mod_support_;  // indices j < k with mod_[j] != 0
  Int q_, t_;
  int s_ = 0;
  Fq z_;
  std::vector<Fq> frob_;  // (X^i)^p
};

inline Fq operator+(const Fq& x, const Fq& y) { return x.L->add(x, y); }
inline Fq operator-(const Fq& x, const Fq& y) { return x.L->sub(x, y); }
inline Fq operator-(const Fq& x) { return x.L->neg(x); }
inline Fq operator*(const Fq& x, const Fq& y) { return x.L->mul(x, y); }
inline Fq& operator+=(Fq& x, const Fq& y) { return x = x + y; }
inline Fq& operator-=(Fq& x, const Fq& y) { return x = x - y; }
inline Fq& operator*=(Fq& x, const Fq& y) { return x = x * y; }
inline Fq inv(const Fq& x) { return x.L->inv(x); }
inline Fq operator/(const Fq& x, const Fq& y) { return x * inv(y); }
inline Fq frobenius(const Fq& x) { return x.L->frobenius(x); }
inline Fq scale(const Fq& x, const Fp2& s) { return x.L->scale(x, s); }
Fq pow(const Fq& x, const Int& e);
bool sqrt(const Fq& x, Fq* root);

// ---- uniform access for generic code ------------------------------------

template <class T>
struct ElemTraits;

template <>
struct ElemTraits<Fp2> {
  using Ctx = const Field*;
  static Ctx ctx(const Fp2& x) { return x.F; }
  static Fp2 zero(Ctx c) { return c->zero(); }
  static Fp2 one(Ctx c) { return c->one(); }
  static Fp2 random(Ctx c, Rng& r) { return c->random(r); }
  static const Int& order(Ctx c) { return c->order(); }
  static const Field& field(Ctx c) { return *c; }
  static Fp2 lift(Ctx, const Fp2& x) { return x; }
};

template <>
struct ElemTraits<Fq> {
  using Ctx = const Level*;
  static Ctx ctx(const Fq& x) { return x.L; }
  static Fq zero(Ctx c) { return c->zero(); }
  static Fq one(Ctx c) { return c->one(); }
  static Fq random(Ctx c, Rng& r) { return c->random(r); }
  static const Int& order(Ctx c) { return c->order(); }
  static const Field& field(Ctx c) { return c->field(); }
  static Fq lift(Ctx c, const Fp2& x) { return c->lift(x); }
};

// ---- polynomials --------------------------------------------------------

template <class T>
struct Poly {
  using Ctx = typename ElemTraits<T>::Ctx;
  Ctx ctx{};
  std::vector<T> c;  // c[i] is the coefficient of X^i; no trailing zeros

  Poly() = default;
  explicit Poly(Ctx k) : ctx(k) {}
  Poly(Ctx k, std::vector<T> coeffs) : ctx(k), c(std::move(coeffs)) { trim(); }

  static Poly constant(const T& v) { return Poly(ElemTraits<T>::ctx(v), {v}); }
  static Poly monomial(Ctx k, int n) {
    std::vector<T> v(n + 1, ElemTraits<T>::zero(k));
    v[n] = ElemTraits<T>::one(k);
    return Poly(k, std::move(v));
  }
  static Poly x(Ctx k) { return monomial(k, 1); }
  static Poly linear_root(const T& r) {  // X - r
    auto k = ElemTraits<T>::ctx(r);
    return Poly(k, {-r, ElemTraits<T>::one(k)});
  }

  int deg() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.empty(); }
  T coeff(int i) const { return (i >= 0 && i <= deg()) ? c[i] : ElemTraits<T>::zero(ctx); }
  const T& lead() const { return c.back(); }
  void trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
  }
  bool operator==(const Poly& o) const { return c == o.c; }
  bool operator!=(const Poly& o) const { return c != o.c; }
};

template <class T>
Poly<T> operator+(const Poly<T>& f, const Poly<T>& g) {
  Poly<T> r(f.ctx ? f.ctx : g.ctx);
  size_t n = std::max(f.c.size(), g.c.size());
  r.c.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    if (i < f.c.size() && i < g.c.size())
      r.c.push_back(f.c[i] + g.c[i]);
    else
      r.c.push_back(i < f.c.size() ? f.c[i] : g.c[i]);
  }
  r.trim();
  return r;
}

template <class T>
Poly<T> operator-(const Poly<T>& f) {
  Poly<T> r(f.ctx);
  for (const auto& v : f.c) r.c.push_back(-v);
  return r;
}

template <class T>
Poly<T> operator-(const Poly<T>& f, const Poly<T>& g) {
  return f + (-g);
}

template <class T>
Poly<T> operator*(const Poly<T>& f, const Poly<T>& g) {
  Poly<T> r(f.ctx ? f.ctx : g.ctx);
  if (f.is_zero() || g.is_zero()) return r;
  r.c.assign(f.c.size() + g.c.size() - 1, ElemTraits<T>::zero(r.ctx));
  for (size_t i = 0; i < f.c.size(); ++i) {
    if (f.c[i].is_zero()) continue;
    for (size_t j = 0; j < g.c.size(); ++j) r.c[i + j] += f.c[i] * g.c[j];
  }
  r.trim();
  return r;
}

template <class T>
Poly<T> operator*(const T& s, const Poly<T>& f) {
  Poly<T> r(f.ctx);
  for (const auto& v : f.c) r.c.push_back(s * v);
  r.trim();
  return r;
}

template <class T>
void divmod(const Poly<T>& f, const Poly<T>& g, Poly<T>* q, Poly<T>* r) {
  if (g.is_zero()) throw std::domain_error("polynomial division by zero");
  Poly<T> rem = f;
  auto ctx = f.ctx ? f.ctx : g.ctx;
  rem.ctx = ctx;
  Poly<T> quo(ctx);
  int dg = g.deg();
  if (rem.deg() >= dg) quo.c.assign(rem.deg() - dg + 1, ElemTraits<T>::zero(ctx));
  T linv = inv(g.lead());
  while (!rem.is_zero() && rem.deg() >= dg) {
    int s = rem.deg() - dg;
    T coef = rem.lead() * linv;
    quo.c[s] = coef;
    for (int i = 0; i <= dg; ++i) rem.c[s + i] -= coef * g.c[i];
    rem.c.pop_back();
    rem.trim();
  }
  quo.trim();
  if (q) *q = std::move(quo);
  if (r) *r = std::move(rem);
}

template <class T>
Poly<T> operator%(const Poly<T>& f, const Poly<T>& g) {
  Poly<T> r;
  divmod<T>(f, g, nullptr, &r);
  return r;
}

template <class T>
Poly<T> operator/(const Poly<T>& f, const Poly<T>& g) {
  Poly<T> q;
  divmod<T>(f, g, &q, nullptr);
  return q;
}

template <class T>
Poly<T> monic(const Poly<T>& f) {
  if (f.is_zero()) return f;
  return inv(f.lead()) * f;
}

template <class T>
Poly<T> gcd(Poly<T> f, Poly<T> g) {
  while (!g.is_zero()) {
    Poly<T> r = f % g;
    f = std::move(g);
    g = std::move(r);
  }
  return monic(f);
}

// Inverse of f modulo m, or false when gcd(f, m) != 1.
template <class T>
bool invmod(const Poly<T>& f, const Poly<T>& m, Poly<T>* out) {
  Poly<T> r0 = m, r1 = f % m;
  Poly<T> s0(m.ctx), s1 = Poly<T>::constant(ElemTraits<T>::one(m.ctx));
  while (!r1.is_zero() && r1.deg() > 0) {
    Poly<T> q, r;
    divmod(r0, r1, &q, &r);
    r0 = std::move(r1);
    r1 = std::move(r);
    Poly<T> s = s0 - q * s1;
    s0 = std::move(s1);
    s1 = std::move(s);
  }
  if (r1.is_zero()) return false;
  *out = (inv(r1.c[0]) * s1) % m;
  return true;
}

template <class T>
Poly<T> mulmod(const Poly<T>& f, const Poly<T>& g, const Poly<T>& m) {
  return (f * g) % m;
}

template <class T>
Poly<T> powmod(const Poly<T>& base, const Int& e, const Poly<T>& m) {
  Poly<T> result = Poly<T>::constant(ElemTraits<T>::one(m.ctx)) % m;
  Poly<T> b = base % m;
  size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (size_t i = bits; i-- > 0;) {
    result = mulmod(result, result, m);
    if (mpz_tstbit(e.get_mpz_t(), i)) result = mulmod(result, b, m);
  }
  return result;
}

template <class T>
T eval(const Poly<T>& f, const T& x) {
  if (f.is_zero()) return ElemTraits<T>::zero(ElemTraits<T>::ctx(x));
  T acc = f.c.back();
  for (int i = f.deg() - 1; i >= 0; --i) acc = acc * x + f.c[i];
  return acc;
}

// Evaluates an F_{p^2} polynomial at an element of any level.
inline Fp2 eval_at(const Poly<Fp2>& f, const Fp2& x) { return eval(f, x); }
Fq eval_at(const Poly<Fp2>& f, const Fq& x);

template <class T>
Poly<T> derivative(const Poly<T>& f) {
  Poly<T> r(f.ctx);
  for (int i = 1; i <= f.deg(); ++i) {
    T v = ElemTraits<T>::zero(f.ctx);
    T ci = f.c[i];
    // i * c_i by repeated doubling keeps this independent of the element type
    T acc = ci;
    int n = i;
    while (n) {
      if (n & 1) v += acc;
      acc += acc;
      n >>= 1;
    }
    r.c.push_back(v);
  }
  r.trim();
  return r;
}

// Substitutes an element of the quotient ring: f(a) mod m.
template <class T>
Poly<T> compose_mod(const Poly<T>& f, const Poly<T>& a, const Poly<T>& m) {
  Poly<T> acc(m.ctx);
  for (int i = f.deg(); i >= 0; --i) acc = (mulmod(acc, a, m) + Poly<T>::constant(f.c[i])) % m;
  return acc;
}

Poly<Fq> lift(const Poly<Fp2>& f, const Level& L);
Poly<Fp2> frobenius(const Poly<Fp2>& f);

// ---- root finding and factoring ------------------------------------------

template <class T>
bool sqrt_generic(const T& x, T* root) {
  return sqrt(x, root);
}

namespace detail {

template <class T>
void split_roots(const Poly<T>& g, Rng& rng, std::vector<T>& out) {
  using Tr = ElemTraits<T>;
  if (g.deg() <= 0) return;
  if (g.deg() == 1) {
    out.push_back(-(g.c[0] * inv(g.c[1])));
    return;
  }
  if (g.deg() == 2) {
    // monic quadratic with two distinct roots in the field
    T two_inv = inv(Tr::one(g.ctx) + Tr::one(g.ctx));
    T b = g.c[1] * inv(g.c[2]), c = g.c[0] * inv(g.c[2]);
    T disc = b * b - (c + c + c + c);
    T s;
    if (sqrt(disc, &s)) {
      out.push_back((-b + s) * two_inv);
      out.push_back((-b - s) * two_inv);
      return;
    }
  }
  Int e = (Tr::order(g.ctx) - 1) / 2;
  for (;;) {
    T delta = Tr::random(g.ctx, rng);
    Poly<T> base(g.ctx, {delta, Tr::one(g.ctx)});
    Poly<T> h = powmod(base, e, g) - Poly<T>::constant(Tr::one(g.ctx));
    Poly<T> d = gcd(h, g);
    if (d.deg() > 0 && d.deg() < g.deg()) {
      split_roots(d, rng, out);
      split_roots(g / d, rng, out);
      return;
    }
  }
}

template <class T>
void split_equal_degree(const Poly<T>& g, int d, Rng& rng, std::vector<Poly<T>>& out) {
  using Tr = ElemTraits<T>;
  if (g.deg() == d) {
    out.push_back(monic(g));
    return;
  }
  Int qd;
  mpz_pow_ui(qd.get_mpz_t(), Tr::order(g.ctx).get_mpz_t(), d);
  Int e = (qd - 1) / 2;
  for (;;) {
    std::vector<T> coeffs;
    for (int i = 0; i < g.deg(); ++i) coeffs.push_back(Tr::random(g.ctx, rng));
    Poly<T> a(g.ctx, coeffs);
    if (a.deg() <= 0) continue;
    Poly<T> h = powmod(a, e, g) - Poly<T>::constant(Tr::one(g.ctx));
    Poly<T> f = gcd(h, g);
    if (f.deg() > 0 && f.deg() < g.deg()) {
      split_equal_degree(f, d, rng, out);
      split_equal_degree(monic(g / f), d, rng, out);
      return;
    }
  }
}

}  // namespace detail

// Distinct roots of f in the coefficient field.
template <class T>
std::vector<T> roots(const Poly<T>& f_in, Rng& rng) {
  using Tr = ElemTraits<T>;
  std::vector<T> out;
  if (f_in.deg() <= 0) return out;
  Poly<T> f = monic(f_in);
  Poly<T> xq = powmod(Poly<T>::x(f.ctx), Tr::order(f.ctx), f);
  Poly<T> g = gcd(xq - Poly<T>::x(f.ctx), f);
  detail::split_roots(g, rng, out);
  return out;
}

// Roots with multiplicity, as a flat multiset sorted canonically for Fp2.
template <class T>
std::vector<T> roots_with_multiplicity(const Poly<T>& f, Rng& rng) {
  std::vector<T> out;
  for (const T& r : roots(f, rng)) {
    Poly<T> g = f;
    Poly<T> lin = Poly<T>::linear_root(r);
    for (;;) {
      Poly<T> q, rem;
      divmod(g, lin, &q, &rem);
      if (!rem.is_zero()) break;
      out.push_back(r);
      g = std::move(q);
    }
  }
  return out;
}

// Irreducible monic factors of a squarefree polynomial.
template <class T>
std::vector<Poly<T>> factor_squarefree(const Poly<T>& f_in, Rng& rng) {
  using Tr = ElemTraits<T>;
  std::vector<Poly<T>> out;
  Poly<T> f = monic(f_in);
  Poly<T> X = Poly<T>::x(f.ctx);
  Poly<T> h = X;
  for (int d = 1; f.deg() >= 2 * d; ++d) {
    h = powmod(h, Tr::order(f.ctx), f);
    Poly<T> g = gcd(h - X, f);
    if (g.deg() > 0) {
      detail::split_equal_degree(g, d, rng, out);
      f = monic(f / g);
      h = h % f;
    }
  }
  if (f.deg() > 0) out.push_back(f);
  return out;
}

Poly<Fp2> squarefree_part(const Poly<Fp2>& f);

bool is_irreducible(const Poly<Fp2>& f);

// Roots of an F_{p^2}-polynomial inside F_{p^{2k}} (k = 1 allowed via Fp2).
std::vector<Fq> roots_in_level(const Poly<Fp2>& f, const Level& L, Rng& rng);

std::string to_string(const Fp2& x);

}  // namespace endring
