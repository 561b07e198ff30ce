#include "endring/fields.hpp"

#include <sstream>

namespace endring {

namespace {

using u128 = unsigned __int128;

template <class T, class One>
bool tonelli_shanks(const T& x, T* root, const T& z, int s, const Int& t, const One& one) {
  if (x.is_zero()) {
    *root = x;
    return true;
  }
  int m = s;
  T c = pow(z, t);
  T tt = pow(x, t);
  T r = pow(x, Int((t + 1) / 2));
  while (!(tt == one)) {
    int i = 0;
    T w = tt;
    while (!(w == one)) {
      w = w * w;
      if (++i == m) return false;
    }
    T b = c;
    for (int j = 0; j < m - i - 1; ++j) b = b * b;
    m = i;
    c = b * b;
    tt = tt * c;
    r = r * b;
  }
  *root = r;
  return true;
}

void split_two_power(const Int& n, int* s, Int* t) {
  *t = n;
  *s = 0;
  while (mpz_even_p(t->get_mpz_t())) {
    *t >>= 1;
    ++*s;
  }
}

}  // namespace

// ---- Field --------------------------------------------------------------

std::shared_ptr<const Field> Field::make(const Int& p) {
  if (p <= 3) fail("TooSmall", "p must exceed 3, got " + to_string(p));
  if (!is_prime(p)) fail("NotPrime", to_string(p) + " is not prime");
  if (p >= Int(1) << 31) fail("Unsupported", "p must be below 2^31");
  std::shared_ptr<Field> F(new Field());
  F->p_ = p.get_ui();
  // x^2 + c0 with the smallest c0 making -c0 a non-residue
  u64 pp = F->p_;
  for (u64 c0 = 1; c0 < pp; ++c0) {
    u64 v = pp - c0;
    if (powmod64(v, (pp - 1) / 2, pp) == pp - 1) {
      F->c0_ = c0;
      F->nr_ = v;
      break;
    }
  }
  F->q_ = p * p;
  split_two_power(F->q_ - 1, &F->s_, &F->t_);
  Int e = (F->q_ - 1) / 2;
  for (u64 n = 1;; ++n) {
    Fp2 z = F->make(n % pp, n / pp + 1);
    if (!(pow(z, e) == F->one())) {
      F->z_ = z;
      break;
    }
  }
  return F;
}

Fp2 Field::from_int(long long v) const {
  long long r = v % static_cast<long long>(p_);
  if (r < 0) r += p_;
  return Fp2{this, static_cast<u64>(r), 0};
}

Fp2 Field::from_int(const Int& v) const {
  Int r = v % Int(static_cast<unsigned long>(p_));
  if (r < 0) r += static_cast<unsigned long>(p_);
  return Fp2{this, r.get_ui(), 0};
}

const Level& Field::level(int k) const {
  if (k < 2) throw std::invalid_argument("level(k) requires k >= 2");
  std::lock_guard<std::mutex> lock(mu_);
  auto it = levels_.find(k);
  if (it != levels_.end()) return *it->second;
  // lexicographic search, constant coefficient least significant
  Int base = q_;
  // X^k + c is only ever irreducible when every prime r | k divides q - 1
  // (and q = 1 mod 4 when 4 | k); otherwise skip straight to c1 = 1
  bool binomials = k % 4 != 0 || (q_ - 1) % 4 == 0;
  for (int r = 2, m = k; r <= m; ++r) {
    if (m % r) continue;
    while (m % r == 0) m /= r;
    if ((q_ - 1) % r != 0) binomials = false;
  }
  std::vector<u64> binomial_exps;
  for (int r = 2, m = k; r <= m; ++r) {
    if (m % r) continue;
    while (m % r == 0) m /= r;
    binomial_exps.push_back(Int((q_ - 1) / r).get_ui());
  }
  Int start = binomials ? Int(1) : base;
  for (Int n = start;; ++n) {
    if (n < base) {
      // X^k - a is irreducible iff a is not an r-th power for each prime r | k
      u64 dv = n.get_ui();
      Fp2 a = -Fp2{this, dv % p_, dv / p_};
      bool irreducible = true;
      for (u64 e : binomial_exps)
        if (pow(a, e).is_one()) irreducible = false;
      if (!irreducible) continue;
    }
    std::vector<Fp2> coeffs;
    Int m = n;
    for (int i = 0; i < k; ++i) {
      Int d = m % base;
      m /= base;
      u64 dv = d.get_ui();
      coeffs.push_back(Fp2{this, dv % p_, dv / p_});
    }
    if (m != 0) break;
    if (coeffs[0].is_zero()) continue;
    coeffs.push_back(one());
    Poly<Fp2> f(this, coeffs);
    if (is_irreducible(f)) {
      auto L = std::make_unique<Level>(this, coeffs);
      const Level& ref = *L;
      levels_.emplace(k, std::move(L));
      return ref;
    }
  }
  throw std::logic_error("no irreducible polynomial found");
}

// ---- F_{p^2} ------------------------------------------------------------

Fp2 inv(const Fp2& x) {
  if (x.is_zero()) throw std::domain_error("inverse of zero");
  u64 p = x.F->p();
  u64 n = (x.a * x.a + (p - x.F->nonresidue()) * (x.b * x.b % p)) % p;
  u64 ni = invmod64(n, p);
  return Fp2{x.F, x.a * ni % p, x.b ? (p - x.b) * ni % p : 0};
}

Fp2 pow(const Fp2& x, const Int& e) {
  if (e < 0) return pow(inv(x), Int(-e));
  Fp2 r = x.F->one();
  size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (size_t i = bits; i-- > 0;) {
    r = r * r;
    if (mpz_tstbit(e.get_mpz_t(), i)) r = r * x;
  }
  return r;
}

Fp2 pow(const Fp2& x, u64 e) {
  Fp2 r = x.F->one(), b = x;
  while (e) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

Fp2 norm_to_prime(const Fp2& x) { return x * frobenius(x); }

bool is_square(const Fp2& x) {
  if (x.is_zero()) return true;
  u64 p = x.F->p();
  u64 n = norm_to_prime(x).a;
  return powmod64(n, (p - 1) / 2, p) == 1;
}

bool sqrt(const Fp2& x, Fp2* root) {
  const Field& F = *x.F;
  return tonelli_shanks(x, root, F.non_square(), F.two_adicity(), F.odd_part(), F.one());
}

std::string to_string(const Fp2& x) {
  std::ostringstream os;
  os << x.a;
  if (x.b) os << "+" << x.b << "*s";
  return os.str();
}

// ---- levels -------------------------------------------------------------

bool Fq::is_zero() const {
  for (u64 w : c)
    if (w) return false;
  return true;
}

bool Fq::is_one() const {
  if (c.empty() || c[0] != 1) return false;
  for (size_t i = 1; i < c.size(); ++i)
    if (c[i]) return false;
  return true;
}

Level::Level(const Field* F, std::vector<Fp2> modulus) : F_(F), mod_(std::move(modulus)) {
  k_ = static_cast<int>(mod_.size()) - 1;
  for (int j = 0; j < k_; ++j)
    if (!mod_[j].is_zero()) mod_support_.push_back(j);
  mpz_pow_ui(q_.get_mpz_t(), F->order().get_mpz_t(), k_);
  split_two_power(q_ - 1, &s_, &t_);

  Poly<Fp2> f(F, mod_);
  Poly<Fp2> xp = powmod(Poly<Fp2>::x(F), Int(static_cast<unsigned long>(F->p())), f);
  Poly<Fp2> cur = Poly<Fp2>::constant(F->one());
  for (int i = 0; i < k_; ++i) {
    std::vector<Fp2> v(cur.c);
    v.resize(k_, F->zero());
    frob_.push_back(from_coeffs(v));
    cur = mulmod(cur, xp, f);
  }

  Int e = (q_ - 1) / 2;
  Rng rng(static_cast<u64>(k_));
  for (;;) {
    Fq z = random(rng);
    if (!z.is_zero() && !pow(z, e).is_one()) {
      z_ = z;
      break;
    }
  }
}

Fq Level::zero() const { return Fq{this, std::vector<u64>(2 * k_, 0)}; }

Fq Level::one() const {
  Fq r = zero();
  r.c[0] = 1;
  return r;
}

Fq Level::gen() const {
  Fq r = zero();
  r.c[2] = 1;
  return r;
}

Fq Level::lift(const Fp2& x) const {
  Fq r = zero();
  r.c[0] = x.a;
  r.c[1] = x.b;
  return r;
}

Fq Level::from_coeffs(const std::vector<Fp2>& v) const {
  Fq r = zero();
  for (size_t i = 0; i < v.size() && static_cast<int>(i) < k_; ++i) {
    r.c[2 * i] = v[i].a;
    r.c[2 * i + 1] = v[i].b;
  }
  return r;
}

Fq Level::random(Rng& rng) const {
  Fq r = zero();
  for (auto& w : r.c) w = rng.below(F_->p());
  return r;
}

bool Level::in_base(const Fq& x) const {
  for (size_t i = 2; i < x.c.size(); ++i)
    if (x.c[i]) return false;
  return true;
}

Fp2 Level::descend(const Fq& x) const {
  if (!in_base(x)) throw std::domain_error("element does not lie in F_{p^2}");
  return Fp2{F_, x.c[0], x.c[1]};
}

Fq Level::add(const Fq& x, const Fq& y) const {
  u64 p = F_->p();
  Fq r{this, std::vector<u64>(x.c.size())};
  for (size_t i = 0; i < x.c.size(); ++i) {
    u64 v = x.c[i] + y.c[i];
    r.c[i] = v >= p ? v - p : v;
  }
  return r;
}

Fq Level::sub(const Fq& x, const Fq& y) const {
  u64 p = F_->p();
  Fq r{this, std::vector<u64>(x.c.size())};
  for (size_t i = 0; i < x.c.size(); ++i) r.c[i] = x.c[i] >= y.c[i] ? x.c[i] - y.c[i] : x.c[i] + p - y.c[i];
  return r;
}

Fq Level::neg(const Fq& x) const {
  u64 p = F_->p();
  Fq r{this, std::vector<u64>(x.c.size())};
  for (size_t i = 0; i < x.c.size(); ++i) r.c[i] = x.c[i] ? p - x.c[i] : 0;
  return r;
}

void Level::reduce(std::vector<u64>& t) const {
  // t holds 2k-1 reduced F_{p^2} coefficients; fold the top ones down
  u64 p = F_->p();
  for (int i = 2 * k_ - 2; i >= k_; --i) {
    Fp2 ci{F_, t[2 * i], t[2 * i + 1]};
    if (ci.is_zero()) continue;
    for (int j : mod_support_) {
      Fp2 v = ci * mod_[j];
      int idx = i - k_ + j;
      u64& ta = t[2 * idx];
      u64& tb = t[2 * idx + 1];
      ta = ta >= v.a ? ta - v.a : ta + p - v.a;
      tb = tb >= v.b ? tb - v.b : tb + p - v.b;
    }
  }
  t.resize(2 * k_);
}

Fq Level::mul(const Fq& x, const Fq& y) const {
  u64 p = F_->p(), nr = F_->nonresidue();
  int n = 2 * k_ - 1;
  std::vector<u64> t(2 * n);
  for (int d = 0; d < n; ++d) {
    u128 aa = 0, bb = 0, ab = 0;
    int lo = d - k_ + 1 > 0 ? d - k_ + 1 : 0;
    int hi = d < k_ - 1 ? d : k_ - 1;
    for (int i = lo; i <= hi; ++i) {
      u64 xa = x.c[2 * i], xb = x.c[2 * i + 1];
      u64 ya = y.c[2 * (d - i)], yb = y.c[2 * (d - i) + 1];
      aa += static_cast<u128>(xa * ya);
      bb += static_cast<u128>(xb * yb);
      ab += static_cast<u128>(xa * yb + xb * ya);
    }
    u64 bbr = static_cast<u64>(bb % p);
    t[2 * d] = static_cast<u64>((aa + static_cast<u128>(bbr * nr)) % p);
    t[2 * d + 1] = static_cast<u64>(ab % p);
  }
  reduce(t);
  return Fq{this, std::move(t)};
}

Fq Level::scale(const Fq& x, const Fp2& s) const {
  Fq r{this, std::vector<u64>(x.c.size())};
  for (int i = 0; i < k_; ++i) {
    Fp2 v = coeff(x, i) * s;
    r.c[2 * i] = v.a;
    r.c[2 * i + 1] = v.b;
  }
  return r;
}

Fq Level::inv(const Fq& x) const {
  if (x.is_zero()) throw std::domain_error("inverse of zero");
  std::vector<Fp2> v;
  for (int i = 0; i < k_; ++i) v.push_back(coeff(x, i));
  Poly<Fp2> f(F_, mod_), g(F_, v), out;
  if (!invmod(g, f, &out)) throw std::logic_error("tower modulus is reducible");
  std::vector<Fp2> w(out.c);
  w.resize(k_, F_->zero());
  return from_coeffs(w);
}

Fq Level::frobenius(const Fq& x) const {
  Fq r = zero();
  u64 p = F_->p();
  for (int i = 0; i < k_; ++i) {
    Fp2 ci = endring::frobenius(coeff(x, i));
    if (ci.is_zero()) continue;
    const Fq& T = frob_[i];
    for (int j = 0; j < k_; ++j) {
      Fp2 v = ci * coeff(T, j);
      u64& ra = r.c[2 * j];
      u64& rb = r.c[2 * j + 1];
      ra += v.a;
      if (ra >= p) ra -= p;
      rb += v.b;
      if (rb >= p) rb -= p;
    }
  }
  return r;
}

Fq pow(const Fq& x, const Int& e) {
  if (e < 0) return pow(inv(x), Int(-e));
  Fq r = x.L->one();
  size_t bits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (size_t i = bits; i-- > 0;) {
    r = r * r;
    if (mpz_tstbit(e.get_mpz_t(), i)) r = r * x;
  }
  return r;
}

bool sqrt(const Fq& x, Fq* root) {
  const Level& L = *x.L;
  return tonelli_shanks(x, root, L.non_square(), L.two_adicity(), L.odd_part(), L.one());
}

// ---- polynomials --------------------------------------------------------

Fq eval_at(const Poly<Fp2>& f, const Fq& x) {
  const Level& L = *x.L;
  if (f.is_zero()) return L.zero();
  Fq acc = L.lift(f.c.back());
  for (int i = f.deg() - 1; i >= 0; --i) {
    acc = acc * x;
    u64 p = L.field().p();
    acc.c[0] += f.c[i].a;
    if (acc.c[0] >= p) acc.c[0] -= p;
    acc.c[1] += f.c[i].b;
    if (acc.c[1] >= p) acc.c[1] -= p;
  }
  return acc;
}

Poly<Fq> lift(const Poly<Fp2>& f, const Level& L) {
  Poly<Fq> r(&L);
  for (const auto& v : f.c) r.c.push_back(L.lift(v));
  return r;
}

Poly<Fp2> frobenius(const Poly<Fp2>& f) {
  Poly<Fp2> r(f.ctx);
  for (const auto& v : f.c) r.c.push_back(frobenius(v));
  return r;
}

Poly<Fp2> squarefree_part(const Poly<Fp2>& f) {
  Poly<Fp2> d = derivative(f);
  if (d.is_zero()) return monic(f);
  return monic(f / gcd(f, d));
}

bool is_irreducible(const Poly<Fp2>& f) {
  if (f.deg() <= 0) return false;
  if (f.deg() == 1) return true;
  Poly<Fp2> m = monic(f);
  Poly<Fp2> X = Poly<Fp2>::x(f.ctx);
  Poly<Fp2> h = X;
  const Int& q = f.ctx->order();
  for (int i = 1; 2 * i <= m.deg(); ++i) {
    h = powmod(h, q, m);
    if (gcd(h - X, m).deg() > 0) return false;
  }
  return true;
}

std::vector<Fq> roots_in_level(const Poly<Fp2>& f, const Level& L, Rng& rng) {
  return roots(lift(f, L), rng);
}

}  // namespace endring
