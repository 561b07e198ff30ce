#include "endring/arith.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace endring {

Int isqrt(const Int& n) {
  if (n < 0) throw std::domain_error("isqrt of negative");
  Int r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

bool is_square(const Int& n, Int* root) {
  if (n < 0) return false;
  Int r = isqrt(n);
  if (r * r != n) return false;
  if (root) *root = r;
  return true;
}

bool rat_sqrt(const Rat& x, Rat* root) {
  if (x < 0) return false;
  Int a, b;
  if (!is_square(x.get_num(), &a) || !is_square(x.get_den(), &b)) return false;
  if (root) {
    *root = Rat(a, b);
    root->canonicalize();
  }
  return true;
}

bool is_prime(const Int& n) {
  if (n < 2) return false;
  return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

Int next_prime(const Int& n) {
  Int r;
  mpz_nextprime(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

Int ipow(const Int& b, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

Int symmetric_mod(const Int& r, const Int& m) {
  Int x = r % m;
  if (x < 0) x += m;
  if (2 * x > m) x -= m;
  return x;
}

Int crt_lcm(const Int& r1, const Int& m1, const Int& r2, const Int& m2, Int* m_out, bool* ok) {
  Int g, s, t;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), m1.get_mpz_t(), m2.get_mpz_t());
  Int diff = r2 - r1;
  if (diff % g != 0) {
    *ok = false;
    return 0;
  }
  *ok = true;
  Int l = m1 / g * m2;
  Int x = r1 + m1 * ((diff / g * s) % (m2 / g));
  x %= l;
  if (x < 0) x += l;
  *m_out = l;
  return x;
}

int valuation(Int n, const Int& q) {
  if (n == 0) return 1 << 30;
  int v = 0;
  while (n % q == 0) {
    n /= q;
    ++v;
  }
  return v;
}

u64 mulmod64(u64 a, u64 b, u64 m) { return static_cast<u64>((unsigned __int128)a * b % m); }

u64 powmod64(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod64(r, b, m);
    b = mulmod64(b, b, m);
    e >>= 1;
  }
  return r;
}

u64 invmod64(u64 a, u64 m) {
  long long t = 0, nt = 1;
  long long r = static_cast<long long>(m), nr = static_cast<long long>(a % m);
  while (nr) {
    long long q = r / nr;
    long long tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1) throw std::domain_error("not invertible");
  if (t < 0) t += static_cast<long long>(m);
  return static_cast<u64>(t);
}

const std::vector<std::uint32_t>& small_primes(std::uint32_t bound) {
  static std::mutex mu;
  static std::map<std::uint32_t, std::vector<std::uint32_t>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(bound);
  if (it != cache.end()) return it->second;
  std::vector<bool> comp(bound + 1, false);
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 2; i < bound; ++i) {
    if (comp[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = std::uint64_t(i) * i; j < bound; j += i) comp[j] = true;
  }
  return cache.emplace(bound, std::move(out)).first->second;
}

bool sqrt_mod(const Int& a_in, const Int& q, Int* root) {
  Int a = a_in % q;
  if (a < 0) a += q;
  if (a == 0) {
    *root = 0;
    return true;
  }
  if (q == 2) {
    *root = a;
    return true;
  }
  if (mpz_legendre(a.get_mpz_t(), q.get_mpz_t()) != 1) return false;
  // Tonelli-Shanks
  Int Q = q - 1;
  unsigned long S = 0;
  while (mpz_even_p(Q.get_mpz_t())) {
    Q >>= 1;
    ++S;
  }
  Int z = 2;
  while (mpz_legendre(z.get_mpz_t(), q.get_mpz_t()) != -1) ++z;
  Int c, t, R, e;
  mpz_powm(c.get_mpz_t(), z.get_mpz_t(), Q.get_mpz_t(), q.get_mpz_t());
  mpz_powm(t.get_mpz_t(), a.get_mpz_t(), Q.get_mpz_t(), q.get_mpz_t());
  e = (Q + 1) / 2;
  mpz_powm(R.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), q.get_mpz_t());
  unsigned long M = S;
  while (t != 1) {
    unsigned long i = 0;
    Int tt = t;
    while (tt != 1) {
      tt = tt * tt % q;
      ++i;
    }
    Int b = c;
    for (unsigned long j = 0; j + i + 1 < M; ++j) b = b * b % q;
    M = i;
    c = b * b % q;
    t = t * c % q;
    R = R * b % q;
  }
  *root = R;
  return true;
}

namespace {

Int pollard_brent(const Int& n, unsigned long c, unsigned long max_iter) {
  Int y = 2, x, ys, q = 1, g = 1;
  unsigned long r = 1, m = 128, iter = 0;
  do {
    x = y;
    for (unsigned long i = 0; i < r; ++i) y = (y * y + c) % n;
    unsigned long k = 0;
    do {
      ys = y;
      for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
        y = (y * y + c) % n;
        q = q * abs(x - y) % n;
      }
      mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      k += m;
      iter += m;
    } while (k < r && g == 1);
    r *= 2;
  } while (g == 1 && iter < max_iter);
  if (g == n) {
    do {
      ys = (ys * ys + c) % n;
      Int d = abs(x - ys);
      mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    } while (g == 1);
  }
  if (g == 1 || g == n) return 0;
  return g;
}

// Montgomery-curve ECM, stage 1 only. Returns a proper factor or 0.
Int ecm_stage1(const Int& n, unsigned long sigma_in, unsigned long B1) {
  Int sigma = sigma_in;
  Int u = (sigma * sigma - 5) % n, v = (4 * sigma) % n;
  Int x = u * u % n * u % n, z = v * v % n * v % n;
  Int num = (v - u) % n;
  num = num * num % n * num % n * ((3 * u + v) % n) % n;
  Int den = 16 * x % n * v % n;
  Int g;
  mpz_gcd(g.get_mpz_t(), den.get_mpz_t(), n.get_mpz_t());
  if (g != 1) return (g == n) ? Int(0) : g;
  Int inv;
  mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), n.get_mpz_t());
  Int a24 = num * inv % n;
  if (a24 < 0) a24 += n;

  auto dbl = [&](const Int& X, const Int& Z, Int& Xo, Int& Zo) {
    Int s = (X + Z) % n;
    s = s * s % n;
    Int d = (X - Z) % n;
    d = d * d % n;
    Int t = s - d;
    Xo = s * d % n;
    Zo = t * ((d + a24 * t) % n) % n;
  };
  auto add = [&](const Int& X1, const Int& Z1, const Int& X2, const Int& Z2, const Int& Xd,
                 const Int& Zd, Int& Xo, Int& Zo) {
    Int a = (X1 - Z1) * (X2 + Z2) % n;
    Int b = (X1 + Z1) * (X2 - Z2) % n;
    Int s = a + b, t = a - b;
    Xo = Zd * (s * s % n) % n;
    Zo = Xd * (t * t % n) % n;
  };
  auto ladder = [&](Int& X, Int& Z, unsigned long k) {
    if (k == 1) return;
    Int X0 = X, Z0 = Z, X1, Z1;
    dbl(X, Z, X1, Z1);
    int top = 63 - __builtin_clzl(k);
    for (int i = top - 1; i >= 0; --i) {
      Int ax, az, bx, bz;
      if ((k >> i) & 1) {
        add(X0, Z0, X1, Z1, X, Z, ax, az);
        dbl(X1, Z1, bx, bz);
        X0 = ax; Z0 = az; X1 = bx; Z1 = bz;
      } else {
        add(X0, Z0, X1, Z1, X, Z, ax, az);
        dbl(X0, Z0, bx, bz);
        X1 = ax; Z1 = az; X0 = bx; Z0 = bz;
      }
    }
    X = X0;
    Z = Z0;
  };
  const auto& primes = small_primes(static_cast<std::uint32_t>(B1 + 1));
  unsigned long count = 0;
  for (std::uint32_t p : primes) {
    unsigned long q = p;
    while (q <= B1 / p) q *= p;
    ladder(x, z, q);
    if (++count % 200 == 0) {
      mpz_gcd(g.get_mpz_t(), z.get_mpz_t(), n.get_mpz_t());
      if (g != 1) break;
    }
  }
  mpz_gcd(g.get_mpz_t(), z.get_mpz_t(), n.get_mpz_t());
  if (g == 1 || g == n) return 0;
  return g;
}

Int find_factor(const Int& n) {
  if (mpz_perfect_power_p(n.get_mpz_t())) {
    for (unsigned long k = 2; k < 200; ++k) {
      Int r;
      if (mpz_root(r.get_mpz_t(), n.get_mpz_t(), k)) return r;
    }
  }
  for (unsigned long c = 1; c <= 3; ++c) {
    Int f = pollard_brent(n, c, 1UL << 17);
    if (f != 0) return f;
  }
  const unsigned long schedule[][2] = {{2000, 25},     {11000, 90},    {50000, 300},
                                       {250000, 700},  {1000000, 1800}, {3000000, 5000}};
  unsigned long sigma = 7;
  for (const auto& s : schedule) {
    for (unsigned long c = 0; c < s[1]; ++c) {
      Int f = ecm_stage1(n, sigma++, s[0]);
      if (f != 0) return f;
    }
  }
  Int f = pollard_brent(n, 5, 1UL << 40);
  if (f != 0) return f;
  throw std::runtime_error("factor: gave up on " + n.get_str());
}

}  // namespace

Factorization factor(const Int& n_in) {
  Int n = abs(n_in);
  std::map<Int, int> out;
  if (n == 0) throw std::domain_error("factor(0)");
  for (std::uint32_t p : small_primes(1000000)) {
    if (n == 1) break;
    if (Int(p) * p > n) break;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      out[Int(p)]++;
      mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
    }
  }
  std::vector<Int> stack;
  if (n > 1) stack.push_back(n);
  while (!stack.empty()) {
    Int m = stack.back();
    stack.pop_back();
    if (m == 1) continue;
    if (is_prime(m)) {
      out[m]++;
      continue;
    }
    Int f = find_factor(m);
    stack.push_back(f);
    stack.push_back(m / f);
  }
  return Factorization(out.begin(), out.end());
}

Int factor_product(const Factorization& f) {
  Int r = 1;
  for (const auto& [q, e] : f) r *= ipow(q, e);
  return r;
}

std::string to_string(const Int& x) { return x.get_str(); }

std::string to_string(const Rat& x) {
  Rat y = x;
  y.canonicalize();
  return y.get_num().get_str() + "/" + y.get_den().get_str();
}

Rat parse_rat(const std::string& s) {
  Rat r;
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    r = Rat(Int(s));
  } else {
    r = Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
  }
  r.canonicalize();
  return r;
}

Rat frac(const Int& n, const Int& d) {
  Rat r(n, d);
  r.canonicalize();
  return r;
}

}  // namespace endring
