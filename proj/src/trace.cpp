#include "endring/trace.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace endring {

namespace {

// E(F_{p^(2k)}) is (Z/N)^2 with N = |(eps p)^k - 1| when pi_{p^2} = [eps p].
struct SmoothPart {
  Int N, smooth, cofactor;
  Factorization fac;
};

const SmoothPart& smooth_part(u64 p, int eps, int k, std::uint32_t bound) {
  static std::mutex mu;
  static std::map<std::tuple<u64, int, int, std::uint32_t>, SmoothPart> cache;
  auto key = std::make_tuple(p, eps, k, bound);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  SmoothPart s;
  Int pk = ipow(Int(static_cast<unsigned long>(p)), k);
  if (eps < 0 && k % 2 == 1) pk = -pk;
  s.N = abs(pk - 1);
  Int rest = s.N;
  s.smooth = 1;
  for (std::uint32_t q : small_primes(bound)) {
    if (rest == 1) break;
    int e = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), q)) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), q);
      ++e;
    }
    if (e > 0) {
      s.fac.push_back({Int(q), e});
      s.smooth *= ipow(Int(q), e);
    }
  }
  s.cofactor = rest;
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(s)).first->second;
}

std::size_t elem_hash(const Fp2& x) { return std::hash<u64>{}((x.a << 32) ^ x.b); }

std::size_t elem_hash(const Fq& x) {
  std::size_t h = 0;
  for (u64 w : x.c) h = h * 0x9e3779b97f4a7c15ULL + w;
  return h;
}

// Discrete log of H to the base G, where G has prime order q.
template <class T>
Int dlog_prime(const Curve& E, const Point<T>& G, const Point<T>& H, const Int& q) {
  if (q < 64) {
    Point<T> R = Point<T>::infinity();
    for (long i = 0; i < q.get_si(); ++i) {
      if (R == H) return i;
      R = add(E, R, G);
    }
    throw std::logic_error("dlog_prime: no logarithm");
  }
  long m = isqrt(q).get_si() + 1;
  std::unordered_multimap<std::size_t, long> baby;
  Point<T> R = G;
  for (long j = 1; j < m; ++j) {
    baby.emplace(elem_hash(R.x), j);
    R = add(E, R, G);
  }
  Point<T> step = neg(mul(E, G, Int(m)));
  Point<T> cur = H;
  for (long i = 0; i <= m; ++i) {
    if (cur.inf) return Int(i) * m;
    auto [lo, hi] = baby.equal_range(elem_hash(cur.x));
    for (auto it = lo; it != hi; ++it) {
      Point<T> cand = mul(E, G, Int(it->second));
      if (cand == cur) return (Int(i) * m + it->second) % q;
    }
    cur = add(E, cur, step);
  }
  throw std::logic_error("dlog_prime: no logarithm");
}

// Pohlig-Hellman in <Q>, where Q has order n = prod fac.
template <class T>
Int dlog(const Curve& E, const Point<T>& Q, const Point<T>& R, const Int& n, const Factorization& fac) {
  Int x = 0, m = 1;
  for (const auto& [q, e] : fac) {
    Int qe = ipow(q, e);
    Int co = n / qe;
    Point<T> Qq = mul(E, Q, co), Rq = mul(E, R, co);
    Point<T> gamma = mul(E, Qq, ipow(q, e - 1));
    Int xq = 0, qi = 1;
    for (int i = 0; i < e; ++i) {
      Point<T> h = mul(E, sub(E, Rq, mul(E, Qq, xq)), ipow(q, e - 1 - i));
      xq += dlog_prime(E, gamma, h, q) * qi;
      qi *= q;
    }
    bool ok;
    Int mm;
    x = crt_lcm(x, m, xq, qe, &mm, &ok);
    m = mm;
  }
  return x;
}

template <class T>
struct Gatherer {
  const IsogenyChain& chain;
  const Curve& E;
  const Int& degree;
  const SmoothPart& sp;
  typename ElemTraits<T>::Ctx ctx;
  Rng& rng;

  // Returns false when the sampled point carries no information.
  bool sample(Int* residue, Int* modulus) {
    Point<T> P = mul(E, random_point<T>(E, ctx, rng), sp.cofactor);
    if (P.inf) return false;
    Point<T> Q = evaluate_chain(chain, P);
    if (Q.inf) return false;
    Point<T> R = add(E, evaluate_chain(chain, Q), mul(E, P, degree));

    Int n = sp.smooth;
    Factorization fac;
    for (const auto& [q, e] : sp.fac) {
      int f = e;
      while (f > 0 && mul(E, Q, n / q).inf) {
        n /= q;
        --f;
      }
      if (f > 0) fac.push_back({q, f});
    }
    Int t = dlog(E, Q, R, n, fac);
    if (mul(E, Q, t) != R) throw std::logic_error("trd: residue does not satisfy the characteristic equation");
    *residue = t;
    *modulus = n;
    return true;
  }
};

int frobenius_sign(const Curve& E, Rng& rng) {
  const Field* F = E.field();
  Int p(static_cast<unsigned long>(F->p()));
  bool plus = true, minus = true;
  for (int i = 0; i < 8; ++i) {
    auto P = random_point<Fp2>(E, F, rng);
    if (!mul(E, P, p - 1).inf) plus = false;
    if (!mul(E, P, p + 1).inf) minus = false;
  }
  if (plus) return 1;
  if (minus) return -1;
  fail("NotSupersingular", "trace needs a curve whose p^2-Frobenius is [p] or [-p]");
}

}  // namespace

TraceJob TraceJob::make(IsogenyChain chain) {
  if (!chain.is_endomorphism()) fail("BaseMismatch", "trace of a chain that is not an endomorphism");
  TraceJob j;
  j.degree = chain.degree();
  j.bound = 2 * isqrt(4 * j.degree) + 1;
  j.chain = std::move(chain);
  return j;
}

Int trd(const IsogenyChain& chain, Rng& rng, const TraceOptions& opts, std::vector<TraceResidue>* residues) {
  if (!chain.well_formed()) throw std::invalid_argument("trd: chain endpoints do not match");
  if (!chain.is_endomorphism()) fail("BaseMismatch", "trace of a chain that is not an endomorphism");
  const Curve E = chain.domain();
  const Field* F = E.field();
  Int degree = chain.degree();
  Int bound = 2 * isqrt(4 * degree) + 1;
  int eps = frobenius_sign(E, rng);

  Int t = 0, M = 1;
  int last = opts.auto_raise ? 2 * opts.tower_ceiling : opts.tower_ceiling;
  for (int k = 1; k <= last && M < bound; ++k) {
    const SmoothPart& sp = smooth_part(F->p(), eps, k, opts.smooth_bound);
    for (int i = 0; i < opts.points_per_level && M < bound; ++i) {
      Int r, m;
      bool got;
      if (k == 1) {
        Gatherer<Fp2> g{chain, E, degree, sp, F, rng};
        got = g.sample(&r, &m);
      } else {
        Gatherer<Fq> g{chain, E, degree, sp, &F->level(k), rng};
        got = g.sample(&r, &m);
      }
      if (!got) continue;
      if (residues) residues->push_back({k, r, m});
      bool ok;
      Int mm;
      t = crt_lcm(t, M, r, m, &mm, &ok);
      if (!ok) throw std::logic_error("trd: inconsistent torsion residues");
      M = mm;
    }
  }
  if (M < bound)
    fail("TowerTooDeep", "torsion up to level " + std::to_string(last) + " gives modulus " + to_string(M) +
                             " below the bound " + to_string(bound));
  return symmetric_mod(t, M);
}

IsogenyChain rho_chain(const InseparableReflection& r1, const InseparableReflection& r2, Rng& rng) {
  if (r1.base != r2.base) fail("BaseMismatch", "reflections live on different curves");
  IsogenyChain rho;
  rho.base = r1.base;
  rho.steps.assign(r2.chain.steps.begin(), r2.chain.steps.end() - 1);
  for (const auto& s : r1.walk.steps) rho.append(conjugate_step(s));
  rho.append(dual_step(r1.psi, rng));
  for (int i = r1.k - 1; i >= 0; --i) rho.append(r1.duals[i]);
  return rho;
}

GramMatrix gram_of_reflections(const InseparableReflection& g1, const InseparableReflection& g2,
                               const InseparableReflection& g3, Rng& rng, const TraceOptions& opts) {
  const InseparableReflection* r[3] = {&g1, &g2, &g3};
  Int p(static_cast<unsigned long>(g1.base.field()->p()));
  GramMatrix G;
  for (auto& row : G.g) row.fill(0);
  G.g[0][0] = 2;
  for (int i = 0; i < 3; ++i) {
    Int di = r[i]->phi_degree();
    G.g[i + 1][i + 1] = 2 * p * di * di * r[i]->d;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      Int v = p * trd(rho_chain(*r[i], *r[j], rng), rng, opts);
      G.g[i + 1][j + 1] = G.g[j + 1][i + 1] = v;
    }
  return G;
}

GramMatrix bass_gram(const Int& p, int d, const Int& d1, const Int& d2, const Int& T) {
  GramMatrix G;
  for (auto& row : G.g) row.fill(0);
  Int pT = p * T;
  G.g[0][0] = 2;
  G.g[0][3] = G.g[3][0] = -pT;
  G.g[1][1] = 2 * p * d * d1 * d1;
  G.g[2][2] = 2 * p * d * d2 * d2;
  G.g[1][2] = G.g[2][1] = pT;
  Int x = p * d1 * d2 * d;
  G.g[3][3] = 2 * x * x;
  return G;
}

}  // namespace endring
