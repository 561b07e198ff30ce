#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <set>
#include <stdexcept>

#include "endring/errors.hpp"
#include "endring/quatlin.hpp"

namespace endring {

namespace {

using IVec = std::array<Int, 4>;
using IMat = std::array<IVec, 4>;

IMat integer_gram(const QuatOrder& O) {
  auto G = trace_gram(O);
  IMat M;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (G[i][j].get_den() != 1) throw std::logic_error("integer_gram: order has non-integral traces");
      M[i][j] = G[i][j].get_num();
    }
  return M;
}

Int form(const IMat& B, const IVec& v, const IVec& w) {
  Int s = 0;
  for (int i = 0; i < 4; ++i) {
    if (v[i] == 0) continue;
    for (int j = 0; j < 4; ++j) s += v[i] * B[i][j] * w[j];
  }
  return s;
}

QuatElement combo(const QuatOrder& O, const IVec& v, const Rat& scale = 1) {
  QuatElement x{O.alg, {0, 0, 0, 0}};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) x.c[k] += Rat(v[i]) * O.basis[i][k];
  return scale * x;
}

Int mod(const Int& a, const Int& q) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t());
  return r;
}

Int inv_mod(const Int& a, const Int& q) {
  Int r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t()) == 0) throw std::logic_error("inv_mod: not invertible");
  return r;
}

// Basis of {v : v B = 0 mod q} for prime q.
std::vector<IVec> kernel_mod(const IMat& B, const Int& q) {
  IMat a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = mod(B[j][i], q);  // solve B^T v = 0; B is symmetric anyway
  int pivcol[4] = {-1, -1, -1, -1};
  int r = 0;
  for (int c = 0; c < 4 && r < 4; ++c) {
    int piv = r;
    while (piv < 4 && a[piv][c] == 0) ++piv;
    if (piv == 4) continue;
    std::swap(a[piv], a[r]);
    Int s = inv_mod(a[r][c], q);
    for (auto& x : a[r]) x = mod(x * s, q);
    for (int i = 0; i < 4; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Int f = a[i][c];
      for (int j = 0; j < 4; ++j) a[i][j] = mod(a[i][j] - f * a[r][j], q);
    }
    pivcol[r++] = c;
  }
  std::vector<IVec> out;
  for (int free = 0; free < 4; ++free) {
    bool is_piv = false;
    for (int i = 0; i < r; ++i) is_piv |= pivcol[i] == free;
    if (is_piv) continue;
    IVec v{0, 0, 0, 0};
    v[free] = 1;
    for (int i = 0; i < r; ++i) v[pivcol[i]] = mod(-a[i][free], q);
    out.push_back(v);
  }
  return out;
}

// All projective points of the span of `basis` over F_q, as integer vectors.
void for_each_line(const std::vector<IVec>& basis, const Int& q, const std::function<void(const IVec&)>& f) {
  int r = static_cast<int>(basis.size());
  long qq = q.get_si();
  for (int lead = 0; lead < r; ++lead) {
    long count = 1;
    for (int i = lead + 1; i < r; ++i) count *= qq;
    for (long n = 0; n < count; ++n) {
      IVec v = basis[lead];
      long m = n;
      for (int i = lead + 1; i < r; ++i) {
        long c = m % qq;
        m /= qq;
        for (int k = 0; k < 4; ++k) v[k] += c * basis[i][k];
      }
      for (auto& x : v) x = mod(x, q);
      f(v);
    }
  }
}

void insert_unique(std::vector<QuatOrder>& out, QuatOrder O) {
  if (std::find(out.begin(), out.end(), O) == out.end()) out.push_back(std::move(O));
}

}  // namespace

std::vector<QuatElement> local_diagonal_basis(const QuatOrder& O, const Int& p) {
  IMat B = integer_gram(O);
  std::vector<IVec> vs;
  for (int i = 0; i < 4; ++i) {
    IVec v{0, 0, 0, 0};
    v[i] = 1;
    vs.push_back(v);
  }
  for (int s = 0; s < 4; ++s) {
    // smallest valuation among the remaining Gram entries
    int best = -1, bi = -1, bj = -1;
    for (int i = s; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        Int x = form(B, vs[i], vs[j]);
        if (x == 0) continue;
        int v = valuation(x, p);
        if (best < 0 || v < best || (v == best && i == j && bi != bj)) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    if (best < 0) throw std::logic_error("local_diagonal_basis: degenerate trace form");
    if (bi != bj) {
      for (int k = 0; k < 4; ++k) vs[bi][k] += vs[bj][k];
    }
    std::swap(vs[s], vs[bi]);
    const IVec& e = vs[s];
    Int bee = form(B, e, e);
    Int pk = ipow(p, valuation(bee, p));
    Int u = bee / pk;
    for (int t = s + 1; t < 4; ++t) {
      Int w = form(B, vs[t], e);
      if (w % pk != 0) throw std::logic_error("local_diagonal_basis: valuation ordering violated");
      w /= pk;
      for (int k = 0; k < 4; ++k) vs[t][k] = u * vs[t][k] - w * e[k];
      Int g = 0;
      for (const auto& x : vs[t]) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
      // dividing out a unit content keeps the vectors small
      Int gp = g;
      while (gp % p == 0) gp /= p;
      if (gp > 1)
        for (auto& x : vs[t]) x /= gp;
    }
  }
  std::vector<QuatElement> out;
  for (const auto& v : vs) out.push_back(combo(O, v));
  return out;
}

bool is_p_saturated(const QuatOrder& O, const Int& p) {
  for (const auto& e : local_diagonal_basis(O, p))
    if (valuation(nrd(e).get_num(), p) > 1) return false;
  return true;
}

QuatOrder p_saturate(const QuatOrder& O, const Int& p) {
  QuatOrder cur = O;
  while (valuation(discrd(cur), p) > 1) {
    bool grew = false;
    for (const auto& e : local_diagonal_basis(cur, p)) {
      if (valuation(nrd(e).get_num(), p) < 2) continue;
      cur = extend_order(cur, frac(1, p) * e);
      grew = true;
      break;
    }
    if (!grew)
      fail("NotLocallyMaximalElsewhere", "p-saturation stalled at discrd " + to_string(discrd(cur)));
  }
  return cur;
}

QuatLattice two_sided_P(const QuatOrder& O, const Int& p) {
  if (discrd(O) != p) fail("NotMaximal", "order has discrd " + to_string(discrd(O)) + ", expected " + to_string(p));
  IMat B = integer_gram(O);
  auto R = kernel_mod(B, p);
  if (R.size() != 2) fail("NotMaximal", "radical of the trace form mod p has dimension " + std::to_string(R.size()));
  std::vector<QuatElement> gens;
  for (int i = 0; i < 4; ++i) gens.push_back(Rat(p) * O.element(i));
  for (const auto& v : R) gens.push_back(combo(O, v));
  QuatLattice P = lattice_from_elements(O.alg, gens);
  if (lattice_index(O, P) != Rat(p * p)) throw std::logic_error("two_sided_P: index is not p^2");
  for (int i = 0; i < 4; ++i) {
    if (nrd(P.element(i)).get_num() % p != 0) throw std::logic_error("two_sided_P: norm not divisible by p");
    for (int j = i + 1; j < 4; ++j)
      if (trd(P.element(i) * conj(P.element(j))).get_num() % p != 0)
        throw std::logic_error("two_sided_P: trace pairing not divisible by p");
  }
  return P;
}

QuatOrder z_plus(const QuatLattice& P) {
  auto gens = P.elements();
  gens.push_back(QuatElement::scalar(P.alg, 1));
  return lattice_from_elements(P.alg, gens);
}

std::vector<QuatOrder> index_q_overorders(const QuatOrder& O, const Int& q, OverorderStats* stats) {
  std::vector<QuatOrder> out;
  auto try_line = [&](const IVec& v) {
    QuatElement x = combo(O, v, frac(1, q));
    if (!is_integral(x)) return;
    auto gens = O.elements();
    gens.push_back(x);
    QuatLattice L = lattice_from_elements(O.alg, gens);
    if (is_order(L)) insert_unique(out, L);
  };
  if (q <= 3) {
    std::vector<IVec> all;
    for (int i = 0; i < 4; ++i) {
      IVec v{0, 0, 0, 0};
      v[i] = 1;
      all.push_back(v);
    }
    for_each_line(all, q, try_line);
    return out;
  }

  // an overorder lies in the dual lattice, so v is in the radical mod q
  IMat B = integer_gram(O);
  auto R = kernel_mod(B, q);
  if (R.empty()) return out;
  Int lines = 0;
  for (size_t i = 0; i < R.size(); ++i) lines += ipow(q, i);
  if (lines <= 20000) {
    for_each_line(R, q, try_line);
    return out;
  }
  if (R.size() == 2) {
    // Nrd(x v1 + y v2) / q mod q is a binary quadratic form on the radical
    auto Q = [&](const IVec& v) { return mod(nrd(combo(O, v)).get_num() / q, q); };
    IVec s;
    for (int k = 0; k < 4; ++k) s[k] = R[0][k] + R[1][k];
    Int A = Q(R[0]), C = Q(R[1]), Bc = mod(Q(s) - A - C, q);
    if (A != 0 || Bc != 0 || C != 0) {
      auto line = [&](const Int& x, const Int& y) {
        IVec v;
        for (int k = 0; k < 4; ++k) v[k] = mod(x * R[0][k] + y * R[1][k], q);
        try_line(v);
      };
      if (C == 0) {
        line(0, 1);
        if (Bc != 0) line(1, mod(-A * inv_mod(Bc, q), q));
        else if (A == 0) throw std::logic_error("index_q_overorders: zero form");
      } else {
        Int disc = mod(Bc * Bc - 4 * A * C, q), r;
        if (sqrt_mod(disc, q, &r)) {
          Int i2c = inv_mod(2 * C, q);
          line(1, mod((-Bc + r) * i2c, q));
          if (r != 0) line(1, mod((-Bc - r) * i2c, q));
        }
      }
      return out;
    }
  }

  // large q with a degenerate local picture: use the idealizer of the radical
  if (stats) {
    stats->large_q_steps++;
    stats->warnings.push_back("large-q idealizer step at q = " + to_string(q));
  }
  std::vector<QuatElement> gens;
  for (int i = 0; i < 4; ++i) gens.push_back(Rat(q) * O.element(i));
  for (const auto& v : R) gens.push_back(combo(O, v));
  QuatOrder I = right_order(lattice_from_elements(O.alg, gens));
  if (I != O && contains(I, O) && is_order(I)) out.push_back(I);
  return out;
}

Int overorder_bound(const Factorization& f, const Int& p) {
  Int b = 1;
  for (const auto& [q, e] : f)
    if (q != p) b *= e + 1;
  return b;
}

std::vector<QuatOrder> maximal_overorders(const QuatOrder& L, const Int& p, const Factorization& fac,
                                          OverorderStats* stats) {
  Int d = discrd(L);
  if (factor_product(fac) != d)
    fail("FactorizationMismatch", "supplied factors multiply to " + to_string(factor_product(fac)) + ", discrd is " +
                                      to_string(d));
  std::vector<QuatOrder> cur{p_saturate(L, p)};
  for (const auto& [q, e] : fac) {
    if (q == p) continue;
    std::vector<QuatOrder> done, seen;
    std::deque<QuatOrder> queue(cur.begin(), cur.end());
    seen = cur;
    while (!queue.empty()) {
      QuatOrder O = queue.front();
      queue.pop_front();
      if (stats) stats->orders_visited++;
      if (valuation(discrd(O), q) == 0) {
        insert_unique(done, O);
        continue;
      }
      auto overs = index_q_overorders(O, q, stats);
      if (overs.empty() && stats) stats->warnings.push_back("no overorder found at q = " + to_string(q));
      for (auto& o : overs) {
        if (std::find(seen.begin(), seen.end(), o) != seen.end()) continue;
        seen.push_back(o);
        queue.push_back(std::move(o));
      }
    }
    cur = std::move(done);
  }
  std::sort(cur.begin(), cur.end());
  return cur;
}

MaxOrder standard_max_order(const Int& p) {
  if (p <= 2 || !is_prime(p)) fail("NotPrime", "standard_max_order needs an odd prime");
  MaxOrder M;
  std::vector<RatVec> rows;
  Int r8 = mod(p, 8);
  if (mod(p, 4) == 3) {
    M.alg = QuatAlgebra::make(-1, Rat(-p));
    rows = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, frac(1, 2), frac(1, 2), 0}, {frac(1, 2), 0, 0, frac(1, 2)}};
  } else if (r8 == 5) {
    M.alg = QuatAlgebra::make(-2, Rat(-p));
    rows = {{frac(1, 2), 0, frac(1, 2), frac(1, 2)}, {0, frac(1, 4), frac(1, 2), frac(1, 4)}, {0, 0, 1, 0}, {0, 0, 0, 1}};
  } else {
    Int q = 3;
    for (;; q = next_prime(q)) {
      if (mod(q, 4) != 3) continue;
      if (mpz_legendre(p.get_mpz_t(), q.get_mpz_t()) == -1) break;
    }
    Int c;
    if (!sqrt_mod(mod(-inv_mod(mod(p, q), q), q), q, &c)) throw std::logic_error("standard_max_order: no c");
    M.alg = QuatAlgebra::make(Rat(-p), Rat(-q));
    rows = {{frac(1, 2), 0, frac(1, 2), 0}, {0, frac(1, 2), 0, frac(1, 2)}, {0, 0, frac(1, q), frac(c, q)}, {0, 0, 0, 1}};
  }
  M.order = lattice_from_rows(M.alg, rows);
  if (!is_order(M.order) || discrd(M.order) != p) throw std::logic_error("standard_max_order: construction failed");
  return M;
}

MaxOrder random_max_order(const Int& p, Rng& rng) {
  MaxOrder M = standard_max_order(p);
  static const int qs[] = {2, 3, 5, 7};
  size_t steps = mpz_sizeinbase(p.get_mpz_t(), 2);
  for (size_t s = 0; s < steps; ++s) {
    int q;
    do q = qs[rng.below(4)];
    while (Int(q) == p);
    for (;;) {
      IVec v;
      bool nonzero = false;
      for (auto& x : v) {
        x = Int(static_cast<unsigned long>(rng.below(q)));
        nonzero |= x != 0;
      }
      if (!nonzero) continue;
      QuatElement a = combo(M.order, v);
      if (nrd(a).get_num() % q != 0) continue;
      std::vector<QuatElement> gens;
      for (int i = 0; i < 4; ++i) {
        gens.push_back(Rat(q) * M.order.element(i));
        gens.push_back(M.order.element(i) * a);
      }
      QuatLattice I = lattice_from_elements(M.alg, gens);
      if (lattice_index(M.order, I) != q * q) continue;
      M.order = right_order(I);
      break;
    }
  }
  if (discrd(M.order) != p) throw std::logic_error("random_max_order: walk left the maximal orders");
  return M;
}

namespace {

// Exact LLL on the positive definite form x^T A x; returns the reduced
// coefficient vectors (rows of a unimodular matrix).
std::vector<IVec> lll(const std::array<std::array<Rat, 4>, 4>& A) {
  std::vector<IVec> b;
  for (int i = 0; i < 4; ++i) {
    IVec v{0, 0, 0, 0};
    v[i] = 1;
    b.push_back(v);
  }
  auto ip = [&](const IVec& x, const IVec& y) {
    Rat s = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) s += Rat(x[i] * y[j]) * A[i][j];
    return s;
  };
  Rat mu[4][4], B[4];
  auto gso = [&]() {
    for (int i = 0; i < 4; ++i) {
      B[i] = ip(b[i], b[i]);
      for (int j = 0; j < i; ++j) {
        mu[i][j] = ip(b[i], b[j]);
        for (int k = 0; k < j; ++k) mu[i][j] -= mu[j][k] * mu[i][k] * B[k];
        mu[i][j] /= B[j];
        B[i] -= mu[i][j] * mu[i][j] * B[j];
      }
    }
  };
  gso();
  int k = 1;
  while (k < 4) {
    for (int j = k - 1; j >= 0; --j) {
      Rat m = mu[k][j];
      Int r;
      Rat h = m + frac(1, 2);
      mpz_fdiv_q(r.get_mpz_t(), h.get_num_mpz_t(), h.get_den_mpz_t());
      if (r == 0) continue;
      for (int t = 0; t < 4; ++t) b[k][t] -= r * b[j][t];
      gso();
    }
    if (B[k] >= (frac(3, 4) - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      gso();
      k = std::max(k - 1, 1);
    }
  }
  return b;
}

Int floor_rat(const Rat& x) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

}  // namespace

long count_norm(const QuatOrder& O, const Int& n) {
  // Fincke-Pohst in exact arithmetic on an LLL-reduced basis of Nrd
  auto G = trace_gram(O);
  std::array<std::array<Rat, 4>, 4> A;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A[i][j] = G[i][j] / 2;
  auto red = lll(A);
  std::vector<QuatElement> basis;
  for (const auto& v : red) basis.push_back(combo(O, v));
  Rat q[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) q[i][j] = trd(basis[i] * conj(basis[j])) / 2;
  for (int i = 0; i < 4; ++i) {
    if (q[i][i] <= 0) throw std::invalid_argument("count_norm: form is not positive definite");
    for (int j = i + 1; j < 4; ++j) {
      q[j][i] = q[i][j];
      q[i][j] /= q[i][i];
    }
    for (int k = i + 1; k < 4; ++k)
      for (int l = k; l < 4; ++l) q[k][l] -= q[k][i] * q[i][l];
  }
  long count = 0;
  Int x[4];
  std::function<void(int, const Rat&)> rec = [&](int i, const Rat& rem) {
    Rat c = 0;
    for (int j = i + 1; j < 4; ++j) c += q[i][j] * Rat(x[j]);
    Int s = isqrt(floor_rat(rem / q[i][i]));
    Int lo = floor_rat(-c) - s - 1, hi = floor_rat(-c) + s + 2;
    for (Int v = lo; v <= hi; ++v) {
      Rat t = Rat(v) + c;
      Rat rest = rem - q[i][i] * t * t;
      if (rest < 0) continue;
      x[i] = v;
      if (i > 0) {
        rec(i - 1, rest);
      } else if (rest == 0) {
        ++count;
      }
    }
  };
  // Nrd(x) = n exactly when the final remainder is 0
  rec(3, Rat(n));
  return count;
}

}  // namespace endring
