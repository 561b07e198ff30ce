#include "endring/quatlin.hpp"

#include <stdexcept>

#include "endring/errors.hpp"

namespace endring {

// ---- Gram matrices --------------------------------------------------------

Int GramMatrix::det() const {
  // Bareiss elimination with row swaps
  std::array<std::array<Int, 4>, 4> a = g;
  Int prev = 1;
  int sign = 1;
  for (int k = 0; k < 4; ++k) {
    int piv = k;
    while (piv < 4 && a[piv][k] == 0) ++piv;
    if (piv == 4) return 0;
    if (piv != k) {
      std::swap(a[piv], a[k]);
      sign = -sign;
    }
    for (int i = k + 1; i < 4; ++i) {
      for (int j = k + 1; j < 4; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
      a[i][k] = 0;
    }
    prev = a[k][k];
  }
  return sign * a[3][3];
}

bool GramMatrix::symmetric() const {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j)
      if (g[i][j] != g[j][i]) return false;
  return true;
}

// ---- algebra ----------------------------------------------------------------

std::shared_ptr<const QuatAlgebra> QuatAlgebra::make(const Rat& a, const Rat& b) {
  if (a == 0 || b == 0) throw std::invalid_argument("QuatAlgebra: a and b must be nonzero");
  return std::make_shared<const QuatAlgebra>(QuatAlgebra{a, b});
}

QuatElement QuatElement::scalar(AlgebraPtr A, const Rat& x) { return QuatElement{std::move(A), {x, 0, 0, 0}}; }

QuatElement operator+(const QuatElement& x, const QuatElement& y) {
  QuatElement r{x.alg, {}};
  for (int i = 0; i < 4; ++i) r.c[i] = x.c[i] + y.c[i];
  return r;
}

QuatElement operator-(const QuatElement& x, const QuatElement& y) {
  QuatElement r{x.alg, {}};
  for (int i = 0; i < 4; ++i) r.c[i] = x.c[i] - y.c[i];
  return r;
}

QuatElement operator-(const QuatElement& x) {
  QuatElement r{x.alg, {}};
  for (int i = 0; i < 4; ++i) r.c[i] = -x.c[i];
  return r;
}

QuatElement operator*(const Rat& s, const QuatElement& x) {
  QuatElement r{x.alg, {}};
  for (int i = 0; i < 4; ++i) r.c[i] = s * x.c[i];
  return r;
}

QuatElement operator*(const QuatElement& x, const QuatElement& y) {
  const Rat& a = x.alg->a;
  const Rat& b = x.alg->b;
  const auto& [w1, x1, y1, z1] = x.c;
  const auto& [w2, x2, y2, z2] = y.c;
  QuatElement r{x.alg, {}};
  r.c[0] = w1 * w2 + a * x1 * x2 + b * y1 * y2 - a * b * z1 * z2;
  r.c[1] = w1 * x2 + x1 * w2 - b * y1 * z2 + b * z1 * y2;
  r.c[2] = w1 * y2 + y1 * w2 + a * x1 * z2 - a * z1 * x2;
  r.c[3] = w1 * z2 + z1 * w2 + x1 * y2 - y1 * x2;
  return r;
}

QuatElement conj(const QuatElement& x) { return QuatElement{x.alg, {x.c[0], -x.c[1], -x.c[2], -x.c[3]}}; }

Rat trd(const QuatElement& x) { return 2 * x.c[0]; }

Rat nrd(const QuatElement& x) {
  const Rat& a = x.alg->a;
  const Rat& b = x.alg->b;
  return x.c[0] * x.c[0] - a * x.c[1] * x.c[1] - b * x.c[2] * x.c[2] + a * b * x.c[3] * x.c[3];
}

bool is_integral(const QuatElement& x) {
  return trd(x).get_den() == 1 && nrd(x).get_den() == 1;
}

// ---- linear algebra ---------------------------------------------------------

std::vector<std::array<Int, 4>> hnf(std::vector<std::array<Int, 4>> rows) {
  size_t n = rows.size(), r = 0;
  auto axpy = [](std::array<Int, 4>& dst, const Int& q, const std::array<Int, 4>& src) {
    for (int k = 0; k < 4; ++k) dst[k] -= q * src[k];
  };
  for (int col = 0; col < 4 && r < n; ++col) {
    bool pivot = false;
    for (;;) {
      size_t best = n;
      for (size_t i = r; i < n; ++i)
        if (rows[i][col] != 0 && (best == n || abs(rows[i][col]) < abs(rows[best][col]))) best = i;
      if (best == n) break;
      pivot = true;
      std::swap(rows[r], rows[best]);
      bool done = true;
      for (size_t i = r + 1; i < n; ++i) {
        if (rows[i][col] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), rows[i][col].get_mpz_t(), rows[r][col].get_mpz_t());
        axpy(rows[i], q, rows[r]);
        if (rows[i][col] != 0) done = false;
      }
      if (done) break;
    }
    if (!pivot) continue;
    if (rows[r][col] < 0)
      for (auto& v : rows[r]) v = -v;
    for (size_t i = 0; i < r; ++i) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), rows[i][col].get_mpz_t(), rows[r][col].get_mpz_t());
      axpy(rows[i], q, rows[r]);
    }
    ++r;
  }
  rows.resize(r);
  return rows;
}

namespace {

std::vector<RatVec> rational_hnf(const std::vector<RatVec>& rows) {
  Int den = 1;
  for (const auto& r : rows)
    for (const auto& x : r) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den().get_mpz_t());
  std::vector<std::array<Int, 4>> ints;
  ints.reserve(rows.size());
  for (const auto& r : rows) {
    std::array<Int, 4> v;
    for (int k = 0; k < 4; ++k) {
      Rat s = r[k] * den;
      v[k] = s.get_num();
    }
    ints.push_back(v);
  }
  std::vector<RatVec> out;
  for (const auto& v : hnf(std::move(ints))) {
    RatVec w;
    for (int k = 0; k < 4; ++k) {
      w[k] = frac(v[k], den);
    }
    out.push_back(w);
  }
  return out;
}

QuatElement unit(AlgebraPtr A, int k) {
  QuatElement e{std::move(A), {0, 0, 0, 0}};
  e.c[k] = 1;
  return e;
}

bool all_integral(const RatVec& v) {
  for (const auto& x : v)
    if (x.get_den() != 1) return false;
  return true;
}

}  // namespace

QuatLattice lattice_from_rows(AlgebraPtr A, const std::vector<RatVec>& rows) {
  auto h = rational_hnf(rows);
  if (h.size() != 4) fail("NotFullRank", "lattice spans only " + std::to_string(h.size()) + " dimensions");
  QuatLattice L{std::move(A), {}};
  for (int i = 0; i < 4; ++i) L.basis[i] = h[i];
  return L;
}

QuatLattice lattice_from_elements(AlgebraPtr A, const std::vector<QuatElement>& xs) {
  std::vector<RatVec> rows;
  for (const auto& x : xs) rows.push_back(x.c);
  return lattice_from_rows(std::move(A), rows);
}

std::vector<QuatElement> QuatLattice::elements() const {
  std::vector<QuatElement> out;
  for (int i = 0; i < 4; ++i) out.push_back(element(i));
  return out;
}

RatMat mat_inverse(const RatMat& m) {
  RatMat a = m, inv{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) inv[i][j] = (i == j) ? 1 : 0;
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    while (piv < 4 && a[piv][c] == 0) ++piv;
    if (piv == 4) fail("Degenerate", "singular matrix");
    std::swap(a[piv], a[c]);
    std::swap(inv[piv], inv[c]);
    Rat s = 1 / a[c][c];
    for (int j = 0; j < 4; ++j) {
      a[c][j] *= s;
      inv[c][j] *= s;
    }
    for (int i = 0; i < 4; ++i) {
      if (i == c || a[i][c] == 0) continue;
      Rat f = a[i][c];
      for (int j = 0; j < 4; ++j) {
        a[i][j] -= f * a[c][j];
        inv[i][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

Rat mat_det(const RatMat& m) {
  RatMat a = m;
  Rat det = 1;
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    while (piv < 4 && a[piv][c] == 0) ++piv;
    if (piv == 4) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (int i = c + 1; i < 4; ++i) {
      if (a[i][c] == 0) continue;
      Rat f = a[i][c] / a[c][c];
      for (int j = c; j < 4; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return det;
}

RatVec vec_mat(const RatVec& v, const RatMat& m) {
  RatVec r{0, 0, 0, 0};
  for (int i = 0; i < 4; ++i) {
    if (v[i] == 0) continue;
    for (int j = 0; j < 4; ++j) r[j] += v[i] * m[i][j];
  }
  return r;
}

RatVec coords_in(const QuatLattice& L, const QuatElement& x) { return vec_mat(x.c, mat_inverse(L.basis)); }

bool contains(const QuatLattice& L, const QuatElement& x) { return all_integral(coords_in(L, x)); }

bool contains(const QuatLattice& big, const QuatLattice& small) {
  RatMat inv = mat_inverse(big.basis);
  for (const auto& row : small.basis)
    if (!all_integral(vec_mat(row, inv))) return false;
  return true;
}

Rat lattice_index(const QuatLattice& big, const QuatLattice& small) {
  Rat r = mat_det(small.basis) / mat_det(big.basis);
  return r < 0 ? Rat(-r) : r;
}

std::array<std::array<Rat, 4>, 4> trace_gram(const QuatLattice& L) {
  std::array<std::array<Rat, 4>, 4> G;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) G[i][j] = G[j][i] = trd(L.element(i) * conj(L.element(j)));
  return G;
}

bool is_order(const QuatLattice& L) {
  RatMat inv = mat_inverse(L.basis);
  if (!all_integral(vec_mat(RatVec{1, 0, 0, 0}, inv))) return false;
  for (int i = 0; i < 4; ++i) {
    if (!is_integral(L.element(i))) return false;
    for (int j = 0; j < 4; ++j)
      if (!all_integral(vec_mat((L.element(i) * L.element(j)).c, inv))) return false;
  }
  return true;
}

Int discrd(const QuatOrder& O) {
  RatMat G;
  auto tg = trace_gram(O);
  for (int i = 0; i < 4; ++i) G[i] = tg[i];
  Rat d = mat_det(G);
  if (d < 0) d = -d;
  Rat r;
  if (!rat_sqrt(d, &r) || r.get_den() != 1) fail("NotASquare", "|det Trd gram| = " + to_string(d) + " is not a square");
  return r.get_num();
}

QuatOrder order_from_generators(AlgebraPtr A, const std::vector<QuatElement>& xs, int* iterations) {
  std::vector<RatVec> rows{RatVec{1, 0, 0, 0}};
  for (const auto& x : xs) rows.push_back(x.c);
  std::vector<RatVec> cur = rational_hnf(rows);
  int it = 0;
  for (;;) {
    ++it;
    std::vector<RatVec> next = cur;
    for (const auto& u : cur)
      for (const auto& v : cur) next.push_back((QuatElement{A, u} * QuatElement{A, v}).c);
    next = rational_hnf(next);
    if (next == cur) break;
    cur = std::move(next);
    if (it > 64) throw std::logic_error("order_from_generators: closure does not stabilize");
  }
  if (iterations) *iterations = it;
  if (cur.size() != 4) fail("NotFullRank", "generators span only " + std::to_string(cur.size()) + " dimensions");
  QuatOrder O{std::move(A), {}};
  for (int i = 0; i < 4; ++i) O.basis[i] = cur[i];
  for (int i = 0; i < 4; ++i)
    if (!is_integral(O.element(i))) fail("NotIntegral", "generated ring contains non-integral elements");
  return O;
}

QuatOrder extend_order(const QuatOrder& O, const QuatElement& x) {
  auto gens = O.elements();
  gens.push_back(x);
  return order_from_generators(O.alg, gens);
}

namespace {

// {x : x * M_k in L for all k}, where M_k maps x to a product with the k-th
// basis vector of I.
template <class Mul>
QuatOrder multiplier_ring(const QuatLattice& I, Mul product) {
  RatMat inv = mat_inverse(I.basis);
  std::vector<RatVec> cols;
  for (int k = 0; k < 4; ++k) {
    RatMat Mk;
    for (int m = 0; m < 4; ++m) Mk[m] = vec_mat(product(I.element(k), unit(I.alg, m)).c, inv);
    for (int c = 0; c < 4; ++c) cols.push_back(RatVec{Mk[0][c], Mk[1][c], Mk[2][c], Mk[3][c]});
  }
  QuatLattice M = lattice_from_rows(I.alg, cols);
  RatMat Minv = mat_inverse(M.basis);
  std::vector<RatVec> dual;
  for (int i = 0; i < 4; ++i) dual.push_back(RatVec{Minv[0][i], Minv[1][i], Minv[2][i], Minv[3][i]});
  return lattice_from_rows(I.alg, dual);
}

}  // namespace

QuatOrder right_order(const QuatLattice& I) {
  return multiplier_ring(I, [](const QuatElement& ik, const QuatElement& x) { return ik * x; });
}

QuatOrder left_order(const QuatLattice& I) {
  return multiplier_ring(I, [](const QuatElement& ik, const QuatElement& x) { return x * ik; });
}

// ---- Gram matrices to algebras ------------------------------------------------

LdlResult ldl_to_algebra(const GramMatrix& G) {
  if (!G.symmetric()) throw std::invalid_argument("ldl_to_algebra: Gram matrix is not symmetric");
  if (G.g[0][0] != 2) throw std::invalid_argument("ldl_to_algebra: G[0][0] must be 2");
  if (G.det() == 0) fail("Degenerate", "Gram matrix is singular");
  LdlResult r;
  for (auto& row : r.L) row.fill(0);
  for (int j = 0; j < 4; ++j) {
    Rat d = Rat(G.g[j][j]);
    for (int k = 0; k < j; ++k) d -= r.L[j][k] * r.L[j][k] * r.D[k];
    if (d == 0) fail("Degenerate", "zero pivot in LDL");
    r.D[j] = d;
    r.L[j][j] = 1;
    for (int i = j + 1; i < 4; ++i) {
      Rat s = Rat(G.g[i][j]);
      for (int k = 0; k < j; ++k) s -= r.L[i][k] * r.L[j][k] * r.D[k];
      r.L[i][j] = s / d;
    }
  }
  Rat a = -r.D[1] / 2, b = -r.D[2] / 2;
  if (!rat_sqrt(2 * r.D[3] / (r.D[1] * r.D[2]), &r.c_prime))
    fail("NotASquare", "2 d3 / (d1 d2) = " + to_string(Rat(2 * r.D[3] / (r.D[1] * r.D[2]))) + " is not a rational square");
  r.alg = QuatAlgebra::make(a, b);
  const RatVec e[4] = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, r.c_prime}};
  for (int i = 0; i < 4; ++i) {
    r.images[i] = RatVec{0, 0, 0, 0};
    for (int k = 0; k <= i; ++k)
      for (int c = 0; c < 4; ++c) r.images[i][c] += r.L[i][k] * e[k][c];
  }
  return r;
}

QuatElement from_pairings(const LdlResult& frame, const GramMatrix& G, const std::array<Int, 4>& t) {
  RatMat Gq;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) Gq[i][j] = G.g[i][j];
  RatVec tv{t[0], t[1], t[2], t[3]};
  RatVec coeff = vec_mat(tv, mat_inverse(Gq));
  return QuatElement{frame.alg, vec_mat(coeff, frame.images)};
}

RatVec MultTable::mul(const RatVec& x, const RatVec& y) const {
  RatVec r{0, 0, 0, 0};
  for (int i = 0; i < 4; ++i) {
    if (x[i] == 0) continue;
    for (int j = 0; j < 4; ++j) {
      if (y[j] == 0) continue;
      Rat s = x[i] * y[j];
      for (int t = 0; t < 4; ++t) r[t] += s * m[i][j][t];
    }
  }
  return r;
}

bool MultTable::associative() const {
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s)
      for (int u = 0; u < 4; ++u) {
        RatVec er{0, 0, 0, 0}, es{0, 0, 0, 0}, eu{0, 0, 0, 0};
        er[r] = es[s] = eu[u] = 1;
        if (mul(mul(er, es), eu) != mul(er, mul(es, eu))) return false;
      }
  return true;
}

namespace {

// Trace-zero parts g_i' = g_i - G[0][i]/2 and their Gram matrix.
std::array<std::array<Rat, 4>, 4> trace_zero_gram(const GramMatrix& G) {
  std::array<std::array<Rat, 4>, 4> H;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (i == 0 || j == 0)
        H[i][j] = (i == j) ? 2 : 0;
      else
        H[i][j] = Rat(G.g[i][j]) - frac(G.g[0][i] * G.g[0][j], 2);
    }
  return H;
}

int perm_sign(int r, int s, int w) {
  // sign of (r, s, w) as a permutation of (1, 2, 3)
  int inv = (r > s) + (r > w) + (s > w);
  return inv % 2 ? -1 : 1;
}

}  // namespace

MultTable mult_table_from_gram(const GramMatrix& G, int sign) {
  if (G.g[0][0] != 2) throw std::invalid_argument("mult_table_from_gram: G[0][0] must be 2");
  Int det = G.det();
  Int root;
  if (det <= 0 || !is_square(det, &root)) fail("NotPerfectSquare", "det G = " + to_string(det) + " is not a perfect square");
  Rat tau = frac(sign * root, 2);
  auto H = trace_zero_gram(G);
  RatMat Hm;
  for (int i = 0; i < 4; ++i) Hm[i] = H[i];
  RatMat Hinv = mat_inverse(Hm);

  // table over the trace-zero parts
  MultTable T0;
  for (auto& a : T0.m)
    for (auto& b : a) b = RatVec{0, 0, 0, 0};
  for (int s = 0; s < 4; ++s) {
    T0.m[0][s][s] = 1;
    T0.m[s][0][s] = 1;
  }
  for (int r = 1; r < 4; ++r) T0.m[r][r][0] = -H[r][r] / 2;
  for (int r = 1; r < 4; ++r)
    for (int s = r + 1; s < 4; ++s) {
      int w = 6 - r - s;
      RatVec rhs{0, 0, 0, 0};
      rhs[0] = -H[r][s];
      rhs[w] = perm_sign(r, s, w) * tau;
      RatVec x = vec_mat(rhs, Hinv);
      T0.m[r][s] = x;
      RatVec y;
      y[0] = -H[r][s] - x[0];
      for (int t = 1; t < 4; ++t) y[t] = -x[t];
      T0.m[s][r] = y;
    }

  // back to the original basis: g = P g', g' = P^{-1} g
  RatMat P, Pinv;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) P[i][j] = Pinv[i][j] = (i == j) ? 1 : 0;
  for (int i = 1; i < 4; ++i) {
    P[i][0] = frac(G.g[0][i], 2);
    Pinv[i][0] = -P[i][0];
  }
  MultTable T;
  for (int r = 0; r < 4; ++r)
    for (int s = 0; s < 4; ++s) T.m[r][s] = vec_mat(T0.mul(P[r], P[s]), Pinv);
  return T;
}

bool prop_a_holds(const GramMatrix& G, const MultTable& T) {
  // move the table to the trace-zero parts and expand Trd(g1' g2' conj(g3'))
  RatVec g[4];
  for (int i = 0; i < 4; ++i) {
    g[i] = RatVec{0, 0, 0, 0};
    g[i][i] = 1;
    if (i > 0) g[i][0] = -frac(G.g[0][i], 2);
  }
  RatVec prod = T.mul(g[1], g[2]);
  // Trd(x conj(y)) = x^T G y in the original basis
  Rat tau = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) tau += prod[a] * Rat(G.g[a][b]) * g[3][b];
  Rat lhs = 4 * tau * tau;
  return lhs == Rat(G.det());
}

}  // namespace endring
