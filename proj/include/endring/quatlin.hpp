#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "endring/gram.hpp"
#include "endring/rng.hpp"

namespace endring {

using RatVec = std::array<Rat, 4>;
using RatMat = std::array<RatVec, 4>;

// H(a, b): i^2 = a, j^2 = b, ij = -ji.
struct QuatAlgebra {
  Rat a, b;

  static std::shared_ptr<const QuatAlgebra> make(const Rat& a, const Rat& b);
  bool operator==(const QuatAlgebra& o) const { return a == o.a && b == o.b; }
};

using AlgebraPtr = std::shared_ptr<const QuatAlgebra>;

// Coordinates over 1, i, j, ij.
struct QuatElement {
  AlgebraPtr alg;
  RatVec c;

  static QuatElement scalar(AlgebraPtr A, const Rat& x);
  bool operator==(const QuatElement& o) const { return c == o.c; }
};

QuatElement operator+(const QuatElement& x, const QuatElement& y);
QuatElement operator-(const QuatElement& x, const QuatElement& y);
QuatElement operator-(const QuatElement& x);
QuatElement operator*(const QuatElement& x, const QuatElement& y);
QuatElement operator*(const Rat& s, const QuatElement& x);
QuatElement conj(const QuatElement& x);
Rat trd(const QuatElement& x);
Rat nrd(const QuatElement& x);
bool is_integral(const QuatElement& x);

// A full-rank lattice; rows of `basis` are element coordinates, kept in the
// canonical rational Hermite normal form, so equal lattices have equal bases.
struct QuatLattice {
  AlgebraPtr alg;
  RatMat basis;

  QuatElement element(int i) const { return QuatElement{alg, basis[i]}; }
  std::vector<QuatElement> elements() const;
  bool operator==(const QuatLattice& o) const { return basis == o.basis; }
  bool operator<(const QuatLattice& o) const { return basis < o.basis; }
};

using QuatOrder = QuatLattice;

// Integer row Hermite normal form (upper triangular, positive pivots, entries
// above a pivot reduced into [0, pivot)). Zero rows are dropped.
std::vector<std::array<Int, 4>> hnf(std::vector<std::array<Int, 4>> rows);
// Throws NotFullRank unless the rows span Q^4.
QuatLattice lattice_from_rows(AlgebraPtr A, const std::vector<RatVec>& rows);
QuatLattice lattice_from_elements(AlgebraPtr A, const std::vector<QuatElement>& xs);

RatMat mat_inverse(const RatMat& m);
Rat mat_det(const RatMat& m);
RatVec vec_mat(const RatVec& v, const RatMat& m);  // row vector times matrix

// Coordinates of x over the lattice basis; integral iff x lies in L.
RatVec coords_in(const QuatLattice& L, const QuatElement& x);
bool contains(const QuatLattice& L, const QuatElement& x);
bool contains(const QuatLattice& big, const QuatLattice& small);
// [big : small] as a rational (an integer when small is a sublattice).
Rat lattice_index(const QuatLattice& big, const QuatLattice& small);

// Trd(b_i conj(b_j)) over the lattice basis.
std::array<std::array<Rat, 4>, 4> trace_gram(const QuatLattice& L);
bool is_order(const QuatLattice& L);
// sqrt |det trace_gram|; throws NotASquare if that is not an integer square.
Int discrd(const QuatOrder& O);

// Smallest order containing 1 and xs: HNF of products until stable.
QuatOrder order_from_generators(AlgebraPtr A, const std::vector<QuatElement>& xs, int* iterations = nullptr);
QuatOrder extend_order(const QuatOrder& O, const QuatElement& x);
// {x : I x in I}.
QuatOrder right_order(const QuatLattice& I);
QuatOrder left_order(const QuatLattice& I);

// ---- Gram matrices to algebras -----------------------------------------

struct LdlResult {
  AlgebraPtr alg;
  RatMat L;        // unit lower triangular, G = L D L^T
  RatVec D;
  Rat c_prime;     // sqrt(2 D3 / (D1 D2)) > 0
  RatMat images;   // row r: coordinates of g_r in H(a, b)
};

// Throws Degenerate or NotASquare.
LdlResult ldl_to_algebra(const GramMatrix& G);
// Element of H(a, b) with pairings t_r = Trd(x conj(g_r)).
QuatElement from_pairings(const LdlResult& frame, const GramMatrix& G, const std::array<Int, 4>& t);

// g_r g_s = sum_t m[r][s][t] g_t.
struct MultTable {
  std::array<std::array<RatVec, 4>, 4> m;

  RatVec mul(const RatVec& x, const RatVec& y) const;
  bool associative() const;
};

// Trd(g1' g2' conj(g3')) = sign * sqrt(det G) / 2 on the trace-zero parts
// g_i' = g_i - Trd(g_i)/2. Throws NotPerfectSquare.
MultTable mult_table_from_gram(const GramMatrix& G, int sign);
// (2 Trd(g1' g2' conj(g3')))^2 == det G, expanded through the table.
bool prop_a_holds(const GramMatrix& G, const MultTable& T);

// ---- p-adic and overorder machinery --------------------------------------

// Integer combinations e_i of the basis, orthogonal for Trd(x conj y),
// with a change of basis whose determinant is prime to p (p odd).
std::vector<QuatElement> local_diagonal_basis(const QuatOrder& O, const Int& p);
bool is_p_saturated(const QuatOrder& O, const Int& p);
// Adjoins e/p for diagonal e with p^2 | Nrd(e) until v_p(discrd) <= 1.
// Throws NotLocallyMaximalElsewhere if that stalls.
QuatOrder p_saturate(const QuatOrder& O, const Int& p);
// pO + lift of the radical of the trace form mod p; throws NotMaximal.
QuatLattice two_sided_P(const QuatOrder& O, const Int& p);
QuatOrder z_plus(const QuatLattice& P);

struct OverorderStats {
  int orders_visited = 0;
  int large_q_steps = 0;
  std::vector<std::string> warnings;
};

// Index-q overorders of O (q != ramified prime).
std::vector<QuatOrder> index_q_overorders(const QuatOrder& O, const Int& q, OverorderStats* stats = nullptr);
// All maximal orders containing L, given the factorization of discrd(L).
// Throws FactorizationMismatch.
std::vector<QuatOrder> maximal_overorders(const QuatOrder& L, const Int& p, const Factorization& discrd_factors,
                                          OverorderStats* stats = nullptr);
// Prod over q != p of (v_q(discrd) + 1).
Int overorder_bound(const Factorization& discrd_factors, const Int& p);

struct MaxOrder {
  AlgebraPtr alg;
  QuatOrder order;
};

MaxOrder standard_max_order(const Int& p);
// Walk of about log2 p steps along right orders of random norm-q left ideals.
MaxOrder random_max_order(const Int& p, Rng& rng);
// Number of x in O with Nrd(x) = n (positive definite algebras only).
long count_norm(const QuatOrder& O, const Int& n);

}  // namespace endring
