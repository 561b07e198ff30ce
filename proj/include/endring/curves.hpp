#pragma once

#include <string>
#include <vector>

#include "endring/fields.hpp"

namespace endring {

// y^2 = x^3 + a x + b over F_{p^2}.
struct Curve {
  Fp2 a, b;
  const Field* field() const { return a.F; }
  bool operator==(const Curve& o) const { return a == o.a && b == o.b; }
  bool operator!=(const Curve& o) const { return !(*this == o); }
};

template <class T>
struct Point {
  bool inf = true;
  T x, y;

  static Point infinity() { return Point{}; }
  static Point affine(T x_, T y_) { return Point{false, std::move(x_), std::move(y_)}; }
  bool operator==(const Point& o) const {
    if (inf || o.inf) return inf == o.inf;
    return x == o.x && y == o.y;
  }
  bool operator!=(const Point& o) const { return !(*this == o); }
};

bool is_nonsingular(const Curve& E);
Fp2 j_invariant(const Curve& E);
Curve curve_from_j(const Fp2& j);
Curve conjugate_curve(const Curve& E);
// (x, y) -> (u^2 x, u^3 y) sends E to (u^4 a, u^6 b).
Curve scale_curve(const Curve& E, const Fp2& u);
// All u with scale_curve(E1, u) == E2.
std::vector<Fp2> isomorphisms(const Curve& E1, const Curve& E2, Rng& rng);
// Representatives delta of the twists (a delta^2, b delta^3) relevant for j:
// quadratic in general, quartic at j = 1728, sextic at j = 0.
std::vector<Curve> twists(const Curve& E);

// ---- point arithmetic ---------------------------------------------------

template <class T>
T lift_to(const T& like, const Fp2& v) {
  return ElemTraits<T>::lift(ElemTraits<T>::ctx(like), v);
}

template <class T>
bool on_curve(const Curve& E, const Point<T>& P) {
  if (P.inf) return true;
  return P.y * P.y == (P.x * P.x + lift_to(P.x, E.a)) * P.x + lift_to(P.x, E.b);
}

template <class T>
Point<T> neg(const Point<T>& P) {
  if (P.inf) return P;
  return Point<T>::affine(P.x, -P.y);
}

template <class T>
Point<T> add(const Curve& E, const Point<T>& P, const Point<T>& Q) {
  if (P.inf) return Q;
  if (Q.inf) return P;
  T lambda;
  if (P.x == Q.x) {
    if (P.y != Q.y || P.y.is_zero()) return Point<T>::infinity();
    T x2 = P.x * P.x;
    lambda = (x2 + x2 + x2 + lift_to(P.x, E.a)) * inv(P.y + P.y);
  } else {
    lambda = (Q.y - P.y) * inv(Q.x - P.x);
  }
  T x3 = lambda * lambda - P.x - Q.x;
  T y3 = lambda * (P.x - x3) - P.y;
  return Point<T>::affine(std::move(x3), std::move(y3));
}

template <class T>
Point<T> sub(const Curve& E, const Point<T>& P, const Point<T>& Q) {
  return add(E, P, neg(Q));
}

namespace detail {

template <class T>
struct Jac {
  T X, Y, Z;
  bool inf;
};

template <class T>
void jac_double(Jac<T>& P, const T& a) {
  if (P.inf) return;
  if (P.Y.is_zero()) {
    P.inf = true;
    return;
  }
  T YY = P.Y * P.Y;
  T S = P.X * YY;
  S = S + S;
  S = S + S;
  T ZZ = P.Z * P.Z;
  T XX = P.X * P.X;
  T M = XX + XX + XX + a * ZZ * ZZ;
  T X3 = M * M - S - S;
  T YYYY = YY * YY;
  T Y8 = YYYY + YYYY;
  Y8 = Y8 + Y8;
  Y8 = Y8 + Y8;
  T Y3 = M * (S - X3) - Y8;
  T Z3 = P.Y * P.Z;
  P.Z = Z3 + Z3;
  P.X = std::move(X3);
  P.Y = std::move(Y3);
}

template <class T>
void jac_add_affine(Jac<T>& P, const Point<T>& Q, const T& a) {
  if (Q.inf) return;
  if (P.inf) {
    P = Jac<T>{Q.x, Q.y, ElemTraits<T>::one(ElemTraits<T>::ctx(Q.x)), false};
    return;
  }
  T Z1Z1 = P.Z * P.Z;
  T U2 = Q.x * Z1Z1;
  T S2 = Q.y * P.Z * Z1Z1;
  T H = U2 - P.X;
  T r = S2 - P.Y;
  if (H.is_zero()) {
    if (r.is_zero()) {
      jac_double(P, a);
    } else {
      P.inf = true;
    }
    return;
  }
  T HH = H * H;
  T HHH = HH * H;
  T V = P.X * HH;
  T X3 = r * r - HHH - V - V;
  T Y3 = r * (V - X3) - P.Y * HHH;
  P.Z = P.Z * H;
  P.X = std::move(X3);
  P.Y = std::move(Y3);
}

template <class T>
Point<T> jac_to_affine(const Jac<T>& P) {
  if (P.inf || P.Z.is_zero()) return Point<T>::infinity();
  T zi = inv(P.Z);
  T zi2 = zi * zi;
  return Point<T>::affine(P.X * zi2, P.Y * zi2 * zi);
}

}  // namespace detail

template <class T>
Point<T> mul(const Curve& E, const Point<T>& P, const Int& n) {
  if (P.inf || n == 0) return Point<T>::infinity();
  if (n < 0) return mul(E, neg(P), Int(-n));
  T a = lift_to(P.x, E.a);
  detail::Jac<T> R{P.x, P.y, P.x, true};
  size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  for (size_t i = bits; i-- > 0;) {
    detail::jac_double(R, a);
    if (mpz_tstbit(n.get_mpz_t(), i)) detail::jac_add_affine(R, P, a);
  }
  return detail::jac_to_affine(R);
}

template <class T>
Point<T> mul(const Curve& E, const Point<T>& P, long long n) {
  return mul(E, P, Int(static_cast<long>(n)));
}

template <class T>
Point<T> frobenius(const Point<T>& P) {
  if (P.inf) return P;
  return Point<T>::affine(frobenius(P.x), frobenius(P.y));
}

// Uniform-ish random affine point: random x until the right side is a square.
template <class T>
Point<T> random_point(const Curve& E, typename ElemTraits<T>::Ctx ctx, Rng& rng) {
  T a = ElemTraits<T>::lift(ctx, E.a), b = ElemTraits<T>::lift(ctx, E.b);
  for (;;) {
    T x = ElemTraits<T>::random(ctx, rng);
    T rhs = (x * x + a) * x + b;
    T y;
    if (!sqrt(rhs, &y)) continue;
    if (rng.coin()) y = -y;
    return Point<T>::affine(std::move(x), std::move(y));
  }
}

inline Point<Fq> lift_point(const Point<Fp2>& P, const Level& L) {
  if (P.inf) return Point<Fq>::infinity();
  return Point<Fq>::affine(L.lift(P.x), L.lift(P.y));
}

// ---- normalization and supersingularity ----------------------------------

// Monte-Carlo test that [p-1] kills E(F_{p^2}) (equivalently pi_E = [p]).
bool has_exponent_p_minus_1(const Curve& E, Rng& rng, int trials = 20);
// Returns the twist of E with #E(F_{p^2}) = (p-1)^2; throws NotSupersingular.
Curve normalize_model(const Curve& E, Rng& rng);
bool is_supersingular(const Curve& E, Rng& rng);

// ---- division polynomials ----------------------------------------------

// x-only division polynomial: roots are the x-coordinates of nonzero m-torsion.
// For even m this is f_m * (x^3 + a x + b); psi_2 = x^3 + a x + b.
Poly<Fp2> division_polynomial(const Curve& E, int m);

// ---- isogenies ----------------------------------------------------------

enum class StepKind { Velu, Frobenius, Isomorphism, Scalar };

std::string kind_name(StepKind k);

// A rational map between curves. Velu steps send (x, y) to
// (xnum(x) / h(x)^ex, y * ynum(x) / h(x)^ey) where h is the kernel polynomial.
struct IsogenyStep {
  StepKind kind = StepKind::Isomorphism;
  Curve dom, cod;
  Int degree = 1;
  Poly<Fp2> kernel, xnum, ynum;
  int ex = 0, ey = 0;
  Fp2 u;     // Isomorphism: (x, y) -> (u^2 x, u^3 y)
  Int n = 1;  // Scalar: [n]
};

struct IsogenyChain {
  std::vector<IsogenyStep> steps;
  Curve base;  // domain when empty

  Curve domain() const { return steps.empty() ? base : steps.front().dom; }
  Curve codomain() const { return steps.empty() ? base : steps.back().cod; }
  Int degree() const;
  bool is_endomorphism() const { return domain() == codomain(); }
  // Consecutive endpoints agree exactly.
  bool well_formed() const;
  void append(const IsogenyStep& s) { steps.push_back(s); }
  void append(const IsogenyChain& c) { steps.insert(steps.end(), c.steps.begin(), c.steps.end()); }
};

// Throws BadKernel unless h is a monic kernel polynomial of a cyclic
// subgroup of order ell in {2, 3, 5}. Callers that enumerated h from the
// division polynomial themselves may skip the divisibility checks.
IsogenyStep velu_isogeny(const Curve& E, const Poly<Fp2>& h, int ell, bool validate = true);
IsogenyStep frobenius_step(const Curve& E);
IsogenyStep isomorphism_step(const Curve& E, const Fp2& u);
IsogenyStep scalar_step(const Curve& E, const Int& n);
IsogenyStep conjugate_step(const IsogenyStep& s);
// Post-composes a Velu or isomorphism step with (x, y) -> (u^2 x, u^3 y).
IsogenyStep compose_scaling(const IsogenyStep& s, const Fp2& u);
IsogenyStep dual_step(const IsogenyStep& s, Rng& rng);
// Dual of a Velu step whose dual kernel polynomial on the codomain is known.
IsogenyStep dual_from_kernel(const IsogenyStep& s, const Poly<Fp2>& dual_kernel, Rng& rng);
// Kernel polynomial of s(K), where K is the order-ell subgroup containing a
// point whose x-coordinate is a root of the irreducible g (g coprime to the
// kernel of s). For any such K this is the kernel of the dual.
Poly<Fp2> push_kernel(const IsogenyStep& s, const Poly<Fp2>& g);
IsogenyChain conjugate_chain(const IsogenyChain& c);

template <class T>
Point<T> evaluate_step(const IsogenyStep& s, const Point<T>& P) {
  if (P.inf) return P;
  switch (s.kind) {
    case StepKind::Frobenius:
      return frobenius(P);
    case StepKind::Isomorphism: {
      T u = lift_to(P.x, s.u);
      T u2 = u * u;
      return Point<T>::affine(u2 * P.x, u2 * u * P.y);
    }
    case StepKind::Scalar:
      return mul(s.dom, P, s.n);
    case StepKind::Velu: {
      T hx = eval_at(s.kernel, P.x);
      if (hx.is_zero()) return Point<T>::infinity();
      T hi = inv(hx);
      T hpow = hi;
      std::vector<T> powers{hi};
      int need = std::max(s.ex, s.ey);
      for (int i = 1; i < need; ++i) {
        hpow = hpow * hi;
        powers.push_back(hpow);
      }
      T x = eval_at(s.xnum, P.x) * powers[s.ex - 1];
      T y = P.y * eval_at(s.ynum, P.x) * powers[s.ey - 1];
      return Point<T>::affine(std::move(x), std::move(y));
    }
  }
  return P;
}

template <class T>
Point<T> evaluate_chain(const IsogenyChain& c, const Point<T>& P) {
  Point<T> Q = P;
  for (const auto& s : c.steps) {
    Q = evaluate_step(s, Q);
    if (Q.inf) break;
  }
  return Q;
}

}  // namespace endring
