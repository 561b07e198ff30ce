#include "endring/curves.hpp"

#include <algorithm>
#include <map>

namespace endring {

namespace {

using P2 = Poly<Fp2>;

P2 cst(const Fp2& v) { return P2::constant(v); }

P2 cubic(const Curve& E) {
  const Field* F = E.field();
  return P2(F, {E.b, E.a, F->zero(), F->one()});
}

P2 cubic_derivative(const Curve& E) {
  const Field* F = E.field();
  return P2(F, {E.a, F->zero(), F->from_int(3)});
}

Fp2 small(const Field* F, long long v) { return F->from_int(v); }

// x(2P) as a rational function of x(P)
template <class T>
T double_x(const Curve& E, const T& x) {
  T a = lift_to(x, E.a), b = lift_to(x, E.b);
  T x2 = x * x;
  T num = x2 * x2 - lift_to(x, small(E.field(), 2)) * a * x2 - lift_to(x, small(E.field(), 8)) * b * x + a * a;
  T den = lift_to(x, small(E.field(), 4)) * ((x2 + a) * x + b);
  return num * inv(den);
}

bool scaling_matches(const Curve& E1, const Curve& E2, const Fp2& u) { return scale_curve(E1, u) == E2; }

}  // namespace

bool is_nonsingular(const Curve& E) {
  const Field* F = E.field();
  Fp2 d = small(F, 4) * E.a * E.a * E.a + small(F, 27) * E.b * E.b;
  return !d.is_zero();
}

Fp2 j_invariant(const Curve& E) {
  const Field* F = E.field();
  Fp2 a3 = small(F, 4) * E.a * E.a * E.a;
  Fp2 d = a3 + small(F, 27) * E.b * E.b;
  if (d.is_zero()) fail("Singular", "discriminant vanishes");
  return small(F, 1728) * a3 * inv(d);
}

Curve curve_from_j(const Fp2& j) {
  const Field* F = j.F;
  if (j.is_zero()) return Curve{F->zero(), F->one()};
  Fp2 c = small(F, 1728);
  if (j == c) return Curve{F->one(), F->zero()};
  Fp2 k = j * inv(c - j);
  return Curve{small(F, 3) * k, small(F, 2) * k};
}

Curve conjugate_curve(const Curve& E) { return Curve{frobenius(E.a), frobenius(E.b)}; }

Curve scale_curve(const Curve& E, const Fp2& u) {
  Fp2 u2 = u * u, u4 = u2 * u2;
  return Curve{u4 * E.a, u4 * u2 * E.b};
}

std::vector<Fp2> isomorphisms(const Curve& E1, const Curve& E2, Rng& rng) {
  std::vector<Fp2> out;
  if (E1.a.is_zero() != E2.a.is_zero() || E1.b.is_zero() != E2.b.is_zero()) return out;
  const Field* F = E1.field();
  std::vector<Fp2> r_candidates;
  if (!E1.a.is_zero() && !E1.b.is_zero()) {
    r_candidates.push_back((E2.b * inv(E1.b)) * inv(E2.a * inv(E1.a)));
  } else if (E1.b.is_zero()) {
    Fp2 c = E2.a * inv(E1.a);
    r_candidates = roots(P2(F, {-c, F->zero(), F->one()}), rng);
  } else {
    Fp2 c = E2.b * inv(E1.b);
    r_candidates = roots(P2(F, {-c, F->zero(), F->zero(), F->one()}), rng);
  }
  for (const Fp2& r : r_candidates) {
    Fp2 u;
    if (!sqrt(r, &u)) continue;
    for (const Fp2& v : {u, -u})
      if (scaling_matches(E1, E2, v)) out.push_back(v);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Curve> twists(const Curve& E) {
  const Field* F = E.field();
  std::vector<Curve> out{E};
  const Int& q = F->order();
  bool j0 = E.a.is_zero(), j1728 = E.b.is_zero();
  // delta with the largest possible class in F*/F*^6
  Fp2 g;
  for (u64 n = 1;; ++n) {
    g = F->make(n % F->p(), n / F->p() + 1);
    if (is_square(g)) continue;
    if (!j0 || !(pow(g, Int((q - 1) / 3)) == F->one())) break;
  }
  if (j0) {
    Fp2 d = F->one();
    for (int i = 1; i < 6; ++i) {
      d = d * g;
      out.push_back(Curve{E.a, E.b * d});
    }
  } else if (j1728) {
    Fp2 d = F->one();
    for (int i = 1; i < 4; ++i) {
      d = d * g;
      out.push_back(Curve{E.a * d, E.b});
    }
  } else {
    out.push_back(Curve{E.a * g * g, E.b * g * g * g});
  }
  return out;
}

bool has_exponent_p_minus_1(const Curve& E, Rng& rng, int trials) {
  const Field* F = E.field();
  Int e = Int(static_cast<unsigned long>(F->p())) - 1;
  for (int i = 0; i < trials; ++i) {
    Point<Fp2> P = random_point<Fp2>(E, F, rng);
    if (!mul(E, P, e).inf) return false;
  }
  return true;
}

Curve normalize_model(const Curve& E, Rng& rng) {
  if (!is_nonsingular(E)) fail("Singular", "discriminant vanishes");
  for (const Curve& C : twists(E))
    if (has_exponent_p_minus_1(C, rng)) return C;
  fail("NotSupersingular", "no twist has Frobenius [p]");
}

bool is_supersingular(const Curve& E, Rng& rng) {
  try {
    normalize_model(E, rng);
    return true;
  } catch (const DomainError&) {
    return false;
  }
}

// ---- division polynomials ----------------------------------------------

namespace {

struct DivPolys {
  const Curve& E;
  P2 F2;  // (4(x^3 + a x + b))^2
  std::map<int, P2> memo;

  explicit DivPolys(const Curve& e) : E(e) {
    const Field* F = E.field();
    P2 four = cst(small(F, 4));
    P2 big = four * cubic(E);
    F2 = big * big;
    Fp2 a = E.a, b = E.b;
    memo[0] = P2(F);
    memo[1] = cst(F->one());
    memo[2] = cst(F->one());
    memo[3] = P2(F, {-(a * a), small(F, 12) * b, small(F, 6) * a, F->zero(), small(F, 3)});
    Fp2 two = small(F, 2);
    memo[4] = P2(F, {two * (-(small(F, 8) * b * b) - a * a * a), two * (-(small(F, 4) * a * b)),
                     two * (-(small(F, 5) * a * a)), two * small(F, 20) * b, two * small(F, 5) * a, F->zero(), two});
  }

  const P2& f(int n) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    P2 r;
    if (n % 2 == 1) {
      int m = (n - 1) / 2;
      P2 a = f(m + 2), b = f(m), c = f(m - 1), d = f(m + 1);
      P2 t1 = a * b * b * b, t2 = c * d * d * d;
      r = (m % 2 == 0) ? F2 * t1 - t2 : t1 - F2 * t2;
    } else {
      int m = n / 2;
      P2 a = f(m + 2), b = f(m - 1), c = f(m - 2), d = f(m + 1), e = f(m);
      r = e * (a * b * b - c * d * d);
    }
    return memo[n] = r;
  }
};

}  // namespace

Poly<Fp2> division_polynomial(const Curve& E, int m) {
  if (m < 1) throw std::invalid_argument("division_polynomial requires m >= 1");
  DivPolys D(E);
  P2 r = D.f(m);
  if (m % 2 == 0) r = r * cubic(E);
  return r;
}

// ---- isogenies ----------------------------------------------------------

std::string kind_name(StepKind k) {
  switch (k) {
    case StepKind::Velu:
      return "velu";
    case StepKind::Frobenius:
      return "frobenius";
    case StepKind::Isomorphism:
      return "isomorphism";
    case StepKind::Scalar:
      return "scalar";
  }
  return "?";
}

Int IsogenyChain::degree() const {
  Int d = 1;
  for (const auto& s : steps) d *= s.degree;
  return d;
}

bool IsogenyChain::well_formed() const {
  for (size_t i = 1; i < steps.size(); ++i)
    if (steps[i - 1].cod != steps[i].dom) return false;
  return true;
}

IsogenyStep velu_isogeny(const Curve& E, const Poly<Fp2>& h, int ell, bool validate) {
  const Field* F = E.field();
  if (ell != 2 && ell != 3 && ell != 5) fail("BadKernel", "degree must be 2, 3 or 5");
  int n = ell == 2 ? 1 : (ell - 1) / 2;
  if (h.deg() != n || !h.lead().is_one()) fail("BadKernel", "kernel polynomial has the wrong shape");
  if (validate && !(division_polynomial(E, ell) % h).is_zero()) fail("BadKernel", "kernel polynomial does not divide the division polynomial");
  if (validate && ell == 5) {
    P2 num = P2(F, {E.a * E.a, -(small(F, 8) * E.b), -(small(F, 2) * E.a), F->zero(), F->one()}) % h;
    P2 den = (cst(small(F, 4)) * cubic(E)) % h, dinv;
    if (!invmod(den, h, &dinv)) fail("BadKernel", "kernel meets the 2-torsion");
    P2 dx = mulmod(num, dinv, h);
    if (!compose_mod(h, dx, h).is_zero()) fail("BadKernel", "kernel polynomial is not a subgroup");
  }

  IsogenyStep s;
  s.kind = StepKind::Velu;
  s.dom = E;
  s.degree = ell;
  s.kernel = h;
  Fp2 t, w;
  if (ell == 2) {
    Fp2 x0 = -h.c[0];
    t = small(F, 3) * x0 * x0 + E.a;
    w = x0 * t;
    s.xnum = P2(F, {t, -x0, F->one()});
    s.ynum = P2(F, {x0 * x0 - t, -(small(F, 2) * x0), F->one()});
    s.ex = 1;
    s.ey = 2;
  } else {
    Fp2 e1 = -h.coeff(n - 1), e2 = h.coeff(n - 2), e3 = -h.coeff(n - 3);
    if (n < 2) e2 = F->zero();
    if (n < 3) e3 = F->zero();
    Fp2 p1 = e1, p2 = e1 * e1 - small(F, 2) * e2, p3 = e1 * e1 * e1 - small(F, 3) * e1 * e2 + small(F, 3) * e3;
    Fp2 nn = small(F, n);
    t = small(F, 6) * p2 + small(F, 2) * E.a * nn;
    w = small(F, 10) * p3 + small(F, 6) * E.a * p1 + small(F, 4) * E.b * nn;
    P2 hp = derivative(h), hpp = derivative(hp);
    P2 Fc = cubic(E), Fd = cubic_derivative(E);
    P2 lin(F, {-(small(F, 2) * e1), small(F, ell)});
    P2 N = lin * h * h + cst(small(F, 4)) * Fc * (hp * hp - h * hpp) - cst(small(F, 2)) * Fd * hp * h;
    s.xnum = N;
    s.ynum = derivative(N) * h - cst(small(F, 2)) * N * hp;
    s.ex = 2;
    s.ey = 3;
  }
  s.cod = Curve{E.a - small(F, 5) * t, E.b - small(F, 7) * w};
  if (!is_nonsingular(s.cod)) fail("BadKernel", "singular codomain");
  return s;
}

IsogenyStep frobenius_step(const Curve& E) {
  IsogenyStep s;
  s.kind = StepKind::Frobenius;
  s.dom = E;
  s.cod = conjugate_curve(E);
  s.degree = Int(static_cast<unsigned long>(E.field()->p()));
  return s;
}

IsogenyStep isomorphism_step(const Curve& E, const Fp2& u) {
  IsogenyStep s;
  s.kind = StepKind::Isomorphism;
  s.dom = E;
  s.cod = scale_curve(E, u);
  s.degree = 1;
  s.u = u;
  return s;
}

IsogenyStep scalar_step(const Curve& E, const Int& n) {
  IsogenyStep s;
  s.kind = StepKind::Scalar;
  s.dom = E;
  s.cod = E;
  s.n = n;
  s.degree = n * n;
  return s;
}

IsogenyStep conjugate_step(const IsogenyStep& s) {
  IsogenyStep r = s;
  r.dom = conjugate_curve(s.dom);
  r.cod = conjugate_curve(s.cod);
  r.kernel = frobenius(s.kernel);
  r.xnum = frobenius(s.xnum);
  r.ynum = frobenius(s.ynum);
  if (s.u.F) r.u = frobenius(s.u);
  return r;
}

IsogenyStep compose_scaling(const IsogenyStep& s, const Fp2& u) {
  IsogenyStep r = s;
  Fp2 u2 = u * u, u3 = u2 * u;
  switch (s.kind) {
    case StepKind::Velu:
      r.xnum = u2 * s.xnum;
      r.ynum = u3 * s.ynum;
      break;
    case StepKind::Isomorphism:
      r.u = s.u * u;
      break;
    default:
      throw std::invalid_argument("compose_scaling: unsupported step kind");
  }
  r.cod = scale_curve(s.cod, u);
  return r;
}

IsogenyChain conjugate_chain(const IsogenyChain& c) {
  IsogenyChain r;
  r.base = conjugate_curve(c.base.field() ? c.base : c.domain());
  for (const auto& s : c.steps) r.steps.push_back(conjugate_step(s));
  return r;
}

Poly<Fp2> push_kernel(const IsogenyStep& s, const Poly<Fp2>& g) {
  const Field* F = s.dom.field();
  int ell = static_cast<int>(s.degree.get_si());
  auto image = [&](auto root) {
    using T = std::decay_t<decltype(root)>;
    T hi = inv(eval_at(s.kernel, root));
    T theta = eval_at(s.xnum, root) * hi;
    for (int i = 1; i < s.ex; ++i) theta = theta * hi;
    if (ell < 5) return std::vector<T>{-theta};
    T theta2 = double_x(s.cod, theta);
    return std::vector<T>{theta * theta2, -(theta + theta2)};
  };
  std::vector<Fp2> d;
  if (g.deg() == 1) {
    d = image(-(g.c[0] * inv(g.c[1])));
  } else {
    Level K(F, monic(g).c);
    for (const auto& v : image(K.gen())) {
      if (!K.in_base(v)) throw std::logic_error("image kernel is not rational");
      d.push_back(K.descend(v));
    }
  }
  d.push_back(F->one());
  return P2(F, d);
}

IsogenyStep dual_step(const IsogenyStep& s, Rng& rng) {
  switch (s.kind) {
    case StepKind::Isomorphism:
      return isomorphism_step(s.cod, inv(s.u));
    case StepKind::Scalar:
      return s;
    case StepKind::Frobenius:
      throw std::invalid_argument("dual_step: Frobenius duals are not supported");
    case StepKind::Velu:
      break;
  }
  const Curve& E = s.dom;
  int ell = static_cast<int>(s.degree.get_si());

  // a point of E[ell] outside the kernel, pushed through s
  P2 rest = monic(division_polynomial(E, ell) / s.kernel);
  std::vector<P2> factors = factor_squarefree(rest, rng);
  const P2* g = &factors[0];
  for (const auto& f : factors)
    if (f.deg() < g->deg()) g = &f;

  return dual_from_kernel(s, push_kernel(s, *g), rng);
}

IsogenyStep dual_from_kernel(const IsogenyStep& s, const Poly<Fp2>& hd, Rng& rng) {
  const Curve& E = s.dom;
  const Field* F = E.field();
  int ell = static_cast<int>(s.degree.get_si());
  IsogenyStep back = velu_isogeny(s.cod, hd, ell, false);
  std::vector<Fp2> us = isomorphisms(back.cod, E, rng);
  Fp2 pref = inv(small(F, ell));
  std::stable_partition(us.begin(), us.end(), [&](const Fp2& u) { return u == pref; });
  // F_{p^4} points: at tiny p the F_{p^2} group can be too small to
  // separate [ell] from [ell] composed with an automorphism
  const Level& L2 = F->level(2);
  std::vector<Point<Fq>> pts;
  for (int i = 0; i < 3; ++i) pts.push_back(random_point<Fq>(E, &L2, rng));
  for (const Fp2& u : us) {
    IsogenyStep cand = compose_scaling(back, u);
    bool ok = true;
    for (const auto& P : pts) {
      if (evaluate_step(cand, evaluate_step(s, P)) != mul(E, P, Int(ell))) {
        ok = false;
        break;
      }
    }
    if (ok) return cand;
  }
  fail("DualNotFound", "no automorphism makes the composition equal [ell]");
}

}  // namespace endring
