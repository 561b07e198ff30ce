#include "endring/ssgraph.hpp"

#include <algorithm>

namespace endring {

namespace {

using P2 = Poly<Fp2>;

bool poly_less(const P2& f, const P2& g) {
  if (f.deg() != g.deg()) return f.deg() < g.deg();
  for (int i = f.deg(); i >= 0; --i)
    if (f.c[i] != g.c[i]) return f.c[i] < g.c[i];
  return false;
}

Fp2 dbl_x(const Curve& E, const Fp2& x) {
  const Field* F = E.field();
  Fp2 x2 = x * x;
  Fp2 num = x2 * x2 - F->from_int(2) * E.a * x2 - F->from_int(8) * E.b * x + E.a * E.a;
  Fp2 den = F->from_int(4) * ((x2 + E.a) * x + E.b);
  return num * inv(den);
}

std::vector<Fp2> sorted_roots(const P2& f, Rng& rng) {
  auto r = roots(f, rng);
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace

Fp2 modpoly_eval(int ell, const Fp2& x, const Fp2& y) {
  const Field* F = x.F;
  Fp2 acc = F->zero();
  int n = ell + 1;
  std::vector<Fp2> xp{F->one()}, yp{F->one()};
  for (int i = 1; i <= n; ++i) {
    xp.push_back(xp.back() * x);
    yp.push_back(yp.back() * y);
  }
  for (const auto& [i, j, c] : modular_polynomial(ell).terms) {
    Fp2 cf = F->from_int(c);
    acc += cf * xp[i] * yp[j];
    if (i != j) acc += cf * xp[j] * yp[i];
  }
  return acc;
}

Poly<Fp2> modpoly_at(int ell, const Fp2& j) {
  const Field* F = j.F;
  int n = ell + 1;
  std::vector<Fp2> jp{F->one()};
  for (int i = 1; i <= n; ++i) jp.push_back(jp.back() * j);
  std::vector<Fp2> c(n + 1, F->zero());
  for (const auto& [i, k, coef] : modular_polynomial(ell).terms) {
    Fp2 cf = F->from_int(coef);
    c[k] += cf * jp[i];
    if (i != k) c[i] += cf * jp[k];
  }
  return P2(F, c);
}

std::vector<Fp2> neighbors(const Fp2& j, int ell, Rng& rng) {
  auto r = roots_with_multiplicity(modpoly_at(ell, j), rng);
  std::sort(r.begin(), r.end());
  return r;
}

int walk_length(const Int& p, int ell) {
  if (p <= 3) fail("TooSmall", "p must exceed 3");
  Int pm = p - 1;
  Int rhs_base = pm * pm * pm;
  for (int t = 1;; ++t) {
    Int lhs = 64 * ipow(Int(ell), t) * (ell + 1) * (ell + 1);
    Int s = Int(ell + 1) * t + ell - 1;
    if (lhs >= rhs_base * s * s) return t;
  }
}

WalkParams WalkParams::make(const Int& p, int ell, int d) {
  if (ell != 2 && ell != 3 && ell != 5) fail("Unsupported", "ell must be 2, 3 or 5");
  if (d != 1 && d != 2) fail("Unsupported", "d must be 1 or 2");
  if (d % ell == 0) fail("BadParameters", "d and ell must be coprime");
  if (4 * d >= p) fail("BadParameters", "d must be below p/4");
  WalkParams w;
  w.p = p;
  w.ell = ell;
  w.d = d;
  w.t = walk_length(p, ell);
  return w;
}

std::vector<Poly<Fp2>> kernels(const Curve& E, int ell, Rng& rng) {
  std::vector<P2> out;
  if (ell == 2 || ell == 3) {
    for (const Fp2& r : sorted_roots(division_polynomial(E, ell), rng)) out.push_back(P2::linear_root(r));
  } else if (ell == 5) {
    P2 psi = monic(division_polynomial(E, 5));
    std::vector<Fp2> lin;
    for (const P2& g : factor_squarefree(psi, rng)) {
      if (g.deg() == 1)
        lin.push_back(-g.c[0]);
      else if (g.deg() == 2)
        out.push_back(g);
    }
    std::sort(lin.begin(), lin.end());
    std::vector<bool> used(lin.size(), false);
    for (size_t i = 0; i < lin.size(); ++i) {
      if (used[i]) continue;
      Fp2 r2 = dbl_x(E, lin[i]);
      auto it = std::lower_bound(lin.begin(), lin.end(), r2);
      if (it == lin.end() || *it != r2) throw std::logic_error("5-torsion x-coordinates do not pair up");
      used[i] = true;
      used[it - lin.begin()] = true;
      out.push_back(P2::linear_root(lin[i]) * P2::linear_root(r2));
    }
  } else {
    fail("Unsupported", "ell must be 2, 3 or 5");
  }
  std::sort(out.begin(), out.end(), poly_less);
  if (static_cast<int>(out.size()) != ell + 1) fail("NotSupersingular", "curve does not have ell + 1 rational kernels");
  return out;
}

void WalkRecord::truncate(int k) {
  j_sequence.resize(k + 1);
  curves.resize(k + 1);
  choices.resize(k);
  steps.resize(k);
  dual_kernels.resize(k);
}

WalkRecord nbt_walk(const WalkParams& params, const Curve& start, Rng& rng) {
  int ell = params.ell;
  WalkRecord rec;
  rec.ell = ell;
  rec.curves.push_back(start);
  rec.j_sequence.push_back(j_invariant(start));
  Curve cur = start;
  for (int i = 0; i < params.t; ++i) {
    std::vector<P2> ks = kernels(cur, ell, rng);
    P2 other;
    if (i > 0) {
      auto it = std::find(ks.begin(), ks.end(), rec.dual_kernels.back());
      if (it == ks.end()) throw std::logic_error("dual kernel missing from kernel list");
      other = *it;
      ks.erase(it);
    }
    int idx = static_cast<int>(rng.below(ks.size()));
    if (i == 0) other = ks[idx == 0 ? 1 : 0];
    IsogenyStep s = velu_isogeny(cur, ks[idx], ell, false);

    // a point of another kernel, pushed through s, spans the dual kernel
    P2 g = other;
    if (ell == 5) {
      auto r = roots(other, rng);
      if (!r.empty()) g = P2::linear_root(*std::min_element(r.begin(), r.end()));
    }
    rec.dual_kernels.push_back(push_kernel(s, g));
    rec.choices.push_back(idx);
    cur = s.cod;
    rec.steps.push_back(std::move(s));
    rec.curves.push_back(cur);
    rec.j_sequence.push_back(j_invariant(cur));
  }
  return rec;
}

bool has_d_structure(const Fp2& j, int d) {
  if (d == 1) return frobenius(j) == j;
  if (d == 2) return modpoly_eval(2, j, frobenius(j)).is_zero();
  fail("Unsupported", "d must be 1 or 2");
}

bool check_d_structure(const IsogenyStep& psi, int d, Rng& rng, int trials) {
  const Curve& E = psi.dom;
  const Field* F = E.field();
  if (psi.cod != conjugate_curve(E)) return false;
  const Level& L = F->level(2);
  Int dp = Int(d) * Int(static_cast<unsigned long>(F->p()));
  for (int i = 0; i < trials; ++i) {
    auto P = random_point<Fq>(E, &L, rng);
    auto mu = [&](const Point<Fq>& Q) { return frobenius(evaluate_step(psi, Q)); };
    if (!add(E, mu(mu(P)), mul(E, P, dp)).inf) return false;
  }
  return true;
}

IsogenyStep build_d_structure(const Curve& E, int d, Rng& rng) {
  Curve target = conjugate_curve(E);
  std::vector<IsogenyStep> candidates;
  if (d == 1) {
    for (const Fp2& u : isomorphisms(E, target, rng)) candidates.push_back(isomorphism_step(E, u));
  } else if (d == 2) {
    for (const P2& h : kernels(E, 2, rng)) {
      IsogenyStep s = velu_isogeny(E, h, 2, false);
      for (const Fp2& u : isomorphisms(s.cod, target, rng)) candidates.push_back(compose_scaling(s, u));
    }
  } else {
    fail("Unsupported", "d must be 1 or 2");
  }
  for (const auto& c : candidates)
    if (check_d_structure(c, d, rng)) return c;
  fail("StructureNotFound", "no degree-" + std::to_string(d) + " map E -> E^(p) squares to [-dp]");
}

}  // namespace endring
