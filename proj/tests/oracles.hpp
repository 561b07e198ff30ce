#pragma once

// Slow reference computations used by the unit tests and the acceptance
// binary. Nothing here shares code paths with the algorithms under test
// beyond field and point arithmetic.

#include <stdexcept>
#include <vector>

#include "endring/ssgraph.hpp"

namespace endring::oracle {

// Every affine point of E over the level-2 extension F_{p^4}.
inline std::vector<Point<Fq>> all_points_p4(const Curve& E) {
  const Field* F = E.field();
  const Level& L = F->level(2);
  u64 p = F->p();
  Fq a = L.lift(E.a), b = L.lift(E.b);
  std::vector<Point<Fq>> out;
  for (u64 i = 0; i < p * p * p * p; ++i) {
    u64 d = i;
    u64 c[4];
    for (auto& w : c) {
      w = d % p;
      d /= p;
    }
    Fq x = L.from_coeffs({F->make(c[0], c[1]), F->make(c[2], c[3])});
    Fq rhs = (x * x + a) * x + b;
    Fq y;
    if (!sqrt(rhs, &y)) continue;
    out.push_back(Point<Fq>::affine(x, y));
    if (!y.is_zero()) out.push_back(Point<Fq>::affine(x, -y));
  }
  return out;
}

// Trace by exhaustion: keep every t with |t| <= 2 sqrt(deg) such that
// chain^2 - [t] chain + [deg] kills all of E(F_{p^4}). Survivors that
// differ by a multiple of the exponent p^2 - 1 are then separated on random
// points of E(F_{p^6}).
inline Int brute_trace(const IsogenyChain& chain, Rng& rng, int extra_points = 24) {
  const Curve E = chain.domain();
  Int D = chain.degree();
  Int w = isqrt(4 * D);
  std::vector<Int> cand;
  for (Int t = -w; t <= w; ++t) cand.push_back(t);

  auto filter = [&](const auto& P) {
    auto Q = evaluate_chain(chain, P);
    auto R = add(E, evaluate_chain(chain, Q), mul(E, P, D));
    std::vector<Int> keep;
    for (const Int& t : cand)
      if (mul(E, Q, t) == R) keep.push_back(t);
    cand.swap(keep);
  };
  for (const auto& P : all_points_p4(E)) {
    filter(P);
    if (cand.size() <= 1) break;
  }
  const Level& L3 = E.field()->level(3);
  for (int i = 0; i < extra_points && cand.size() > 1; ++i) filter(random_point<Fq>(E, &L3, rng));
  if (cand.size() != 1) throw std::runtime_error("brute_trace: " + std::to_string(cand.size()) + " survivors");
  return cand[0];
}

// Random endomorphism of a normalized E built from Velu steps with
// ell in {2, 3, 5}, Frobenius steps and scalars, closed by an isomorphism
// back to E. Degree stays at or below max_degree.
inline IsogenyChain random_endomorphism(const Curve& E, const Int& max_degree, Rng& rng) {
  const Int p(static_cast<unsigned long>(E.field()->p()));
  for (;;) {
    IsogenyChain c;
    c.base = E;
    Curve cur = E;
    Int deg = 1;
    for (int n = 0; n < 40; ++n) {
      if (n > 0 && rng.below(5) == 0) break;
      int choice = static_cast<int>(rng.below(6));
      if (choice <= 3) {
        int ell = choice <= 1 ? 2 : (choice == 2 ? 3 : 5);
        if (deg * ell > max_degree) continue;
        auto ks = kernels(cur, ell, rng);
        c.append(velu_isogeny(cur, ks[rng.below(ks.size())], ell));
        deg *= ell;
      } else if (choice == 4) {
        if (deg * p > max_degree) continue;
        c.append(frobenius_step(cur));
        deg *= p;
      } else {
        long m = rng.coin() ? -1 : 2;
        if (deg * m * m > max_degree) continue;
        c.append(scalar_step(cur, m));
        deg *= m * m;
      }
      cur = c.codomain();
    }
    auto us = isomorphisms(cur, E, rng);
    if (us.empty()) continue;
    c.append(isomorphism_step(cur, us[rng.below(us.size())]));
    return c;
  }
}

}  // namespace endring::oracle
