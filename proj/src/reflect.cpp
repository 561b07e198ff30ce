#include "endring/reflect.hpp"

namespace endring {

InseparableReflection compute_reflection(const Curve& E, int ell, int d, Rng& rng, bool greedy) {
  const Field* F = E.field();
  WalkParams params = WalkParams::make(Int(static_cast<unsigned long>(F->p())), ell, d);
  InseparableReflection r;
  r.base = E;
  r.ell = ell;
  r.d = d;
  for (;;) {
    ++r.walks_tried;
    WalkRecord w = nbt_walk(params, E, rng);
    if (!greedy && !has_d_structure(w.j_sequence.back(), d)) continue;
    int k = 0;
    for (int i = 1; i <= params.t; ++i) {
      if (has_d_structure(w.j_sequence[i], d)) {
        k = i;
        break;
      }
    }
    if (k == 0) continue;
    w.truncate(k);
    r.walk = std::move(w);
    r.k = k;
    break;
  }

  const Curve& Ek = r.walk.curves[r.k];
  r.psi = build_d_structure(Ek, d, rng);
  for (int i = 0; i < r.k; ++i) r.duals.push_back(dual_from_kernel(r.walk.steps[i], r.walk.dual_kernels[i], rng));

  r.chain.base = E;
  for (const auto& s : r.walk.steps) r.chain.append(s);
  r.chain.append(r.psi);
  for (int i = r.k - 1; i >= 0; --i) r.chain.append(conjugate_step(r.duals[i]));
  r.chain.append(frobenius_step(conjugate_curve(E)));
  return r;
}

bool verify_reflection(const InseparableReflection& r, int trials, Rng& rng) {
  const IsogenyChain& c = r.chain;
  if (!c.well_formed() || c.domain() != r.base || c.codomain() != r.base) return false;
  const Field* F = r.base.field();
  Int p(static_cast<unsigned long>(F->p()));
  Int deg = c.degree();
  if (deg != ipow(Int(r.ell), 2 * r.k) * r.d * p) return false;
  const Curve& E = r.base;
  const Level& L = F->level(2);
  for (int i = 0; i < trials; ++i) {
    auto P = random_point<Fp2>(E, F, rng);
    if (!add(E, evaluate_chain(c, evaluate_chain(c, P)), mul(E, P, deg)).inf) return false;
    auto P4 = random_point<Fq>(E, &L, rng), Q4 = random_point<Fq>(E, &L, rng);
    auto aP = evaluate_chain(c, P4), aQ = evaluate_chain(c, Q4);
    if (!add(E, evaluate_chain(c, aP), mul(E, P4, deg)).inf) return false;
    if (evaluate_chain(c, add(E, P4, Q4)) != add(E, aP, aQ)) return false;
  }
  return true;
}

}  // namespace endring
