#pragma once

#include "endring/ssgraph.hpp"

namespace endring {

// alpha = pi o conj(dual phi) o psi o phi, an endomorphism of `base` of
// degree ell^(2k) d p.
struct InseparableReflection {
  Curve base;
  IsogenyChain chain;
  int ell = 0, k = 0, d = 0, epsilon = -1;
  WalkRecord walk;                 // truncated to k steps
  IsogenyStep psi;                 // E_k -> E_k^(p)
  std::vector<IsogenyStep> duals;  // dual of walk step i, unconjugated
  int walks_tried = 0;

  Int degree() const { return chain.degree(); }
  Int phi_degree() const { return ipow(Int(ell), k); }
};

// Repeats fresh walks of length walk_length(p, ell) until the endpoint has
// a (d, -1)-structure, then truncates to the first such vertex. With greedy,
// a walk is accepted at its first structured vertex instead.
InseparableReflection compute_reflection(const Curve& E, int ell, int d, Rng& rng, bool greedy = false);

// Structural checks plus alpha^2 + [deg] = 0 and additivity on `trials`
// random points of E(F_{p^2}) and E(F_{p^4}).
bool verify_reflection(const InseparableReflection& r, int trials, Rng& rng);

}  // namespace endring
