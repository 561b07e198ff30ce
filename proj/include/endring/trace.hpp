#pragma once

#include "endring/gram.hpp"
#include "endring/reflect.hpp"

namespace endring {

struct TraceOptions {
  int tower_ceiling = 12;  // deepest level F_{p^(2k)} visited before raising
  bool auto_raise = true;  // allow up to twice the ceiling before giving up
  int points_per_level = 2;
  std::uint32_t smooth_bound = 1u << 20;
};

// An endomorphism together with the CRT modulus it needs: |Trd| <= 2 sqrt(deg),
// so any modulus >= 2 isqrt(4 deg) + 1 pins the symmetric residue.
struct TraceJob {
  IsogenyChain chain;
  Int degree;
  Int bound;

  static TraceJob make(IsogenyChain chain);
};

// One torsion residue t = Trd mod modulus gathered at level k.
struct TraceResidue {
  int level = 0;
  Int residue, modulus;
};

// Exact reduced trace. The base curve must satisfy pi_{p^2} = [p] or [-p];
// throws NotSupersingular otherwise and TowerTooDeep when the levels run out.
Int trd(const IsogenyChain& chain, Rng& rng, const TraceOptions& opts = {},
        std::vector<TraceResidue>* residues = nullptr);

// The separable chain rho with -r1 o r2 = [p] o rho; throws BaseMismatch.
// Only r1 needs its structure; r1 and r2 may use different d.
IsogenyChain rho_chain(const InseparableReflection& r1, const InseparableReflection& r2, Rng& rng);

// Gram matrix of {1, g1, g2, g3} for three d = 1 reflections.
GramMatrix gram_of_reflections(const InseparableReflection& g1, const InseparableReflection& g2,
                               const InseparableReflection& g3, Rng& rng, const TraceOptions& opts = {});

// Gram matrix of {1, a1, a2, a1 a2} given p, d, d_i = ell_i^(k_i) and T = Trd rho.
GramMatrix bass_gram(const Int& p, int d, const Int& d1, const Int& d2, const Int& T);

}  // namespace endring
