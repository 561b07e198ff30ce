#pragma once

#include <tuple>
#include <vector>

#include "endring/curves.hpp"

namespace endring {

// Classical modular polynomial, stored as the terms X^i Y^j with i <= j;
// the polynomial is symmetric.
struct ModularPolynomial {
  int ell;
  std::vector<std::tuple<int, int, Int>> terms;
};

// ell in {2, 3, 5}.
const ModularPolynomial& modular_polynomial(int ell);
Fp2 modpoly_eval(int ell, const Fp2& x, const Fp2& y);
// Phi_ell(j, Y) as a polynomial in Y.
Poly<Fp2> modpoly_at(int ell, const Fp2& j);

// Roots of Phi_ell(j, Y) in F_{p^2}, with multiplicity, sorted.
std::vector<Fp2> neighbors(const Fp2& j, int ell, Rng& rng);

// Least t with 64 ell^t (ell+1)^2 >= (p-1)^3 ((ell+1) t + ell - 1)^2.
int walk_length(const Int& p, int ell);

struct WalkParams {
  Int p;
  int ell = 2;
  int d = 1;
  int t = 0;
  // Validates gcd(d, ell) = 1 and d < p/4, and fills t from walk_length.
  static WalkParams make(const Int& p, int ell, int d);
};

// The ell + 1 kernel polynomials of ell-isogenies out of a normalized
// supersingular curve, sorted by coefficients.
std::vector<Poly<Fp2>> kernels(const Curve& E, int ell, Rng& rng);

struct WalkRecord {
  int ell = 0;
  std::vector<Fp2> j_sequence;
  std::vector<int> choices;  // index into the sorted eligible kernels
  std::vector<Curve> curves;
  std::vector<IsogenyStep> steps;
  std::vector<Poly<Fp2>> dual_kernels;  // kernel of the dual of step i on curves[i+1]

  // Keeps the first k steps.
  void truncate(int k);
};

// Non-backtracking walk of params.t steps.
WalkRecord nbt_walk(const WalkParams& params, const Curve& start, Rng& rng);

bool has_d_structure(const Fp2& j, int d);
// psi: E -> E^(p) of degree d with (pi psi)^2 = [-dp]; throws StructureNotFound.
IsogenyStep build_d_structure(const Curve& E, int d, Rng& rng);

// Monte-Carlo check of mu^2 = [-d p] where mu = pi o psi.
bool check_d_structure(const IsogenyStep& psi, int d, Rng& rng, int trials = 3);

}  // namespace endring
