#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace endring {

using Int = mpz_class;
using Rat = mpq_class;
using u64 = std::uint64_t;

class Rng;

Int isqrt(const Int& n);
bool is_square(const Int& n, Int* root = nullptr);
bool rat_sqrt(const Rat& x, Rat* root);
bool is_prime(const Int& n);
Int next_prime(const Int& n);  // smallest prime > n
Int ipow(const Int& b, unsigned long e);
Int crt_lcm(const Int& r1, const Int& m1, const Int& r2, const Int& m2, Int* m_out, bool* ok);
Int symmetric_mod(const Int& r, const Int& m);
int valuation(Int n, const Int& q);

u64 mulmod64(u64 a, u64 b, u64 m);
u64 powmod64(u64 b, u64 e, u64 m);
u64 invmod64(u64 a, u64 m);

// Sorted (prime, exponent) list. Trial division to 10^6, then Pollard rho,
// then ECM stage 1 for stubborn cofactors.
using Factorization = std::vector<std::pair<Int, int>>;
Factorization factor(const Int& n);
Int factor_product(const Factorization& f);

// Primes below the bound, computed once.
const std::vector<std::uint32_t>& small_primes(std::uint32_t bound);

// Square root modulo an odd prime; returns false for non-residues.
bool sqrt_mod(const Int& a, const Int& q, Int* root);

std::string to_string(const Int& x);
std::string to_string(const Rat& x);  // "num/den"
Rat parse_rat(const std::string& s);
// n/d in lowest terms.
Rat frac(const Int& n, const Int& d);

}  // namespace endring
