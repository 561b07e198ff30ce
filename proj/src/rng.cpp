#include "endring/rng.hpp"

namespace endring {

namespace {
std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t split_seed(std::uint64_t master, std::uint64_t key) {
  return splitmix(splitmix(master) ^ splitmix(key + 0x632be59bd9b4e019ULL));
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t key1, std::uint64_t key2) {
  return split_seed(split_seed(master, key1), key2);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  std::uint64_t limit = ~0ULL - (~0ULL % n);
  for (;;) {
    std::uint64_t x = next();
    if (x < limit) return x % n;
  }
}

Int Rng::below(const Int& n) {
  if (n <= 1) return 0;
  size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  size_t words = (bits + 63) / 64;
  for (;;) {
    Int x = 0;
    for (size_t i = 0; i < words; ++i) {
      Int w;
      std::uint64_t v = next();
      mpz_import(w.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
      x = (x << 64) + w;
    }
    // mask to the bit length of n
    Int mask = (Int(1) << bits) - 1;
    mpz_and(x.get_mpz_t(), x.get_mpz_t(), mask.get_mpz_t());
    if (x < n) return x;
  }
}

Int Rng::range(const Int& lo, const Int& hi) { return lo + below(Int(hi - lo + 1)); }

}  // namespace endring
