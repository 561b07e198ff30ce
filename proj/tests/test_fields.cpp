#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "endring/fields.hpp"
#include "endring/errors.hpp"
#include "endring/rng.hpp"

using namespace endring;

namespace {

std::string error_kind(const Int& p) {
  try {
    Field::make(p);
  } catch (const DomainError& e) {
    return e.kind();
  }
  return "";
}

}  // namespace

TEST_CASE("quadratic modulus") {
  auto F7 = Field::make(7);
  CHECK(F7->c0() == 1);  // x^2 + 1
  CHECK(F7->order() == 49);

  for (int p : {5, 11, 101, 1009, 10007}) {
    auto F = Field::make(p);
    for (u64 x = 0; x < F->p(); ++x) REQUIRE((x * x + F->c0()) % F->p() != 0);
  }
}

TEST_CASE("make rejects bad characteristics") {
  CHECK(error_kind(4) == "NotPrime");
  CHECK(error_kind(3) == "TooSmall");
  CHECK(error_kind(2) == "TooSmall");
  CHECK(error_kind(Int(1) << 40) != "");
}

TEST_CASE("F_{p^2} arithmetic") {
  auto F = Field::make(1009);
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    Fp2 x = F->random(rng), y = F->random(rng), z = F->random(rng);
    CHECK((x + y) * z == x * z + y * z);
    CHECK(frobenius(x * y) == frobenius(x) * frobenius(y));
    CHECK(frobenius(x + y) == frobenius(x) + frobenius(y));
    CHECK(frobenius(frobenius(x)) == x);
    CHECK(pow(x, Int(1009)) == frobenius(x));
    if (!x.is_zero()) CHECK(x * inv(x) == F->one());
    Fp2 r;
    if (sqrt(x, &r)) CHECK(r * r == x);
  }
}

TEST_CASE("level 2 at p = 7 is F_{7^4}") {
  auto F = Field::make(7);
  const Level& L = F->level(2);
  CHECK(L.order() == 2401);
  Fq g = L.gen();
  CHECK(pow(g, Int(2400)) == L.one());
  CHECK(pow(g, Int(48)) != L.one());
}

TEST_CASE("level 3 at p = 13 has an irreducible modulus") {
  auto F = Field::make(13);
  const Level& L = F->level(3);
  std::vector<Fp2> m = L.modulus();
  REQUIRE(m.size() == 4);
  Poly<Fp2> f(F.get(), m);
  CHECK(is_irreducible(f));
  for (u64 a = 0; a < 13; ++a)
    for (u64 b = 0; b < 13; ++b) CHECK(!eval_at(f, F->make(a, b)).is_zero());
}

TEST_CASE("level Frobenius") {
  auto F = Field::make(103);
  Rng rng(2);
  for (int k : {2, 3, 4}) {
    const Level& L = F->level(k);
    for (int i = 0; i < 1000; ++i) {
      Fq x = L.random(rng), y = L.random(rng);
      REQUIRE(frobenius(x * y) == frobenius(x) * frobenius(y));
      REQUIRE(frobenius(x + y) == frobenius(x) + frobenius(y));
    }
    Fq x = L.random(rng), y = x;
    for (int i = 0; i < 2 * k; ++i) y = frobenius(y);
    CHECK(y == x);
    CHECK(frobenius(x) == pow(x, Int(103)));
    CHECK(L.in_base(L.lift(F->make(5, 7))));
    CHECK(L.descend(L.lift(F->make(5, 7))) == F->make(5, 7));
  }
}

TEST_CASE("roots of Y^2 + 1 over F_7") {
  auto F = Field::make(7);
  Rng rng(3);
  Poly<Fp2> f(F.get(), {F->one(), F->zero(), F->one()});
  std::vector<Fp2> rs = roots(f, rng);
  REQUIRE(rs.size() == 2);
  for (const Fp2& r : rs) {
    CHECK(!r.in_prime_field());
    CHECK(r * r + F->one() == F->zero());
  }
  CHECK(rs[0] == frobenius(rs[1]));
}

TEST_CASE("factorization into irreducibles") {
  auto F = Field::make(101);
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    std::vector<Fp2> c;
    for (int i = 0; i < 9; ++i) c.push_back(F->random(rng));
    c.push_back(F->one());
    Poly<Fp2> f(F.get(), c);
    Poly<Fp2> sf = squarefree_part(f);
    std::vector<Poly<Fp2>> parts = factor_squarefree(sf, rng);
    Poly<Fp2> prod = Poly<Fp2>::constant(F->one());
    for (const auto& g : parts) {
      CHECK(is_irreducible(g));
      prod = prod * g;
    }
    CHECK(prod == monic(sf));
    int linear = 0;
    for (const auto& g : parts) linear += g.deg() == 1;
    CHECK(static_cast<int>(roots(sf, rng).size()) == linear);
  }
}

TEST_CASE("roots in a level") {
  auto F = Field::make(13);
  Rng rng(5);
  const Level& L = F->level(3);
  Poly<Fp2> f(F.get(), L.modulus());
  std::vector<Fq> rs = roots_in_level(f, L, rng);
  CHECK(rs.size() == 3);
  for (const Fq& r : rs) CHECK(eval_at(f, r).is_zero());
}
