#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "endring/pipeline.hpp"
#include "oracles.hpp"

using namespace endring;

namespace {

struct Setup {
  FieldPtr F;
  Curve E;
};

Setup supersingular(u64 p, u64 seed) {
  Setup s{Field::make(p), {}};
  Rng rng(seed);
  s.E = random_supersingular_curve(s.F.get(), rng);
  return s;
}

IsogenyChain scalar(const Curve& E, long n) {
  IsogenyChain c;
  c.base = E;
  c.append(scalar_step(E, Int(n)));
  return c;
}

}  // namespace

TEST_CASE("trace of scalars") {
  auto s = supersingular(1009, 1);
  Rng rng(1);
  CHECK(trd(scalar(s.E, 3), rng) == 6);
  CHECK(trd(scalar(s.E, -7), rng) == -14);
  IsogenyChain id;
  id.base = s.E;
  CHECK(trd(id, rng) == 2);
}

TEST_CASE("trace matches the brute-force oracle") {
  Rng rng(2);
  for (u64 p : {7, 11, 13}) {
    auto s = supersingular(p, p);
    for (int i = 0; i < 10; ++i) {
      IsogenyChain c = oracle::random_endomorphism(s.E, 10000, rng);
      CHECK(trd(c, rng) == oracle::brute_trace(c, rng));
    }
  }
}

TEST_CASE("residues are consistent") {
  auto s = supersingular(103, 3);
  Rng rng(3);
  for (int i = 0; i < 5; ++i) {
    IsogenyChain c = oracle::random_endomorphism(s.E, Int(1) << 40, rng);
    std::vector<TraceResidue> res;
    Int t = trd(c, rng, {}, &res);
    CHECK(t * t <= 4 * c.degree());
    REQUIRE(!res.empty());
    for (const auto& r : res) CHECK(((t - r.residue) % r.modulus) == 0);
  }
}

TEST_CASE("reflections have trace zero") {
  auto s = supersingular(1009, 4);
  Rng rng(4);
  for (int ell : {2, 3, 5}) {
    InseparableReflection r = compute_reflection(s.E, ell, 1, rng);
    CHECK(trd(r.chain, rng) == 0);
  }
  InseparableReflection r2 = compute_reflection(s.E, 3, 2, rng);
  CHECK(trd(r2.chain, rng) == 0);
}

TEST_CASE("traces are bounded by twice the square root of the degree") {
  auto s = supersingular(1009, 5);
  Rng rng(5);
  InseparableReflection a = compute_reflection(s.E, 2, 1, rng);
  InseparableReflection b = compute_reflection(s.E, 3, 1, rng);
  IsogenyChain ab = a.chain;
  ab.append(b.chain);
  Int t = trd(ab, rng);
  CHECK(abs(t) <= 2 * isqrt(ab.degree()));
  // Trd(a b) = Trd(b a)
  IsogenyChain ba = b.chain;
  ba.append(a.chain);
  CHECK(trd(ba, rng) == t);
}

TEST_CASE("rho chain") {
  auto s = supersingular(1009, 6);
  Rng rng(6);
  const Level& L = s.F->level(2);
  InseparableReflection r1 = compute_reflection(s.E, 3, 2, rng);
  InseparableReflection r2 = compute_reflection(s.E, 5, 2, rng);
  IsogenyChain rho = rho_chain(r1, r2, rng);
  CHECK(rho.is_endomorphism());
  CHECK(rho.degree() == ipow(2 * r1.phi_degree() * r2.phi_degree(), 2));
  for (int i = 0; i < 10; ++i) {
    auto P = random_point<Fq>(s.E, &L, rng);
    auto lhs = evaluate_chain(r1.chain, evaluate_chain(r2.chain, P));
    CHECK(add(s.E, lhs, mul(s.E, evaluate_chain(rho, P), 1009)).inf);
  }
  // mixed d is allowed
  InseparableReflection r3 = compute_reflection(s.E, 2, 1, rng);
  IsogenyChain rho13 = rho_chain(r1, r3, rng);
  CHECK(rho13.degree() == 2 * r1.phi_degree() * r1.phi_degree() * r3.phi_degree() * r3.phi_degree());
}

TEST_CASE("rho chain rejects reflections on different curves") {
  auto s = supersingular(1009, 7);
  auto t = supersingular(1009, 8);
  REQUIRE(s.E != t.E);
  Rng rng(7);
  InseparableReflection a = compute_reflection(s.E, 3, 1, rng);
  InseparableReflection b = compute_reflection(t.E, 2, 1, rng);
  std::string kind;
  try {
    rho_chain(a, b, rng);
  } catch (const DomainError& e) {
    kind = e.kind();
  }
  CHECK(kind == "BaseMismatch");
}

TEST_CASE("Gram matrix of three reflections") {
  auto s = supersingular(1009, 9);
  Rng rng(9);
  InseparableReflection g1 = compute_reflection(s.E, 2, 1, rng);
  InseparableReflection g2 = compute_reflection(s.E, 3, 1, rng);
  InseparableReflection g3 = compute_reflection(s.E, 2, 1, rng);
  GramMatrix G = gram_of_reflections(g1, g2, g3, rng);
  CHECK(G.symmetric());
  CHECK(G.g[0] == std::array<Int, 4>{2, 0, 0, 0});
  const InseparableReflection* gs[] = {&g1, &g2, &g3};
  for (int i = 1; i < 4; ++i) CHECK(G.g[i][i] == 2 * 1009 * ipow(gs[i - 1]->phi_degree(), 2));
  CHECK(is_square(abs(G.det())));
}

TEST_CASE("Bass Gram determinant") {
  auto s = supersingular(103, 10);
  Rng rng(10);
  BassResult b = algorithm2_bass(s.E, rng);
  Rng other(11);
  Int T = trd(b.rho, other);
  CHECK(T == b.trace_rho);
  Int disc = T * T - 4 * b.rho.degree();
  CHECK(b.disc_rho == disc);
  CHECK(b.gram.det() == ipow(Int(103), 4) * disc * disc);
  CHECK(bass_gram(103, 2, b.a1.phi_degree(), b.a2.phi_degree(), T) == b.gram);
}
