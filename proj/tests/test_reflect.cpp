#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "endring/pipeline.hpp"

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

}  // namespace

TEST_CASE("reflection shape and degree") {
  auto s = supersingular(1009, 1);
  Rng rng(1);
  for (auto [ell, d] : {std::pair{2, 1}, {3, 1}, {3, 2}, {5, 2}}) {
    InseparableReflection r = compute_reflection(s.E, ell, d, rng);
    CHECK(r.base == s.E);
    CHECK(r.chain.is_endomorphism());
    CHECK(r.chain.well_formed());
    CHECK(r.ell == ell);
    CHECK(r.d == d);
    CHECK(r.epsilon == -1);
    CHECK(r.k >= 0);
    CHECK(r.degree() == ipow(Int(ell), 2 * r.k) * d * 1009);
    CHECK(r.walk.steps.size() == static_cast<size_t>(r.k));
    // the accepted endpoint is the first structured vertex
    for (int i = 1; i < r.k; ++i) CHECK(!has_d_structure(r.walk.j_sequence[i], d));
    CHECK(has_d_structure(r.walk.j_sequence[r.k], d));
    CHECK(r.chain.steps.back().kind == StepKind::Frobenius);
    Rng check(2);
    CHECK(verify_reflection(r, 10, check));
  }
}

TEST_CASE("alpha squared is minus the degree") {
  auto s = supersingular(103, 3);
  Rng rng(3);
  const Level& L = s.F->level(2);
  for (auto [ell, d] : {std::pair{2, 1}, {3, 1}, {3, 2}, {5, 2}, {2, 1}, {5, 1}}) {
    InseparableReflection r = compute_reflection(s.E, ell, d, rng);
    for (int t = 0; t < 10; ++t) {
      auto P = random_point<Fq>(s.E, &L, rng);
      auto aaP = evaluate_chain(r.chain, evaluate_chain(r.chain, P));
      CHECK(add(s.E, aaP, mul(s.E, P, r.degree())).inf);
    }
  }
}

TEST_CASE("the kernel is cyclic") {
  // a structured base would let alpha factor through [ell] when k = 1
  Setup s = supersingular(1009, 9);
  for (u64 seed = 10; has_d_structure(j_invariant(s.E), 2); ++seed) s = supersingular(1009, seed);
  Rng rng(9);
  const Field* F = s.F.get();
  for (int n = 0; n < 5; ++n) {
    InseparableReflection r = compute_reflection(s.E, 3, 2, rng);
    // E[3] lies in E(F_{p^2}) since 3 divides p - 1 = 1008
    bool survives = false;
    for (int i = 0; i < 20 && !survives; ++i) {
      auto Q = mul(s.E, random_point<Fp2>(s.E, F, rng), 336);
      if (!Q.inf) survives = !evaluate_chain(r.chain, Q).inf;
    }
    CHECK(survives);
  }
}

TEST_CASE("greedy walks stop at the first structured vertex") {
  auto s = supersingular(10007, 4);
  Rng rng(4);
  InseparableReflection r = compute_reflection(s.E, 2, 1, rng, true);
  for (int i = 1; i < r.k; ++i) CHECK(!has_d_structure(r.walk.j_sequence[i], 1));
  CHECK(r.k <= walk_length(10007, 2));
  Rng check(4);
  CHECK(verify_reflection(r, 5, check));
}

TEST_CASE("reflections of distinct ell do not commute") {
  auto s = supersingular(1009, 5);
  Rng rng(5);
  const Field* F = s.F.get();
  InseparableReflection a = compute_reflection(s.E, 2, 1, rng);
  InseparableReflection b = compute_reflection(s.E, 3, 1, rng);
  int differ = 0;
  for (int i = 0; i < 10; ++i) {
    auto P = random_point<Fp2>(s.E, F, rng);
    differ += evaluate_chain(a.chain, evaluate_chain(b.chain, P)) != evaluate_chain(b.chain, evaluate_chain(a.chain, P));
  }
  CHECK(differ > 0);
}

TEST_CASE("verification catches a wrong isogeny") {
  auto s = supersingular(1009, 6);
  Rng rng(6);
  InseparableReflection r;
  do {
    r = compute_reflection(s.E, 3, 1, rng);
  } while (r.k == 0);
  Rng zero(0);
  CHECK(verify_reflection(r, 0, zero));

  InseparableReflection bad = r;
  const IsogenyStep& first = r.chain.steps.front();
  REQUIRE(first.kind == StepKind::Velu);
  for (const auto& h : kernels(s.E, 3, rng)) {
    if (h == first.kernel) continue;
    IsogenyStep other = velu_isogeny(s.E, h, 3);
    auto us = isomorphisms(other.cod, first.cod, rng);
    bad.chain.steps.front() = us.empty() ? other : compose_scaling(other, us.front());
    break;
  }
  REQUIRE(bad.chain.steps.front().kernel != first.kernel);
  Rng check(7);
  CHECK(!verify_reflection(bad, 10, check));
}

TEST_CASE("invalid parameters") {
  auto s = supersingular(103, 8);
  Rng rng(8);
  std::string kind;
  try {
    compute_reflection(s.E, 2, 2, rng);
  } catch (const DomainError& e) {
    kind = e.kind();
  }
  CHECK(kind == "BadParameters");
}
