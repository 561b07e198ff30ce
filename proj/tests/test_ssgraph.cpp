#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "endring/pipeline.hpp"

using namespace endring;

namespace {

// All supersingular j-invariants, by breadth-first search from a known one.
std::vector<Fp2> vertices(const Field* F, int ell, Rng& rng) {
  Rng seed(0);
  std::vector<Fp2> out{j_invariant(supersingular_curve(F, seed))};
  std::set<Fp2> seen(out.begin(), out.end());
  for (size_t i = 0; i < out.size(); ++i)
    for (const Fp2& n : neighbors(out[i], ell, rng))
      if (seen.insert(n).second) out.push_back(n);
  return out;
}

}  // namespace

TEST_CASE("modular polynomials are symmetric") {
  auto F = Field::make(1009);
  Rng rng(1);
  for (int ell : {2, 3, 5})
    for (int i = 0; i < 50; ++i) {
      Fp2 x = F->random(rng), y = F->random(rng);
      CHECK(modpoly_eval(ell, x, y) == modpoly_eval(ell, y, x));
    }
}

TEST_CASE("walk length") {
  CHECK(walk_length(1019, 3) == 21);
  CHECK(walk_length(Int(1 << 20) + 7, 2) < 80);
  for (int ell : {2, 3, 5}) {
    int prev = 0;
    for (Int p = 11; p < 10000; p = next_prime(p)) {
      int t = walk_length(p, ell);
      REQUIRE(t >= prev);
      prev = t;
    }
    for (Int p : {Int(11), Int(103), Int(1009), Int(10007), Int(1000003), Int(1u << 31)}) {
      int t = walk_length(p, ell);
      // least t satisfying the mixing inequality
      auto ok = [&](int s) {
        Int lhs = 64 * ipow(Int(ell), s) * (ell + 1) * (ell + 1);
        Int f = (ell + 1) * s + ell - 1;
        return lhs >= (p - 1) * (p - 1) * (p - 1) * f * f;
      };
      CHECK(ok(t));
      if (t > 1) CHECK(!ok(t - 1));
    }
  }
}

TEST_CASE("neighbors at p = 7") {
  auto F = Field::make(7);
  Rng rng(2);
  std::vector<Fp2> n = neighbors(F->from_int(6), 2, rng);
  CHECK(n == std::vector<Fp2>(3, F->from_int(6)));
}

TEST_CASE("neighbor multiplicities and symmetry") {
  Rng rng(3);
  for (u64 p : {101, 103, 1009}) {
    auto F = Field::make(p);
    for (int ell : {2, 3, 5}) {
      std::vector<Fp2> vs = vertices(F.get(), ell, rng);
      // every supersingular j is reached from one in a connected graph
      Int expected = Int(static_cast<unsigned long>(p / 12));
      int r = static_cast<int>(p % 12);
      expected += r == 1 ? 0 : (r == 11 ? 2 : 1);
      CHECK(Int(static_cast<unsigned long>(vs.size())) == expected);
      std::map<Fp2, std::vector<Fp2>> adj;
      for (const Fp2& j : vs) {
        adj[j] = neighbors(j, ell, rng);
        CHECK(static_cast<int>(adj[j].size()) == ell + 1);
      }
      for (const Fp2& j : vs)
        for (const Fp2& k : adj[j]) CHECK(std::count(adj[k].begin(), adj[k].end(), j) >= 1);
    }
  }
}

TEST_CASE("non-backtracking walks") {
  auto F = Field::make(1009);
  Rng rng(4), seed(4);
  Curve E = random_supersingular_curve(F.get(), seed);
  for (int ell : {2, 3, 5}) {
    WalkParams params = WalkParams::make(1009, ell, 1);
    CHECK(params.t == walk_length(1009, ell));
    WalkRecord w = nbt_walk(params, E, rng);
    REQUIRE(static_cast<int>(w.steps.size()) == params.t);
    REQUIRE(w.j_sequence.size() == w.steps.size() + 1);
    CHECK(w.curves.front() == E);
    for (size_t i = 0; i < w.steps.size(); ++i) {
      CHECK(w.steps[i].dom == w.curves[i]);
      CHECK(w.steps[i].cod == w.curves[i + 1]);
      CHECK(w.j_sequence[i + 1] == j_invariant(w.curves[i + 1]));
      CHECK(modpoly_eval(ell, w.j_sequence[i], w.j_sequence[i + 1]).is_zero());
      // the next kernel is never the dual of the previous step
      if (i > 0) CHECK(w.steps[i].kernel != w.dual_kernels[i - 1]);
    }
    WalkRecord cut = w;
    cut.truncate(3);
    CHECK(cut.steps.size() == 3);
    CHECK(cut.j_sequence.size() == 4);
  }
}

TEST_CASE("walk parameters are validated") {
  auto kind = [](auto f) {
    try {
      f();
    } catch (const DomainError& e) {
      return e.kind();
    }
    return std::string();
  };
  CHECK(kind([] { WalkParams::make(1009, 2, 2); }) == "BadParameters");
  CHECK(kind([] { WalkParams::make(7, 3, 2); }) == "BadParameters");
  CHECK(kind([] { WalkParams::make(1009, 7, 1); }) == "Unsupported");
}

TEST_CASE("d-structures") {
  Rng rng(5);
  for (u64 p : {103, 1009}) {
    auto F = Field::make(p);
    std::vector<Fp2> vs = vertices(F.get(), 2, rng);
    int d2 = 0;
    for (const Fp2& j : vs) {
      CHECK(has_d_structure(j, 1) == (pow(j, Int(static_cast<unsigned long>(p))) == j));
      for (int d : {1, 2}) {
        if (!has_d_structure(j, d)) continue;
        d2 += d == 2;
        Curve E = normalize_model(curve_from_j(j), rng);
        IsogenyStep psi = build_d_structure(E, d, rng);
        CHECK(psi.dom == E);
        CHECK(psi.cod == conjugate_curve(E));
        CHECK(psi.degree == d);
        CHECK(check_d_structure(psi, d, rng, 5));
      }
    }
    CHECK(d2 > 0);
  }
}
