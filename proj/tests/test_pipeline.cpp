#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>

#include "endring/parallel.hpp"
#include "endring/pipeline.hpp"
#include "endring/serialize.hpp"

using namespace endring;

namespace {

std::string error_kind(auto f) {
  try {
    f();
  } catch (const DomainError& e) {
    return e.kind();
  }
  return "";
}

}  // namespace

TEST_CASE("starting curves") {
  Rng rng(1);
  for (u64 p : {5, 7, 11, 13, 103, 1009, 10007, 65537, 1000003}) {
    auto F = Field::make(p);
    Curve E = supersingular_curve(F.get(), rng);
    CHECK(is_supersingular(E, rng));
    CHECK(has_exponent_p_minus_1(E, rng));
    Curve R = random_supersingular_curve(F.get(), rng);
    CHECK(has_exponent_p_minus_1(R, rng));
    if (p > 13) CHECK(!j_invariant(R).in_prime_field());
  }
}

TEST_CASE("parallel_for") {
  std::vector<int> out(100, 0);
  parallel_for(100, 4, [&](size_t i) { out[i] = static_cast<int>(i * i); });
  for (int i = 0; i < 100; ++i) CHECK(out[i] == i * i);
  std::atomic<int> count{0};
  std::string what;
  try {
    parallel_for(50, 3, [&](size_t i) {
      ++count;
      if (i == 7 || i == 30) throw std::runtime_error("task " + std::to_string(i));
    });
  } catch (const std::runtime_error& e) {
    what = e.what();
  }
  CHECK(what == "task 7");
}

TEST_CASE("Bass orders") {
  auto F = Field::make(1009);
  Rng curve(2), rng(3);
  Curve E = random_supersingular_curve(F.get(), curve);
  BassResult b = algorithm2_bass(E, rng);
  CHECK(b.a1.ell == 3);
  CHECK(b.a2.ell == 5);
  CHECK(b.disc_rho == b.trace_rho * b.trace_rho - 4 * b.rho.degree());
  CHECK(b.disc_rho < 0);
  CHECK(b.gram.det() == ipow(Int(1009), 4) * b.disc_rho * b.disc_rho);
  CHECK(is_order(b.order));
  CHECK(discrd(b.order) == 1009 * 1009 * abs(b.disc_rho));
}

TEST_CASE("Bass parameter checks") {
  auto F = Field::make(7);
  Rng rng(4);
  Curve E = supersingular_curve(F.get(), rng);
  CHECK(error_kind([&] { algorithm2_bass(E, rng); }) == "TooSmall");
  auto G = Field::make(103);
  Curve E2 = supersingular_curve(G.get(), rng);
  CHECK(error_kind([&] { algorithm2_bass(E2, rng, 3, 3, 2); }) == "BadParameters");
  CHECK(error_kind([&] { algorithm2_bass(E2, rng, 3, 5, 4); }) == "BadParameters");
  // -dp = 1 mod 4 for p = 103, d = 1
  CHECK(error_kind([&] { algorithm2_bass(E2, rng, 3, 5, 1); }) == "BadParameters");
}

TEST_CASE("heuristic endomorphism ring") {
  for (u64 p : {103, 1009}) {
    auto F = Field::make(p);
    Rng curve(5), rng(6);
    Curve E = random_supersingular_curve(F.get(), curve);
    EndRingResult r = heuristic_endring(E, rng);
    Int P(static_cast<unsigned long>(p));
    CHECK(r.p == P);
    CHECK(is_order(r.order));
    CHECK(discrd(r.order) == P);
    CHECK(discrd(r.zp_order) == P * P);
    CHECK(lattice_index(r.order, r.zp_order) == P);
    CHECK(r.provenance.method == "heuristic");
    CHECK(r.provenance.gcd_trace.back() == P);
    CHECK(r.provenance.reflections_used == static_cast<int>(r.reflections.size()));
    CHECK(r.embedding.size() == r.reflections.size());
    for (const auto& row : r.embedding) CHECK(contains(r.zp_order, QuatElement{r.order.alg, row}));
    CHECK(r.gram.g[0] == std::array<Int, 4>{2, 0, 0, 0});
  }
}

TEST_CASE("enumeration agrees with the heuristic") {
  auto F = Field::make(103);
  Rng curve(7);
  Curve E = random_supersingular_curve(F.get(), curve);
  // algorithm3 runs the heuristic on the first child of its stream
  Rng r1(8), r2(8);
  Rng child(split_seed(r1.next(), 1, 0));
  EndRingResult h = heuristic_endring(E, child);
  EndRingResult a = algorithm3_endring(E, r2);
  CHECK(a.provenance.method == "enumerate");
  CHECK(a.order == h.order);
  CHECK(a.overorders_found >= 1);
  CHECK(Int(a.overorders_found) <= a.overorder_bound);
}

TEST_CASE("results do not depend on the thread count") {
  auto F = Field::make(1009);
  Rng curve(9);
  Curve E = random_supersingular_curve(F.get(), curve);
  PipelineOptions one, four;
  four.threads = 4;
  Rng r1(10), r2(10);
  EndRingResult a = heuristic_endring(E, r1, one), b = heuristic_endring(E, r2, four);
  CHECK(to_json(a, true).dump() == to_json(b, true).dump());

  ExperimentResult x = experiment_quaternion(10, 11, 6, 11, one);
  ExperimentResult y = experiment_quaternion(10, 11, 6, 11, four);
  CHECK(trials_csv(x) == trials_csv(y));
  ExperimentResult u = experiment_coprimality(10, 10, 3, 12, one);
  ExperimentResult v = experiment_coprimality(10, 10, 3, 12, four);
  CHECK(trials_csv(u) == trials_csv(v));
}

TEST_CASE("experiments") {
  ExperimentResult q = experiment_quaternion(12, 13, 10, 13);
  REQUIRE(q.trials.size() == 20);
  CHECK(!q.box.empty());
  for (const auto& t : q.trials) {
    CHECK(is_prime(t.prime));
    CHECK(t.prime > Int(1) << t.bits);
    // coprime discriminants force generation
    if (t.gcd_ok) CHECK(t.generated);
  }
  REQUIRE(q.rows.size() == 2);
  int gen = 0;
  for (const auto& t : q.trials) gen += t.bits == 12 && t.generated;
  CHECK(q.rows[0].generate_count == gen);
  CHECK(q.rows[0].trials == 10);

  ExperimentResult c = experiment_coprimality(12, 12, 4, 14);
  REQUIRE(c.trials.size() == 4);
  for (const auto& t : c.trials) {
    CHECK(t.disc1 < 0);
    CHECK(t.disc2 < 0);
    if (t.gcd_ok) CHECK(t.generated);
  }
  std::string csv = aggregate_csv(c);
  CHECK(csv.rfind("bits,trials,freq_gcd,freq_generate\n12,4,", 0) == 0);
  CHECK(error_kind([] { experiment_quaternion(12, 11, 1, 0); }) == "BadParameters");
}

TEST_CASE("aggregation") {
  std::vector<TrialRecord> recs;
  for (int i = 0; i < 6; ++i) {
    TrialRecord t;
    t.bits = 12 + i % 2;
    t.trial = i / 2;
    t.gcd_ok = i < 2;
    t.generated = i < 4;
    recs.push_back(t);
  }
  auto rows = aggregate(recs);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].bits == 12);
  CHECK(rows[0].trials == 3);
  CHECK(rows[0].gcd_count == 1);
  CHECK(rows[0].generate_count == 2);
  CHECK(rows[1].generate_count == 2);
  CHECK(rows[1].freq_generate == doctest::Approx(2.0 / 3));
}
