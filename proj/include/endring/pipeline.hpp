#pragma once

#include <string>
#include <vector>

#include "endring/quatlin.hpp"
#include "endring/trace.hpp"

namespace endring {

struct PipelineOptions {
  TraceOptions trace;
  bool greedy = false;
  int threads = 1;
  int max_reflections = 64;
};

// A supersingular curve with a normalized model: a class number one
// j-invariant when p is inert in its CM field, otherwise a search over F_p.
Curve supersingular_curve(const Field* F, Rng& rng);
// Endpoint of a walk of floor(log2 p) steps in G(p, 2) from
// supersingular_curve, re-walked while j lies in F_p (when possible).
Curve random_supersingular_curve(const Field* F, Rng& rng);

struct BassResult {
  InseparableReflection a1, a2;
  IsogenyChain rho;
  Int trace_rho, disc_rho;  // disc = T^2 - 4 deg rho
  GramMatrix gram;
  LdlResult frame;
  QuatOrder order;  // Z<1, a1, a2, a1 a2> in the frame
};

// Two reflections with distinct ell and their Bass order. Requires p > 8,
// d square-free, d < p/4 and -dp != 1 mod 4.
BassResult algorithm2_bass(const Curve& E, Rng& rng, int ell1 = 3, int ell2 = 5, int d = 2,
                           const PipelineOptions& opts = {});

struct Provenance {
  std::string method;  // "heuristic" or "enumerate"
  int reflections_used = 0;
  std::vector<Int> gcd_trace;  // discrd after each generating step
  std::vector<std::string> notes;
};

struct EndRingResult {
  Int p;
  Curve curve;
  std::vector<InseparableReflection> reflections;  // gamma_r used
  GramMatrix gram;                                 // of 1 and the first three
  LdlResult frame;
  std::vector<RatVec> embedding;  // row r: coordinates of reflection r
  QuatOrder zp_order;             // the discrd p^2 stage
  QuatOrder order;
  Provenance provenance;
  // enumerate only
  int overorders_found = 0;
  Int overorder_bound = 0;
  OverorderStats stats;
};

// Generates Z + P from d = 1 reflections with ell alternating 2, 3, then
// p-saturates.
EndRingResult heuristic_endring(const Curve& E, Rng& rng, const PipelineOptions& opts = {});
// The Bass order mapped into the heuristic frame, its maximal overorders,
// and the one equal to the heuristic order; throws OracleMismatch.
EndRingResult algorithm3_endring(const Curve& E, Rng& rng, const PipelineOptions& opts = {});

// ---- experiments ----------------------------------------------------------

struct TrialRecord {
  int bits = 0;
  Int prime;
  int trial = 0;
  u64 seed = 0;
  bool gcd_ok = false;
  bool generated = false;
  int reflections_used = 0;
  Int disc1, disc2;
};

struct ExperimentRow {
  int bits = 0;
  int trials = 0;
  int gcd_count = 0, generate_count = 0;
  double freq_gcd = 0, freq_generate = 0;
};

struct ExperimentResult {
  std::vector<TrialRecord> trials;
  std::vector<ExperimentRow> rows;
  std::string box;  // sampling box description, empty when unused
};

// Trials keyed by (bits, trial) from the master seed, so results do not
// depend on the thread count.
ExperimentResult experiment_coprimality(int bits_lo, int bits_hi, int trials, u64 seed,
                                        const PipelineOptions& opts = {});
ExperimentResult experiment_quaternion(int bits_lo, int bits_hi, int trials, u64 seed,
                                       const PipelineOptions& opts = {});

// Aggregates records in order of bits.
std::vector<ExperimentRow> aggregate(const std::vector<TrialRecord>& records);

}  // namespace endring
