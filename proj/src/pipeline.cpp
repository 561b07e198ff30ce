#include "endring/pipeline.hpp"

#include <deque>
#include <map>
#include <optional>

#include "endring/parallel.hpp"

namespace endring {

namespace {

Int prime_of(const Curve& E) { return Int(static_cast<unsigned long>(E.field()->p())); }

// Trd(r1 conj(r2)) = p Trd(rho(r1, r2)) for trace-zero r1, r2.
Int pairing(const InseparableReflection& r1, const InseparableReflection& r2, const Int& p, Rng& rng,
            const TraceOptions& opts) {
  return p * trd(rho_chain(r1, r2, rng), rng, opts);
}

// Reflections drawn on demand in batches of `threads`; reflection i uses
// its own stream, so the sequence does not depend on the batch size.
class ReflectionStream {
 public:
  ReflectionStream(const Curve& E, u64 master, const PipelineOptions& opts, std::vector<int> ells, int d)
      : E_(E), master_(master), opts_(opts), ells_(std::move(ells)), d_(d) {}

  const InseparableReflection& get(int i) {
    if (i >= static_cast<int>(cache_.size())) {
      int lo = static_cast<int>(cache_.size());
      int hi = std::max(i + 1, lo + std::max(opts_.threads, 1));
      cache_.resize(hi);
      parallel_for(hi - lo, opts_.threads, [&](int j) {
        Rng rng(split_seed(master_, 1, lo + j));
        cache_[lo + j] = compute_reflection(E_, ell(lo + j), d_, rng, opts_.greedy);
      });
    }
    return *cache_[i];
  }
  int ell(int i) const { return ells_[i % ells_.size()]; }

 private:
  Curve E_;
  u64 master_;
  PipelineOptions opts_;
  std::vector<int> ells_;
  int d_;
  std::deque<std::optional<InseparableReflection>> cache_;  // references stay valid on growth
};

bool square_free(int d) {
  for (int q = 2; q * q <= d; ++q)
    if (d % (q * q) == 0) return false;
  return true;
}

}  // namespace

Curve supersingular_curve(const Field* F, Rng& rng) {
  Int p = Int(static_cast<unsigned long>(F->p()));
  static const std::pair<long, const char*> cm[] = {
      {-3, "0"},           {-4, "1728"},         {-7, "-3375"},
      {-8, "8000"},        {-11, "-32768"},      {-19, "-884736"},
      {-43, "-884736000"}, {-67, "-147197952000"}, {-163, "-262537412640768000"}};
  for (const auto& [D, j] : cm) {
    if (mpz_kronecker(Int(D).get_mpz_t(), p.get_mpz_t()) == -1)
      return normalize_model(curve_from_j(F->from_int(Int(j))), rng);
  }
  for (;;) {
    Fp2 j = F->from_int(Int(rng.below(F->p())));
    if (j.is_zero() || j == F->from_int(1728)) continue;
    Curve E = curve_from_j(j);
    if (is_supersingular(E, rng)) return normalize_model(E, rng);
  }
}

Curve random_supersingular_curve(const Field* F, Rng& rng) {
  Curve start = supersingular_curve(F, rng);
  Int p = Int(static_cast<unsigned long>(F->p()));
  WalkParams params = WalkParams::make(p, 2, 1);
  params.t = static_cast<int>(mpz_sizeinbase(p.get_mpz_t(), 2)) - 1;
  Curve last = start;
  for (int attempt = 0; attempt < 64; ++attempt) {
    WalkRecord w = nbt_walk(params, start, rng);
    last = w.curves.back();
    if (!w.j_sequence.back().in_prime_field()) break;
  }
  return normalize_model(last, rng);
}

BassResult algorithm2_bass(const Curve& E, Rng& rng, int ell1, int ell2, int d, const PipelineOptions& opts) {
  Int p = prime_of(E);
  if (p <= 8) fail("TooSmall", "Bass orders need p > 8");
  if (ell1 == ell2) fail("BadParameters", "the two reflections need distinct ell");
  if (d < 1 || !square_free(d) || 4 * d >= p) fail("BadParameters", "d must be square-free with d < p/4");
  Int mdp = -Int(d) * p;
  if (((mdp % 4) + 4) % 4 == 1) fail("BadParameters", "-dp must not be 1 mod 4");

  u64 master = rng.next();
  BassResult out;
  const int ells[2] = {ell1, ell2};
  // small p can give reflections through one shared structure, which commute
  for (int attempt = 0;; ++attempt) {
    if (2 * attempt >= opts.max_reflections) fail("DegenerateBasis", "every reflection pair commuted");
    u64 key = attempt == 0 ? 1 : 100 + 2 * attempt;
    std::optional<InseparableReflection> refl[2];
    parallel_for(2, opts.threads, [&](int i) {
      Rng r(split_seed(master, key, i));
      refl[i] = compute_reflection(E, ells[i], d, r, opts.greedy);
    });
    out.a1 = std::move(*refl[0]);
    out.a2 = std::move(*refl[1]);
    Rng r(split_seed(master, key + 1, 0));
    out.rho = rho_chain(out.a1, out.a2, r);
    out.trace_rho = trd(out.rho, r, opts.trace);
    out.disc_rho = out.trace_rho * out.trace_rho - 4 * out.rho.degree();
    if (out.disc_rho != 0) break;
  }
  out.gram = bass_gram(p, d, out.a1.phi_degree(), out.a2.phi_degree(), out.trace_rho);
  out.frame = ldl_to_algebra(out.gram);
  out.order = lattice_from_rows(out.frame.alg, {out.frame.images.begin(), out.frame.images.end()});
  if (!is_order(out.order)) throw std::logic_error("algorithm2_bass: lattice is not closed under products");
  return out;
}

EndRingResult heuristic_endring(const Curve& E, Rng& rng, const PipelineOptions& opts) {
  Int p = prime_of(E);
  u64 master = rng.next();
  ReflectionStream stream(E, master, opts, {2, 3}, 1);
  EndRingResult res;
  res.p = p;
  res.curve = E;
  res.provenance.method = "heuristic";

  auto pair_traces = [&](const std::vector<std::pair<int, int>>& pairs) {
    std::vector<Int> out(pairs.size());
    for (const auto& [i, j] : pairs) {
      stream.get(i);
      stream.get(j);
    }
    parallel_for(static_cast<int>(pairs.size()), opts.threads, [&](int n) {
      auto [i, j] = pairs[n];
      Rng r(split_seed(master, 1000 + i, j));
      out[n] = pairing(stream.get(i), stream.get(j), p, r, opts.trace);
    });
    return out;
  };

  std::vector<int> basis = {0, 1, 2};
  int next = 3;
  for (;;) {
    auto t = pair_traces({{basis[0], basis[1]}, {basis[0], basis[2]}, {basis[1], basis[2]}});
    GramMatrix& G = res.gram;
    for (auto& row : G.g) row.fill(0);
    G.g[0][0] = 2;
    for (int i = 0; i < 3; ++i) {
      Int di = stream.get(basis[i]).phi_degree();
      G.g[i + 1][i + 1] = 2 * p * di * di;
    }
    G.g[1][2] = G.g[2][1] = t[0];
    G.g[1][3] = G.g[3][1] = t[1];
    G.g[2][3] = G.g[3][2] = t[2];
    if (G.det() != 0) break;
    res.provenance.notes.push_back("DegenerateBasis: replaced reflection " + std::to_string(basis[2]));
    if (next >= opts.max_reflections) fail("DegenerateBasis", "no three independent reflections found");
    basis[2] = next++;
  }

  res.frame = ldl_to_algebra(res.gram);
  std::vector<QuatElement> gens;
  for (int r = 0; r < 3; ++r) {
    res.reflections.push_back(stream.get(basis[r]));
    res.embedding.push_back(res.frame.images[r + 1]);
    gens.push_back(QuatElement{res.frame.alg, res.frame.images[r + 1]});
  }
  QuatOrder O = order_from_generators(res.frame.alg, gens);
  res.provenance.gcd_trace.push_back(discrd(O));
  Int target = p * p;
  while (res.provenance.gcd_trace.back() != target) {
    if (next >= opts.max_reflections) fail("GenerationStalled", "Z+P not generated within the reflection budget");
    int i = next++;
    auto t = pair_traces({{basis[0], i}, {basis[1], i}, {basis[2], i}});
    QuatElement x = from_pairings(res.frame, res.gram, {0, t[0], t[1], t[2]});
    O = extend_order(O, x);
    res.reflections.push_back(stream.get(i));
    res.embedding.push_back(x.c);
    res.provenance.gcd_trace.push_back(discrd(O));
  }
  res.zp_order = O;
  res.order = p_saturate(O, p);
  Int d = discrd(res.order);
  res.provenance.gcd_trace.push_back(d);
  if (d != p || lattice_index(res.order, O) != p) throw std::logic_error("heuristic_endring: saturation failed");
  res.provenance.reflections_used = static_cast<int>(res.reflections.size());
  return res;
}

EndRingResult algorithm3_endring(const Curve& E, Rng& rng, const PipelineOptions& opts) {
  Int p = prime_of(E);
  u64 master = rng.next();
  Rng rh(split_seed(master, 1, 0)), rb(split_seed(master, 2, 0));
  EndRingResult res = heuristic_endring(E, rh, opts);
  BassResult bass = algorithm2_bass(E, rb, 3, 5, 2, opts);

  // alpha_i in the heuristic frame through its pairings with gamma_1..3
  QuatElement f[2];
  const InseparableReflection* alpha[2] = {&bass.a1, &bass.a2};
  Int t[2][3];
  parallel_for(6, opts.threads, [&](int n) {
    int i = n / 3, r = n % 3;
    Rng rr(split_seed(master, 3 + i, r));
    t[i][r] = pairing(res.reflections[r], *alpha[i], p, rr, opts.trace);
  });
  for (int i = 0; i < 2; ++i) f[i] = from_pairings(res.frame, res.gram, {0, t[i][0], t[i][1], t[i][2]});
  AlgebraPtr A = res.frame.alg;
  QuatOrder lambda = lattice_from_elements(A, {QuatElement::scalar(A, 1), f[0], f[1], f[0] * f[1]});
  if (!is_order(lambda)) throw std::logic_error("algorithm3_endring: Bass lattice is not an order");

  Factorization fac = factor(discrd(lambda));
  auto overs = maximal_overorders(lambda, p, fac, &res.stats);
  res.overorders_found = static_cast<int>(overs.size());
  res.overorder_bound = overorder_bound(fac, p);
  int matches = 0;
  for (const auto& O : overs) {
    if (O == res.order) ++matches;
  }
  if (matches != 1)
    fail("OracleMismatch", std::to_string(matches) + " of " + std::to_string(overs.size()) +
                               " maximal overorders equal the Z+P order");
  res.provenance.method = "enumerate";
  res.provenance.notes.push_back(
      "overorder selected by lattice equality with the Z+P order in the shared frame (desk-scale substitute for the "
      "isomorphism test)");
  for (const auto& w : res.stats.warnings) res.provenance.notes.push_back(w);
  return res;
}

// ---- experiments ----------------------------------------------------------

std::vector<ExperimentRow> aggregate(const std::vector<TrialRecord>& records) {
  std::map<int, ExperimentRow> rows;
  for (const auto& r : records) {
    auto& row = rows[r.bits];
    row.bits = r.bits;
    ++row.trials;
    row.gcd_count += r.gcd_ok;
    row.generate_count += r.generated;
  }
  std::vector<ExperimentRow> out;
  for (auto& [bits, row] : rows) {
    row.freq_gcd = static_cast<double>(row.gcd_count) / row.trials;
    row.freq_generate = static_cast<double>(row.generate_count) / row.trials;
    out.push_back(row);
  }
  return out;
}

namespace {

template <class Trial>
ExperimentResult run_trials(int bits_lo, int bits_hi, int trials, u64 seed, const PipelineOptions& opts,
                            Trial&& trial) {
  if (bits_lo < 4 || bits_hi < bits_lo || bits_hi > 30) fail("BadParameters", "bits range must lie in [4, 30]");
  if (trials < 1) fail("BadParameters", "trials must be positive");
  std::map<int, FieldPtr> fields;
  for (int b = bits_lo; b <= bits_hi; ++b) fields[b] = Field::make(next_prime(Int(1) << b));
  int per = trials;
  int n = (bits_hi - bits_lo + 1) * per;
  ExperimentResult out;
  out.trials.resize(n);
  parallel_for(n, opts.threads, [&](int i) {
    TrialRecord& rec = out.trials[i];
    rec.bits = bits_lo + i / per;
    rec.trial = i % per;
    rec.seed = split_seed(seed, rec.bits, rec.trial);
    const Field* F = fields.at(rec.bits).get();
    rec.prime = Int(static_cast<unsigned long>(F->p()));
    Rng rng(rec.seed);
    trial(F, rng, rec);
  });
  out.rows = aggregate(out.trials);
  return out;
}

}  // namespace

ExperimentResult experiment_coprimality(int bits_lo, int bits_hi, int trials, u64 seed,
                                        const PipelineOptions& opts) {
  PipelineOptions inner = opts;
  inner.threads = 1;
  return run_trials(bits_lo, bits_hi, trials, seed, opts, [&](const Field* F, Rng& rng, TrialRecord& rec) {
    Int p = rec.prime;
    Curve E = random_supersingular_curve(F, rng);
    u64 master = rng.next();
    ReflectionStream stream(E, master, inner, {2, 3, 2, 3}, 1);
    const InseparableReflection* a[4];
    for (int i = 0; i < 4; ++i) a[i] = &stream.get(i);
    rec.reflections_used = 4;

    auto rho_trace = [&](int i, int j, Int* disc) {
      Rng r(split_seed(master, 1000 + i, j));
      IsogenyChain rho = rho_chain(*a[i], *a[j], r);
      Int T = trd(rho, r, inner.trace);
      *disc = T * T - 4 * rho.degree();
      return T;
    };
    Int T12 = rho_trace(0, 1, &rec.disc1);
    rho_trace(2, 3, &rec.disc2);
    rec.gcd_ok = gcd(abs(rec.disc1), abs(rec.disc2)) == 1;
    if (rec.disc1 == 0) {
      rec.generated = false;
      return;
    }

    // frame 1, a1, a2, a1 a2; pairings of a3, a4 with a1 a2 are Trd(x a2 a1) = -p Trd(rho(x, a2) a1)
    GramMatrix G = bass_gram(p, 1, a[0]->phi_degree(), a[1]->phi_degree(), T12);
    LdlResult frame = ldl_to_algebra(G);
    std::vector<QuatElement> gens = {QuatElement{frame.alg, frame.images[1]},
                                     QuatElement{frame.alg, frame.images[2]}};
    for (int x = 2; x < 4; ++x) {
      Rng r(split_seed(master, 2000 + x, 0));
      Int t1 = pairing(*a[0], *a[x], p, r, inner.trace);
      Int t2 = pairing(*a[1], *a[x], p, r, inner.trace);
      IsogenyChain c = a[0]->chain;
      c.append(rho_chain(*a[x], *a[1], r));
      Int t3 = -p * trd(c, r, inner.trace);
      gens.push_back(from_pairings(frame, G, {0, t1, t2, t3}));
    }
    try {
      rec.generated = discrd(order_from_generators(frame.alg, gens)) == p * p;
    } catch (const DomainError&) {
      rec.generated = false;
    }
  });
}

ExperimentResult experiment_quaternion(int bits_lo, int bits_hi, int trials, u64 seed, const PipelineOptions& opts) {
  auto res = run_trials(bits_lo, bits_hi, trials, seed, opts, [&](const Field*, Rng& rng, TrialRecord& rec) {
    const Int& p = rec.prime;
    MaxOrder M = random_max_order(p, rng);
    QuatOrder Z = z_plus(two_sided_P(M.order, p));
    Int box = isqrt(p - 1) + 1;
    auto sample = [&] {
      QuatElement x = QuatElement::scalar(M.alg, 0);
      for (int i = 0; i < 4; ++i) x = x + Rat(rng.range(-box, box)) * Z.element(i);
      return x;
    };
    auto disc = [](const QuatElement& x) {
      Rat t = trd(x);
      Rat d = t * t - 4 * nrd(x);
      return Int(d.get_num());
    };
    for (;;) {
      QuatElement a[4];
      for (auto& x : a) x = sample();
      Int D[2];
      for (int i = 0; i < 2; ++i) {
        const QuatElement &x = a[2 * i], &y = a[2 * i + 1];
        QuatElement rho = trd(y) * x + trd(x) * y - Rat(2) * (x * y);
        D[i] = disc(rho);
      }
      if (D[0] == 0 || D[1] == 0) continue;
      rec.disc1 = D[0];
      rec.disc2 = D[1];
      rec.gcd_ok = gcd(D[0], D[1]) == 4 * p * p;
      try {
        rec.generated = discrd(order_from_generators(M.alg, {a[0], a[1], a[2], a[3]})) == p * p;
      } catch (const DomainError&) {
        rec.generated = false;
      }
      return;
    }
  });
  res.box = "coordinates uniform in [-ceil(sqrt p), ceil(sqrt p)] over the HNF basis of Z+P";
  return res;
}

}  // namespace endring
