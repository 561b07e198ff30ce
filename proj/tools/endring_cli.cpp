// endring: command-line front end.
//
// Seeding: every command derives its streams from --seed with split_seed,
// keyed by a fixed tag per use (0: curve selection, 1: the algorithm,
// 2: self-checks) and, for experiments, by (bits, trial). Outputs therefore
// do not depend on --threads.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "endring/serialize.hpp"

using namespace endring;

namespace {

struct RunConfig {
  std::string command;
  long long p = 0;
  int ell = 2, ell2 = 5, d = 1;
  u64 seed = 1;
  bool greedy = false, trace_walks = false, aggregate = false;
  std::string method = "heuristic";
  std::string chain_path, output_path, bits = "12:20", experiment;
  int trials = 100;
  int threads = 0;
  int tower_ceiling = 12;
};

int default_threads() {
  if (const char* env = std::getenv("ENDRING_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

PipelineOptions options(const RunConfig& cfg) {
  PipelineOptions o;
  o.greedy = cfg.greedy;
  o.threads = cfg.threads > 0 ? cfg.threads : default_threads();
  o.trace.tower_ceiling = cfg.tower_ceiling;
  return o;
}

void parse_bits(const std::string& s, int* lo, int* hi) {
  auto number = [&](const std::string& part) {
    size_t used = 0;
    int v = -1;
    try {
      v = std::stoi(part, &used);
    } catch (const std::exception&) {
    }
    if (part.empty() || used != part.size() || v < 0) throw CLI::ValidationError("--bits", "expected LO:HI, got '" + s + "'");
    return v;
  };
  auto colon = s.find(':');
  *lo = number(s.substr(0, colon));
  *hi = colon == std::string::npos ? *lo : number(s.substr(colon + 1));
}

std::string run(const RunConfig& cfg) {
  PipelineOptions opts = options(cfg);
  if (cfg.command == "experiment") {
    int lo, hi;
    parse_bits(cfg.bits, &lo, &hi);
    ExperimentResult r = cfg.experiment == "coprimality" ? experiment_coprimality(lo, hi, cfg.trials, cfg.seed, opts)
                                                         : experiment_quaternion(lo, hi, cfg.trials, cfg.seed, opts);
    return cfg.aggregate ? aggregate_csv(r) : trials_csv(r);
  }

  FieldPtr field = Field::make(Int(std::to_string(cfg.p)));
  const Field* F = field.get();
  json out;
  if (cfg.command == "trace") {
    std::ifstream in(cfg.chain_path);
    if (!in) throw CLI::ValidationError("--chain", "cannot read '" + cfg.chain_path + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      fail("BadInput", std::string("chain file is not valid JSON: ") + e.what());
    }
    IsogenyChain c = chain_from_json(j, F);
    Rng rng(split_seed(cfg.seed, 1));
    out = json{{"p", std::to_string(F->p())}, {"degree", to_string(c.degree())},
               {"trace", to_string(trd(c, rng, opts.trace))}};
  } else {
    Rng curve_rng(split_seed(cfg.seed, 0)), rng(split_seed(cfg.seed, 1));
    Curve E = random_supersingular_curve(F, curve_rng);
    if (cfg.command == "reflect") {
      InseparableReflection r = compute_reflection(E, cfg.ell, cfg.d, rng, cfg.greedy);
      Rng check(split_seed(cfg.seed, 2));
      out = to_json(r, verify_reflection(r, 10, check), cfg.trace_walks);
    } else if (cfg.command == "bass") {
      out = to_json(algorithm2_bass(E, rng, cfg.ell, cfg.ell2, cfg.d, opts), cfg.trace_walks);
    } else {
      EndRingResult r = cfg.method == "enumerate" ? algorithm3_endring(E, rng, opts) : heuristic_endring(E, rng, opts);
      out = to_json(r, cfg.trace_walks);
    }
  }
  return out.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Endomorphism rings of supersingular curves from inseparable reflections"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub, bool needs_p) {
    if (needs_p) sub->add_option("--p", cfg.p, "characteristic")->required();
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--threads", cfg.threads, "worker threads (default: ENDRING_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--tower-ceiling", cfg.tower_ceiling, "deepest extension level used by traces")
        ->check(CLI::Range(1, 64));
    sub->add_option("-o,--output", cfg.output_path, "write output to a file instead of stdout");
  };

  auto* reflect = app.add_subcommand("reflect", "compute one inseparable reflection");
  common(reflect, true);
  reflect->add_option("--ell", cfg.ell, "walk degree")->check(CLI::IsMember({2, 3, 5}));
  reflect->add_option("--d", cfg.d, "structure degree")->check(CLI::PositiveNumber);
  reflect->add_flag("--greedy", cfg.greedy, "accept the first structured vertex of a walk");
  reflect->add_flag("--trace-walks", cfg.trace_walks, "include the walk record");

  auto* bass = app.add_subcommand("bass", "Bass suborder from two reflections");
  common(bass, true);
  bass->add_option("--ell", cfg.ell, "first walk degree")->check(CLI::IsMember({2, 3, 5}));
  bass->add_option("--ell2", cfg.ell2, "second walk degree")->check(CLI::IsMember({2, 3, 5}));
  bass->add_option("--d", cfg.d, "structure degree")->check(CLI::PositiveNumber);
  bass->add_flag("--greedy", cfg.greedy, "accept the first structured vertex of a walk");
  bass->add_flag("--trace-walks", cfg.trace_walks, "include the walk records");
  bass->callback([&] {
    if (bass->count("--ell") == 0) cfg.ell = 3;
    if (bass->count("--d") == 0) cfg.d = 2;
  });

  auto* endring = app.add_subcommand("endring", "maximal order isomorphic to End(E)");
  common(endring, true);
  endring->add_option("--method", cfg.method, "heuristic or enumerate")
      ->check(CLI::IsMember({"heuristic", "enumerate"}));
  endring->add_flag("--greedy", cfg.greedy, "accept the first structured vertex of a walk");
  endring->add_flag("--trace-walks", cfg.trace_walks, "include the walk records");

  auto* trace = app.add_subcommand("trace", "reduced trace of an endomorphism chain");
  common(trace, true);
  trace->add_option("--chain", cfg.chain_path, "chain JSON file")->required();

  auto* experiment = app.add_subcommand("experiment", "generation-frequency experiments");
  common(experiment, false);
  experiment->add_option("kind", cfg.experiment, "coprimality or quaternion")
      ->required()
      ->check(CLI::IsMember({"coprimality", "quaternion"}));
  experiment->add_option("--bits", cfg.bits, "bit sizes LO:HI");
  experiment->add_option("--trials", cfg.trials, "trials per bit size")->check(CLI::PositiveNumber);
  experiment->add_flag("--aggregate", cfg.aggregate, "print per-bit-size frequencies instead of trials");

  try {
    app.parse(argc, argv);
    cfg.command = app.get_subcommands().front()->get_name();
    std::string text = run(cfg);
    if (cfg.output_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(cfg.output_path);
      if (!(f << text)) {
        std::cerr << "error: cannot write " << cfg.output_path << "\n";
        return 2;
      }
    }
    return 0;
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
