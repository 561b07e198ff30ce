#pragma once

#include <json.hpp>
#include <string>

#include "endring/pipeline.hpp"

namespace endring {

using json = nlohmann::ordered_json;

json to_json(const Fp2& x);  // ["a", "b"]: a + b s
json to_json(const Curve& E);
json to_json(const Poly<Fp2>& f);
json to_json(const IsogenyStep& s);
json to_json(const IsogenyChain& c);
json to_json(const WalkRecord& w);
json to_json(const GramMatrix& G);
json to_json(const QuatOrder& O);  // {a, b, basis}
json to_json(const InseparableReflection& r, bool selfcheck, bool trace_walks);
json to_json(const BassResult& b, bool trace_walks);
json to_json(const EndRingResult& r, bool trace_walks);

// Inverses for the CLI inputs; malformed input throws DomainError BadInput,
// chains whose declared endpoints disagree with the steps throw BadChain.
Fp2 fp2_from_json(const json& j, const Field* F);
Curve curve_from_json(const json& j, const Field* F);
IsogenyChain chain_from_json(const json& j, const Field* F);

// Per-trial rows (with a '#' header comment when `box` is set) and aggregates.
std::string trials_csv(const ExperimentResult& r);
std::string aggregate_csv(const ExperimentResult& r);

}  // namespace endring
