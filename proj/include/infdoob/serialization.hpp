#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "infdoob/exponents.hpp"
#include "infdoob/filtration.hpp"
#include "infdoob/holder.hpp"
#include "infdoob/report.hpp"
#include "infdoob/theorems.hpp"
#include "infdoob/weights.hpp"

namespace infdoob {

using Json = nlohmann::json;

// Parsers throw PreconditionError with a path-like hint on malformed input.

// {"head":[...], "tail_mass":s, "tail_ratio":r}; tail fields optional.
ExponentSequence sequence_from_json(const Json& j);
Json to_json(const ExponentSequence& seq);

// {"depth":N, "branching":r, "leaf_probs":[...] | "uniform"}.
TreeSpace space_from_json(const Json& j);
Json to_json(const TreeSpace& space);

// {"values":[0, 2, "inf", ...]}.
StoppingTime stopping_time_from_json(const Json& j);
Json to_json(const StoppingTime& tau);

// {"space":..., "seq":..., "weights":[[...], ...], "v":[...]}.
WeightSystem weight_system_from_json(const Json& j);
Json to_json(const WeightSystem& ws);

// {"functions":[[...], ...], "mask":[leaf indices]}; mask optional.
FunctionVector function_vector_from_json(const TreeSpace& space,
                                         const ExponentSequence& seq,
                                         const Json& j);
Json to_json(const FunctionVector& f);

Json to_json(const LeafSet& s);  // sorted leaf indices
Json to_json(const CertifiedInterval& iv);
Json to_json(const ConstantEstimate& est);
Json to_json(const VerificationReport& report);
Json to_json(const SawyerTrace& trace);

// Finite numbers as JSON numbers, otherwise "inf", "-inf" or "nan".
Json number(double x);

// FNV-1a digest of the canonical space JSON, as 16 hex digits.
std::string space_digest(const TreeSpace& space);

// One row per report: id,lhs,rhs,constant,slack,tolerance,pass.
std::string reports_csv(const std::vector<VerificationReport>& reports);

}  // namespace infdoob
