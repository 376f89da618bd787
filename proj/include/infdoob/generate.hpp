#pragma once

#include <cstdint>
#include <string>

#include "infdoob/exponents.hpp"
#include "infdoob/filtration.hpp"
#include "infdoob/holder.hpp"
#include "infdoob/weights.hpp"

namespace infdoob {

enum class GenerateKind { weights, functions };
GenerateKind parse_generate_kind(const std::string& kind);
std::string to_string(GenerateKind kind);

// Seeded instances with log-uniform leaf values in [1/spread, spread].
// Instance 0 is constant, instance 1 is supported on (weights: peaked at) a
// single leaf atom; later instances draw from the stream (seed, index).
// `components` explicit entries are produced, the rest of the head is 1.
struct GenerateParams {
  std::uint64_t seed = 0;
  double spread = 10.0;
  std::size_t components = 1;
};

WeightSystem generate_weights(const TreeSpace& space,
                              const ExponentSequence& seq,
                              const GenerateParams& params, std::uint64_t index);

FunctionVector generate_functions(const TreeSpace& space,
                                  const ExponentSequence& seq,
                                  const GenerateParams& params,
                                  std::uint64_t index);

}  // namespace infdoob
