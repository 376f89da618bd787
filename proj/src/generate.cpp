#include "infdoob/generate.hpp"

#include <cmath>

#include "infdoob/errors.hpp"
#include "infdoob/random.hpp"

namespace infdoob {
namespace {

void check_params(const ExponentSequence& seq, const GenerateParams& params) {
  if (!(params.spread > 0.0) || !std::isfinite(params.spread)) {
    throw PreconditionError("spread must be positive and finite");
  }
  if (params.components > seq.head_size()) {
    throw PreconditionError("more components than head exponents");
  }
}

// Values drawn between 1/spread and spread whichever way round they lie.
std::vector<Rv> draw(const TreeSpace& space, const GenerateParams& params,
                     std::size_t count, std::uint64_t index) {
  const double a = 1.0 / params.spread;
  const double b = params.spread;
  auto rng = trial_rng(params.seed, index);
  std::vector<Rv> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(random_rv(space.leaf_count(), rng, std::min(a, b),
                            std::max(a, b)));
  }
  return out;
}

std::size_t drawn_leaf(const TreeSpace& space, const GenerateParams& params) {
  auto rng = trial_rng(params.seed, 1);
  return static_cast<std::size_t>(uniform01(rng) *
                                  static_cast<double>(space.leaf_count()));
}

}  // namespace

GenerateKind parse_generate_kind(const std::string& kind) {
  if (kind == "weights") return GenerateKind::weights;
  if (kind == "functions") return GenerateKind::functions;
  throw PreconditionError("unknown generate kind: " + kind);
}

std::string to_string(GenerateKind kind) {
  return kind == GenerateKind::weights ? "weights" : "functions";
}

WeightSystem generate_weights(const TreeSpace& space,
                              const ExponentSequence& seq,
                              const GenerateParams& params,
                              std::uint64_t index) {
  check_params(seq, params);
  const std::size_t leaves = space.leaf_count();
  std::vector<Rv> all;
  if (index == 0) {
    all.assign(params.components + 1, Rv::constant(leaves, 1.0));
  } else if (index == 1) {
    const std::size_t leaf = drawn_leaf(space, params);
    Rv peaked = Rv::constant(leaves, 1.0);
    peaked[leaf] = params.spread;
    all.assign(params.components + 1, peaked);
  } else {
    all = draw(space, params, params.components + 1, index);
  }
  Rv v = std::move(all.back());
  all.pop_back();
  return WeightSystem(space, seq, std::move(all), std::move(v));
}

FunctionVector generate_functions(const TreeSpace& space,
                                  const ExponentSequence& seq,
                                  const GenerateParams& params,
                                  std::uint64_t index) {
  check_params(seq, params);
  const std::size_t leaves = space.leaf_count();
  std::vector<Rv> active;
  if (index == 0) {
    active.assign(params.components, Rv::constant(leaves, 1.0));
  } else if (index == 1) {
    Rv ind = Rv::constant(leaves, 0.0);
    ind[drawn_leaf(space, params)] = 1.0;
    active.assign(params.components, ind);
  } else {
    active = draw(space, params, params.components, index);
  }
  return FunctionVector::aligned(space, seq, std::move(active));
}

}  // namespace infdoob
