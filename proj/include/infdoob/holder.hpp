#pragma once

#include <optional>
#include <vector>

#include "infdoob/exponents.hpp"
#include "infdoob/filtration.hpp"
#include "infdoob/report.hpp"

namespace infdoob {

// Components f_1, f_2, ... aligned with an ExponentSequence: the first m are
// explicit nonnegative random variables, every later one is the constant 1,
// or the indicator chi_Q once the vector has been masked by Q.
struct FunctionVector {
  std::vector<Rv> active;
  std::optional<LeafSet> tail_mask;

  // Pads `active` with constant-1 components up to the head length of seq.
  // Throws PreconditionError on negative entries, size mismatches, or more
  // components than head exponents.
  static FunctionVector aligned(const TreeSpace& space,
                                const ExponentSequence& seq,
                                std::vector<Rv> active);
  static FunctionVector ones(const TreeSpace& space,
                             const ExponentSequence& seq);

  // Every component (tail included) multiplied by chi_Q.
  FunctionVector masked(const LeafSet& q) const;
  std::size_t size() const { return active.size(); }
};

// Validates that fvec can be paired with seq on space.
void check_alignment(const TreeSpace& space, const ExponentSequence& seq,
                     const FunctionVector& fvec);

// (sum mu w |f|^p)^{1/p}; weight == nullopt means w == 1.
double lp_norm(const TreeSpace& space, const Rv& f, double p,
               const std::optional<Rv>& weight = std::nullopt);

// Product over the tail components' L^{p_k}(1) norms: 1 unmasked,
// |Q|^{s} when masked by Q.
double tail_norm_factor(const TreeSpace& space, const ExponentSequence& seq,
                        const FunctionVector& fvec);

// Pointwise infinite product; with a mask Q the tail factor at x is chi_Q(x).
Rv product_function(const TreeSpace& space, const FunctionVector& fvec,
                    const std::optional<LeafSet>& masked_by = std::nullopt);

// ||prod f_i||_{L^p} <= prod ||f_i||_{L^{p_i}}.
VerificationReport holder_integral_check(const TreeSpace& space,
                                         const FunctionVector& fvec,
                                         const ExponentSequence& seq);

// On every level-n atom: E_n(prod f_i^p)^{1/p} <= prod E_n(f_i^{p_i})^{1/p_i}.
// The report carries the atom with the least slack.
VerificationReport holder_conditional_check(const TreeSpace& space,
                                            const FunctionVector& fvec,
                                            const ExponentSequence& seq,
                                            int level);

}  // namespace infdoob
