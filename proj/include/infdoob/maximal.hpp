#pragma once

#include <optional>
#include <vector>

#include "infdoob/exponents.hpp"
#include "infdoob/filtration.hpp"
#include "infdoob/holder.hpp"
#include "infdoob/report.hpp"

namespace infdoob {

// Mf = max_n |E_n(f)|.
Rv doob_maximal(const TreeSpace& space, const Rv& f);

// Per level n, the product over all components of E_n(f_i), with infinite-
// product semantics for the tail: the tail factor E_n(1) = 1, or E_n(chi_Q)
// when masked, which is 1 on atoms inside Q and vanishes (a constant factor
// below 1 repeated infinitely often) on every other atom. A finite family
// (no tail) has no such factor, so the mask then acts through the active
// components only.
std::vector<Rv> level_products(const TreeSpace& space,
                               const FunctionVector& fvec,
                               const ExponentSequence& seq);

// Weighted variant: E_n^{sigma_i}(g_i) for the head, sigma == 1 on the tail.
std::vector<Rv> weighted_level_products(const TreeSpace& space,
                                        const FunctionVector& gvec,
                                        const std::vector<Rv>& sigmas,
                                        const ExponentSequence& seq);

// tau = inf{n : prod_i E_n(f_i) > lambda}; adapted by construction.
StoppingTime level_set_stopping_time(const TreeSpace& space,
                                     const FunctionVector& fvec,
                                     const ExponentSequence& seq,
                                     double lambda);

// Pointwise max over levels of level products.
Rv sup_over_levels(std::span<const Rv> per_level);

// The generalized Doob maximal operator sup_n prod_i E_n(f_i).
Rv gen_doob_maximal(const TreeSpace& space, const FunctionVector& fvec,
                    const ExponentSequence& seq,
                    const std::optional<LeafSet>& masked_by = std::nullopt);

// sup_n prod_i E_n^{sigma_i}(g_i). Throws PreconditionError on nonpositive
// sigma or misaligned inputs.
Rv gen_weighted_maximal(const TreeSpace& space, const FunctionVector& gvec,
                        const std::vector<Rv>& sigmas,
                        const ExponentSequence& seq);

// |B|_w = sum_{leaf in B} mu w.
double weighted_measure(const TreeSpace& space, const LeafSet& b,
                        const Rv& weight);

// sup_lambda lambda |{g > lambda}|_v^{1/p}, evaluated exactly as
// max over values t of g of t |{g >= t}|_v^{1/p}.
double weak_lp_norm(const TreeSpace& space, const Rv& g, double p,
                    const Rv& v);

// ||sup_n E_n^sigma(g)||_{L^q(sigma)} <= q' ||g||_{L^q(sigma)}.
VerificationReport doob_inequality_check(const TreeSpace& space, const Rv& g,
                                         double q, const Rv& sigma);

}  // namespace infdoob
