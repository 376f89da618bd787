#include "infdoob/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "infdoob/errors.hpp"
#include "infdoob/simd.hpp"

namespace infdoob {
namespace {

void check_positive(const TreeSpace& space, const Rv& w) {
  if (w.size() != space.leaf_count()) {
    throw PreconditionError("weight does not match the space");
  }
  for (double x : w.values) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw PreconditionError("weights must be finite and positive");
    }
  }
}

// Zeroes prod on atoms of `level` not contained in the mask.
void apply_tail_mask(const TreeSpace& space, const LeafSet& mask, int level,
                     Rv& prod) {
  const auto inside = space.atoms_inside(mask, level);
  const std::size_t b = space.block_size(level);
  for (std::size_t x = 0; x < prod.size(); ++x) {
    if (!inside[x / b]) prod[x] = 0.0;
  }
}

}  // namespace

Rv doob_maximal(const TreeSpace& space, const Rv& f) {
  Rv out = Rv::constant(space.leaf_count(), 0.0);
  for (int n = 0; n <= space.depth(); ++n) {
    Rv e = cond_exp(space, f, n);
    for (double& x : e.values) x = std::abs(x);
    simd::maximum(out.values, e.span());
  }
  return out;
}

std::vector<Rv> level_products(const TreeSpace& space,
                               const FunctionVector& fvec,
                               const ExponentSequence& seq) {
  std::vector<Rv> out;
  out.reserve(space.depth() + 1);
  for (int n = 0; n <= space.depth(); ++n) {
    Rv prod = Rv::constant(space.leaf_count(), 1.0);
    for (const Rv& f : fvec.active) {
      simd::multiply(prod.values, cond_exp(space, f, n).span());
    }
    if (fvec.tail_mask && seq.has_tail()) {
      apply_tail_mask(space, *fvec.tail_mask, n, prod);
    }
    out.push_back(std::move(prod));
  }
  return out;
}

std::vector<Rv> weighted_level_products(const TreeSpace& space,
                                        const FunctionVector& gvec,
                                        const std::vector<Rv>& sigmas,
                                        const ExponentSequence& seq) {
  if (sigmas.size() != gvec.active.size()) {
    throw PreconditionError("one sigma per active component required");
  }
  for (const Rv& s : sigmas) check_positive(space, s);
  std::vector<Rv> out;
  out.reserve(space.depth() + 1);
  for (int n = 0; n <= space.depth(); ++n) {
    Rv prod = Rv::constant(space.leaf_count(), 1.0);
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
      simd::multiply(prod.values,
                     cond_exp_weighted(space, gvec.active[i], sigmas[i], n)
                         .span());
    }
    if (gvec.tail_mask && seq.has_tail()) {
      apply_tail_mask(space, *gvec.tail_mask, n, prod);
    }
    out.push_back(std::move(prod));
  }
  return out;
}

StoppingTime level_set_stopping_time(const TreeSpace& space,
                                     const FunctionVector& fvec,
                                     const ExponentSequence& seq,
                                     double lambda) {
  check_alignment(space, seq, fvec);
  const auto products = level_products(space, fvec, seq);
  return first_exceedance(products, lambda);
}

Rv sup_over_levels(std::span<const Rv> per_level) {
  Rv out = per_level.front();
  for (std::size_t n = 1; n < per_level.size(); ++n) {
    simd::maximum(out.values, per_level[n].span());
  }
  return out;
}

Rv gen_doob_maximal(const TreeSpace& space, const FunctionVector& fvec,
                    const ExponentSequence& seq,
                    const std::optional<LeafSet>& masked_by) {
  check_alignment(space, seq, fvec);
  if (masked_by) {
    return sup_over_levels(level_products(space, fvec.masked(*masked_by), seq));
  }
  return sup_over_levels(level_products(space, fvec, seq));
}

Rv gen_weighted_maximal(const TreeSpace& space, const FunctionVector& gvec,
                        const std::vector<Rv>& sigmas,
                        const ExponentSequence& seq) {
  check_alignment(space, seq, gvec);
  return sup_over_levels(weighted_level_products(space, gvec, sigmas, seq));
}

double weighted_measure(const TreeSpace& space, const LeafSet& b,
                        const Rv& weight) {
  check_positive(space, weight);
  double m = 0.0;
  for (std::size_t i = 0; i < space.leaf_count(); ++i) {
    if (b.contains(i)) m += space.prob(i) * weight[i];
  }
  return m;
}

double weak_lp_norm(const TreeSpace& space, const Rv& g, double p,
                    const Rv& v) {
  if (!(p > 0.0)) throw PreconditionError("weak L^p exponent must be positive");
  check_positive(space, v);
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return g[a] > g[b]; });
  double best = 0.0;
  double mass = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t x = order[k];
    if (!(g[x] >= 0.0)) throw PreconditionError("g must be nonnegative");
    mass += space.prob(x) * v[x];
    // Only evaluate once all leaves sharing this value are accumulated.
    if (k + 1 < order.size() && g[order[k + 1]] == g[x]) continue;
    best = std::max(best, g[x] * std::pow(mass, 1.0 / p));
  }
  return best;
}

VerificationReport doob_inequality_check(const TreeSpace& space, const Rv& g,
                                         double q, const Rv& sigma) {
  if (!(q > 1.0)) throw PreconditionError("Doob's inequality needs q > 1");
  check_positive(space, sigma);
  Rv sup = Rv::constant(space.leaf_count(), 0.0);
  for (int n = 0; n <= space.depth(); ++n) {
    simd::maximum(sup.values, cond_exp_weighted(space, g, sigma, n).span());
  }
  const double lhs = lp_norm(space, sup, q, sigma);
  const double rhs = lp_norm(space, g, q, sigma);
  return make_report("doob", lhs, rhs, q / (q - 1.0));
}

}  // namespace infdoob
