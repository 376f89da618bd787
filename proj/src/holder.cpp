#include "infdoob/holder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "infdoob/errors.hpp"
#include "infdoob/simd.hpp"

namespace infdoob {
namespace {

// E_n(f^q)^{1/q} per leaf. Each atom is scaled by its maximum before
// powering, so large exponents do not underflow small positive values to 0.
Rv power_mean(const TreeSpace& space, const Rv& f, double q, int level) {
  const std::size_t b = space.block_size(level);
  Rv scale(std::vector<double>(f.size()));
  Rv powered(std::vector<double>(f.size()));
  for (std::size_t start = 0; start < f.size(); start += b) {
    double m = 0.0;
    for (std::size_t x = start; x < start + b; ++x) m = std::max(m, f[x]);
    for (std::size_t x = start; x < start + b; ++x) {
      scale[x] = m;
      powered[x] = m > 0.0 ? std::pow(f[x] / m, q) : 0.0;
    }
  }
  Rv out = cond_exp(space, powered, level);
  for (std::size_t x = 0; x < out.size(); ++x) {
    out[x] = scale[x] * std::pow(out[x], 1.0 / q);
  }
  return out;
}

}  // namespace

void check_alignment(const TreeSpace& space, const ExponentSequence& seq,
                     const FunctionVector& fvec) {
  if (fvec.active.size() != seq.head_size()) {
    throw PreconditionError("function vector has " +
                            std::to_string(fvec.active.size()) +
                            " active components, exponent head has " +
                            std::to_string(seq.head_size()));
  }
  for (const Rv& f : fvec.active) {
    if (f.size() != space.leaf_count()) {
      throw PreconditionError("component does not match the space");
    }
    for (double x : f.values) {
      if (!(x >= 0.0) || !std::isfinite(x)) {
        throw PreconditionError("components must be finite and nonnegative");
      }
    }
  }
  if (fvec.tail_mask && fvec.tail_mask->universe() != space.leaf_count()) {
    throw PreconditionError("mask does not match the space");
  }
}

FunctionVector FunctionVector::aligned(const TreeSpace& space,
                                       const ExponentSequence& seq,
                                       std::vector<Rv> active) {
  if (active.size() > seq.head_size()) {
    throw PreconditionError("more components than head exponents");
  }
  while (active.size() < seq.head_size()) {
    active.push_back(Rv::constant(space.leaf_count(), 1.0));
  }
  FunctionVector out{std::move(active), std::nullopt};
  check_alignment(space, seq, out);
  return out;
}

FunctionVector FunctionVector::ones(const TreeSpace& space,
                                    const ExponentSequence& seq) {
  return aligned(space, seq, {});
}

FunctionVector FunctionVector::masked(const LeafSet& q) const {
  FunctionVector out = *this;
  for (Rv& f : out.active) {
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!q.contains(i)) f[i] = 0.0;
    }
  }
  out.tail_mask = tail_mask ? (*tail_mask & q) : q;
  return out;
}

double lp_norm(const TreeSpace& space, const Rv& f, double p,
               const std::optional<Rv>& weight) {
  if (!(p > 0.0)) throw PreconditionError("L^p exponent must be positive");
  if (f.size() != space.leaf_count()) {
    throw PreconditionError("random variable does not match the space");
  }
  double m = 0.0;
  for (double x : f.values) m = std::max(m, std::abs(x));
  if (m == 0.0) return 0.0;
  // Scaled by the maximum so that large p cannot underflow every term.
  Rv powered(std::vector<double>(f.size()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    powered[i] = std::pow(std::abs(f[i]) / m, p);
  }
  if (weight) {
    if (weight->size() != f.size()) {
      throw PreconditionError("weight does not match the space");
    }
    for (double w : weight->values) {
      if (!(w > 0.0)) throw PreconditionError("weight must be positive");
    }
    simd::multiply(powered.values, weight->span());
  }
  return m * std::pow(space.integral(powered), 1.0 / p);
}

double tail_norm_factor(const TreeSpace& space, const ExponentSequence& seq,
                        const FunctionVector& fvec) {
  if (!fvec.tail_mask) return 1.0;
  return std::pow(space.measure(*fvec.tail_mask), seq.tail_mass());
}

Rv product_function(const TreeSpace& space, const FunctionVector& fvec,
                    const std::optional<LeafSet>& masked_by) {
  const FunctionVector& src = fvec;
  const FunctionVector work = masked_by ? src.masked(*masked_by) : src;
  Rv out = Rv::constant(space.leaf_count(), 1.0);
  for (const Rv& f : work.active) simd::multiply(out.values, f.span());
  if (work.tail_mask) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!work.tail_mask->contains(i)) out[i] = 0.0;
    }
  }
  return out;
}

VerificationReport holder_integral_check(const TreeSpace& space,
                                         const FunctionVector& fvec,
                                         const ExponentSequence& seq) {
  check_alignment(space, seq, fvec);
  const double p = seq.p();
  const double lhs = lp_norm(space, product_function(space, fvec), p);
  double rhs = tail_norm_factor(space, seq, fvec);
  for (std::size_t i = 0; i < fvec.size(); ++i) {
    rhs *= lp_norm(space, fvec.active[i], seq.head()[i]);
  }
  return make_report("holder_integral", lhs, rhs);
}

VerificationReport holder_conditional_check(const TreeSpace& space,
                                            const FunctionVector& fvec,
                                            const ExponentSequence& seq,
                                            int level) {
  check_alignment(space, seq, fvec);
  space.check_level(level);
  const double p = seq.p();

  const Rv lhs_rv = power_mean(space, product_function(space, fvec), p, level);

  Rv rhs_rv = Rv::constant(space.leaf_count(), 1.0);
  for (std::size_t i = 0; i < fvec.size(); ++i) {
    const Rv e = power_mean(space, fvec.active[i], seq.head()[i], level);
    simd::multiply(rhs_rv.values, e.span());
  }
  if (fvec.tail_mask) {
    // prod_k E_n(chi_Q)^{1/p_k} = E_n(chi_Q)^{s}
    const Rv eq = cond_exp(space, fvec.tail_mask->indicator(), level);
    for (std::size_t x = 0; x < eq.size(); ++x) {
      rhs_rv[x] *= std::pow(eq[x], seq.tail_mass());
    }
  }

  const std::size_t b = space.block_size(level);
  VerificationReport report;
  bool first = true;
  for (std::size_t start = 0; start < space.leaf_count(); start += b) {
    const auto atom =
        make_report("holder_conditional", lhs_rv[start], rhs_rv[start]);
    if (first) {
      report = atom;
      first = false;
    } else {
      merge_worst(report, atom);
    }
  }
  report.metrics["level"] = level;
  report.metrics["atoms_checked"] = static_cast<double>(space.atom_count(level));
  return report;
}

}  // namespace infdoob
