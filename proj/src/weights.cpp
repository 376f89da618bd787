#include "infdoob/weights.hpp"

#include <algorithm>
#include <cmath>

#include "infdoob/errors.hpp"
#include "infdoob/maximal.hpp"
#include "infdoob/simd.hpp"

namespace infdoob {
namespace {

void check_weight(const TreeSpace& space, const Rv& w, const char* what) {
  if (w.size() != space.leaf_count()) {
    throw PreconditionError(std::string(what) + " does not match the space");
  }
  for (double x : w.values) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw PreconditionError(std::string(what) +
                              " must be finite and positive");
    }
  }
}

// (sum_F mu h) / (sum_F mu) with both sums in the same order.
double average_over(const TreeSpace& space, const LeafSet& f, const Rv& h) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t x = 0; x < space.leaf_count(); ++x) {
    if (!f.contains(x)) continue;
    num += space.prob(x) * h[x];
    den += space.prob(x);
  }
  return num / den;
}

Rv weighted_geometric_mean(const WeightSystem& ws) {
  // prod_i sigma_i^{p/p_i}; tail sigmas are 1.
  const double p = ws.p();
  Rv out = Rv::constant(ws.space().leaf_count(), 1.0);
  for (std::size_t i = 0; i < ws.sigmas().size(); ++i) {
    const double a = p / ws.seq().head()[i];
    for (std::size_t x = 0; x < out.size(); ++x) {
      out[x] *= std::pow(ws.sigmas()[i][x], a);
    }
  }
  return out;
}

template <typename Ratio>
ConstantEstimate family_max(const WeightSystem& ws,
                            const StoppingFamily& family, Ratio ratio) {
  ConstantEstimate est;
  est.lower_bound = !family.exhaustive();
  est.family_size = for_each_in_family(
      ws.space(), family, [&](const StoppingTime& tau) {
        const LeafSet f = tau.finite_set();
        if (f.empty()) {
          ++est.skipped_empty;
          return;
        }
        est.value = std::max(est.value, ratio(f));
      });
  return est;
}

}  // namespace

WeightSystem::WeightSystem(TreeSpace space, ExponentSequence seq,
                           std::vector<Rv> omegas, Rv v)
    : space_(std::move(space)),
      seq_(std::move(seq)),
      omegas_(std::move(omegas)),
      v_(std::move(v)) {
  if (omegas_.size() > seq_.head_size()) {
    throw PreconditionError("more weights than head exponents");
  }
  while (omegas_.size() < seq_.head_size()) {
    omegas_.push_back(Rv::constant(space_.leaf_count(), 1.0));
  }
  for (const Rv& w : omegas_) check_weight(space_, w, "omega");
  check_weight(space_, v_, "v");
  sigmas_.reserve(omegas_.size());
  for (std::size_t i = 0; i < omegas_.size(); ++i) {
    const double e = -1.0 / (seq_.head()[i] - 1.0);
    Rv s = omegas_[i];
    for (double& x : s.values) x = std::pow(x, e);
    sigmas_.push_back(std::move(s));
  }
}

WeightSystem WeightSystem::unit(TreeSpace space, ExponentSequence seq) {
  Rv v = Rv::constant(space.leaf_count(), 1.0);
  return WeightSystem(std::move(space), std::move(seq), {}, std::move(v));
}

WeightSystem WeightSystem::with_scaled_v(double c) const {
  Rv v = v_;
  for (double& x : v.values) x *= c;
  return WeightSystem(space_, seq_, omegas_, std::move(v));
}

double ap_constant(const WeightSystem& ws) {
  const TreeSpace& space = ws.space();
  const double inv_p = ws.seq().aggregate_reciprocal();
  double best = 0.0;
  for (int n = 0; n <= space.depth(); ++n) {
    const Rv ev = cond_exp(space, ws.v(), n);
    Rv value(std::vector<double>(space.leaf_count()));
    for (std::size_t x = 0; x < value.size(); ++x) {
      value[x] = std::pow(ev[x], inv_p);
    }
    for (std::size_t i = 0; i < ws.sigmas().size(); ++i) {
      const double inv_conj = 1.0 - 1.0 / ws.seq().head()[i];
      const Rv es = cond_exp(space, ws.sigmas()[i], n);
      for (std::size_t x = 0; x < value.size(); ++x) {
        value[x] *= std::pow(es[x], inv_conj);
      }
    }
    for (double x : value.values) best = std::max(best, x);
  }
  return best;
}

RhSides rh_sides(const WeightSystem& ws, const LeafSet& f) {
  const TreeSpace& space = ws.space();
  const double p = ws.p();
  RhSides s;
  const double mass = space.measure(f);
  s.lhs = std::pow(mass, p * ws.seq().tail_mass());
  for (std::size_t i = 0; i < ws.sigmas().size(); ++i) {
    s.lhs *= std::pow(weighted_measure(space, f, ws.sigmas()[i]),
                      p / ws.seq().head()[i]);
  }
  const Rv geo = weighted_geometric_mean(ws);
  for (std::size_t x = 0; x < space.leaf_count(); ++x) {
    if (f.contains(x)) s.rhs += space.prob(x) * geo[x];
  }
  return s;
}

double rh_ratio(const WeightSystem& ws, const LeafSet& f) {
  const double p = ws.p();
  double lhs = 1.0;
  for (std::size_t i = 0; i < ws.sigmas().size(); ++i) {
    lhs *= std::pow(average_over(ws.space(), f, ws.sigmas()[i]),
                    p / ws.seq().head()[i]);
  }
  return lhs / average_over(ws.space(), f, weighted_geometric_mean(ws));
}

ConstantEstimate rh_constant(const WeightSystem& ws,
                             const StoppingFamily& family) {
  return family_max(ws, family,
                    [&](const LeafSet& f) { return rh_ratio(ws, f); });
}

namespace {

Rv masked_sigma_maximal(const WeightSystem& ws, const LeafSet& f) {
  const FunctionVector sig{ws.sigmas(), std::nullopt};
  return gen_doob_maximal(ws.space(), sig, ws.seq(), f);
}

}  // namespace

SpSides sp_sides(const WeightSystem& ws, const LeafSet& f) {
  const TreeSpace& space = ws.space();
  const double p = ws.p();
  const Rv m = masked_sigma_maximal(ws, f);
  double integral = 0.0;
  for (std::size_t x = 0; x < space.leaf_count(); ++x) {
    if (f.contains(x)) integral += space.prob(x) * std::pow(m[x], p) * ws.v()[x];
  }
  SpSides s;
  s.lhs = std::pow(integral, 1.0 / p);
  s.rhs = std::pow(space.measure(f), ws.seq().tail_mass());
  for (std::size_t i = 0; i < ws.sigmas().size(); ++i) {
    s.rhs *= std::pow(weighted_measure(space, f, ws.sigmas()[i]),
                      1.0 / ws.seq().head()[i]);
  }
  return s;
}

double sp_ratio(const WeightSystem& ws, const LeafSet& f) {
  const double p = ws.p();
  const Rv m = masked_sigma_maximal(ws, f);
  Rv integrand(std::vector<double>(m.size()));
  for (std::size_t x = 0; x < m.size(); ++x) {
    integrand[x] = std::pow(m[x], p) * ws.v()[x];
  }
  double rhs = 1.0;
  for (std::size_t i = 0; i < ws.sigmas().size(); ++i) {
    rhs *= std::pow(average_over(ws.space(), f, ws.sigmas()[i]),
                    1.0 / ws.seq().head()[i]);
  }
  return std::pow(average_over(ws.space(), f, integrand), 1.0 / p) / rhs;
}

ConstantEstimate sp_constant(const WeightSystem& ws,
                             const StoppingFamily& family) {
  return family_max(ws, family,
                    [&](const LeafSet& f) { return sp_ratio(ws, f); });
}

FunctionVector necessity_family_ap(const WeightSystem& ws, int level,
                                   const LeafSet& b) {
  if (!ws.space().is_measurable(b, level)) {
    throw PreconditionError("B must be a union of level-n atoms");
  }
  return FunctionVector{ws.sigmas(), std::nullopt}.masked(b);
}

}  // namespace infdoob
