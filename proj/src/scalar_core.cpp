#include "infdoob/scalar_core.hpp"

#include <cmath>
#include <string>

#include "infdoob/errors.hpp"

namespace infdoob {

ProductValue product_eval(std::span<const double> head_factors,
                          double tail_constant) {
  if (!(tail_constant >= 0.0)) {
    throw PreconditionError("infinite product factors must be nonnegative");
  }
  if (tail_constant > 1.0) {
    throw DivergenceError("constant tail factor > 1: partial products diverge");
  }
  double finite = 1.0;
  for (double c : head_factors) {
    if (!(c >= 0.0)) {
      throw PreconditionError("infinite product factors must be nonnegative");
    }
    finite *= c;
  }
  return {finite, tail_constant < 1.0 ? ProductValue::TailClass::vanishes
                                      : ProductValue::TailClass::unit};
}

WeightedSequencePair::WeightedSequencePair(std::vector<double> head_weights,
                                           double tail_mass, double tail_ratio,
                                           std::vector<double> head_values,
                                           double tail_value)
    : head_weights_(std::move(head_weights)),
      tail_mass_(tail_mass),
      tail_ratio_(tail_ratio),
      head_values_(std::move(head_values)),
      tail_value_(tail_value) {
  if (head_weights_.size() != head_values_.size()) {
    throw PreconditionError("one value per head weight required");
  }
  double total = tail_mass_;
  for (double w : head_weights_) {
    if (!(w > 0.0 && w < 1.0)) {
      throw PreconditionError("weights must lie in (0, 1)");
    }
    total += w;
  }
  if (!(tail_mass_ >= 0.0) || !(tail_ratio_ > 0.0 && tail_ratio_ < 1.0)) {
    throw PreconditionError("tail needs mass >= 0 and ratio in (0, 1)");
  }
  if (tail_mass_ > 0.0 && !(tail_mass_ * (1.0 - tail_ratio_) < 1.0)) {
    throw PreconditionError("tail weights must lie in (0, 1)");
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw PreconditionError("weights must sum to 1, got " +
                            std::to_string(total));
  }
}

WeightedSequencePair WeightedSequencePair::with_values(
    std::vector<double> head_values, double tail_value) const {
  return {head_weights_, tail_mass_, tail_ratio_, std::move(head_values),
          tail_value};
}

VerificationReport exp_jensen_check(const WeightedSequencePair& pair) {
  double mean = 0.0;
  double mean_exp = 0.0;
  const auto w = pair.head_weights();
  const auto b = pair.head_values();
  for (std::size_t i = 0; i < w.size(); ++i) {
    mean += w[i] * b[i];
    mean_exp += w[i] * std::exp(b[i]);
  }
  if (pair.tail_mass() > 0.0) {
    mean += pair.tail_mass() * pair.tail_value();
    mean_exp += pair.tail_mass() * std::exp(pair.tail_value());
  }
  return make_report("exp_jensen", std::exp(mean), mean_exp);
}

VerificationReport weighted_am_gm(const WeightedSequencePair& pair) {
  const auto w = pair.head_weights();
  const auto a = pair.head_values();
  std::vector<double> powered(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] >= 0.0)) throw PreconditionError("a_i must be nonnegative");
    powered[i] = std::pow(a[i], w[i]);
    mean += w[i] * a[i];
  }
  const double c = pair.tail_value();
  if (!(c >= 0.0)) throw PreconditionError("a_i must be nonnegative");
  // prod_{tail} c^{lambda_k} = c^{sum_tail lambda_k}; pow(0, 0) == 1 covers
  // the finite family.
  const double lhs = product_eval(powered, 1.0).value() *
                     std::pow(c, pair.tail_mass());
  mean += pair.tail_mass() * c;
  return make_report("weighted_am_gm", lhs, mean);
}

VerificationReport young_check(const ExponentSequence& seq,
                               std::span<const double> head_values,
                               double tail_value) {
  if (std::abs(seq.aggregate_reciprocal() - 1.0) > 1e-12) {
    throw PreconditionError("Young's inequality needs sum 1/p_i == 1");
  }
  if (head_values.size() != seq.head_size()) {
    throw PreconditionError("one value per head exponent required");
  }
  if (!(tail_value >= 0.0)) throw PreconditionError("c_i must be nonnegative");
  if (seq.has_tail() && tail_value > 1.0) {
    throw PreconditionError(
        "tail constant > 1 makes sum c_i^{p_i}/p_i diverge");
  }
  double rhs = 0.0;
  const auto p = seq.head();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(head_values[i] >= 0.0)) {
      throw PreconditionError("c_i must be nonnegative");
    }
    rhs += std::pow(head_values[i], p[i]) / p[i];
  }
  double lhs = product_eval(head_values, 1.0).value();
  if (seq.has_tail()) {
    if (tail_value == 1.0) {
      rhs += seq.tail_mass();
    } else {
      lhs = 0.0;  // infinite product of a constant below 1
      if (tail_value > 0.0) {
        // Terms c^{p_k} t_k decrease; summing until they vanish relative to
        // the total leaves a nonnegative remainder, so rhs stays a lower
        // estimate of the true sum.
        double t = seq.tail_mass() * (1.0 - seq.tail_ratio());
        for (int k = 0; k < 4096; ++k) {
          const double term = std::pow(tail_value, 1.0 / t) * t;
          rhs += term;
          if (term <= 1e-18 * rhs || term == 0.0) break;
          t *= seq.tail_ratio();
        }
      }
    }
  }
  return make_report("young", lhs, rhs);
}

}  // namespace infdoob
