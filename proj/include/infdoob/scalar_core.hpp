#pragma once

#include <span>
#include <vector>

#include "infdoob/exponents.hpp"
#include "infdoob/report.hpp"

namespace infdoob {

// Limit of the partial products of c_1 c_2 ... for nonnegative factors whose
// tail is a single constant c <= 1: the tail contributes 0 when c < 1 and 1
// when c == 1.
class ProductValue {
 public:
  enum class TailClass { vanishes, unit };

  ProductValue(double finite_part, TailClass tail)
      : finite_part_(finite_part), tail_(tail) {}

  double finite_part() const { return finite_part_; }
  TailClass tail_class() const { return tail_; }
  double value() const {
    return tail_ == TailClass::vanishes ? 0.0 : finite_part_;
  }

 private:
  double finite_part_;
  TailClass tail_;
};

// Throws DivergenceError when tail_constant > 1 and PreconditionError on
// negative factors.
ProductValue product_eval(std::span<const double> head_factors,
                          double tail_constant);

// Weights lambda_i in (0, 1) with sum 1 (head + geometric tail of mass s, the
// same scheme as exponent reciprocals) paired with values that are explicit
// on the head and constant on the tail.
class WeightedSequencePair {
 public:
  WeightedSequencePair(std::vector<double> head_weights, double tail_mass,
                       double tail_ratio, std::vector<double> head_values,
                       double tail_value);

  std::span<const double> head_weights() const { return head_weights_; }
  std::span<const double> head_values() const { return head_values_; }
  double tail_mass() const { return tail_mass_; }
  double tail_ratio() const { return tail_ratio_; }
  double tail_value() const { return tail_value_; }

  // Same weights, new values.
  WeightedSequencePair with_values(std::vector<double> head_values,
                                   double tail_value) const;

 private:
  std::vector<double> head_weights_;
  double tail_mass_;
  double tail_ratio_;
  std::vector<double> head_values_;
  double tail_value_;
};

// exp(sum lambda_i b_i) <= sum lambda_i exp(b_i), values read as b_i.
VerificationReport exp_jensen_check(const WeightedSequencePair& pair);

// prod a_i^{lambda_i} <= sum lambda_i a_i, values read as a_i >= 0.
VerificationReport weighted_am_gm(const WeightedSequencePair& pair);

// prod c_i <= sum c_i^{p_i} / p_i for a family with sum 1/p_i == 1.
// A tail constant above 1 makes the right side diverge and is rejected.
VerificationReport young_check(const ExponentSequence& seq,
                               std::span<const double> head_values,
                               double tail_value);

}  // namespace infdoob
