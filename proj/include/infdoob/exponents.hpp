#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace infdoob {

// Closed interval known to contain an exact quantity.
struct CertifiedInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
  double width() const { return hi - lo; }
  double relative_width() const;
};

CertifiedInterval operator*(const CertifiedInterval& a,
                            const CertifiedInterval& b);

// An infinite family of exponents p_1, p_2, ... with sum of reciprocals 1/p,
// stored as an explicit head p_1..p_m plus a geometric tail:
//
//   1/p_{m+k} = s (1 - r) r^{k-1},  k >= 1,
//
// so that the tail carries reciprocal mass s. s == 0 is the finite family.
class ExponentSequence {
 public:
  // Throws PreconditionError on head exponents outside (1, inf), a tail
  // ratio outside (0, 1), a first tail exponent <= 1, or zero total mass.
  ExponentSequence(std::vector<double> head, double tail_mass,
                   double tail_ratio = 0.5);

  std::span<const double> head() const { return head_; }
  std::size_t head_size() const { return head_.size(); }
  double tail_mass() const { return tail_mass_; }
  double tail_ratio() const { return tail_ratio_; }
  bool has_tail() const { return tail_mass_ > 0.0; }

  // 1/p = sum of all reciprocals, in closed form.
  double aggregate_reciprocal() const { return aggregate_reciprocal_; }
  double p() const { return 1.0 / aggregate_reciprocal_; }
  double head_reciprocal_sum() const { return head_reciprocal_sum_; }

  // 1-based. Throws PreconditionError for i == 0 or i > m when s == 0.
  double exponent_at(std::size_t i) const;
  double reciprocal_at(std::size_t i) const;
  double conjugate_at(std::size_t i) const;

 private:
  void check_index(std::size_t i) const;

  std::vector<double> head_;
  double tail_mass_;
  double tail_ratio_;
  double head_reciprocal_sum_;
  double aggregate_reciprocal_;
};

inline constexpr double kDefaultProductTol = 1e-9;

// Certified enclosure of prod_{i>=1} p'_i. The head is summed in log space,
// a tail prefix numerically, and the remainder bracketed by
//   sum t_k <= sum -ln(1 - t_k) <= sum t_k / (1 - t_first).
// Throws PreconditionError if rel_tol <= 0 or is below what double
// precision can certify (about 1e-13).
CertifiedInterval conjugate_product(const ExponentSequence& seq,
                                   double rel_tol = kDefaultProductTol);

// 3^n / (v_n (n/2)^{n/2}) with v_n the volume of the unit ball in R^n.
double xi_constant(int n);

// Enclosure of xi_n^{1/p} * prod p'_i.
CertifiedInterval hl_bound_constant(const ExponentSequence& seq, int n,
                                    double rel_tol = kDefaultProductTol);

}  // namespace infdoob
