#include "infdoob/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "infdoob/errors.hpp"

namespace infdoob {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxTailTerms = 1 << 16;

double next_down(double x) { return std::nextafter(x, -HUGE_VAL); }
double next_up(double x) { return std::nextafter(x, HUGE_VAL); }

// Rounding error of s = fl(a + b) (Knuth's TwoSum); zero iff s is exact.
double two_sum_error(double a, double b, double s) {
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}

}  // namespace

double CertifiedInterval::relative_width() const {
  if (hi == 0.0) return 0.0;
  return (hi - lo) / std::abs(hi);
}

CertifiedInterval operator*(const CertifiedInterval& a,
                            const CertifiedInterval& b) {
  // Both operands are nonnegative everywhere they are used.
  return {next_down(a.lo * b.lo), next_up(a.hi * b.hi)};
}

ExponentSequence::ExponentSequence(std::vector<double> head, double tail_mass,
                                   double tail_ratio)
    : head_(std::move(head)), tail_mass_(tail_mass), tail_ratio_(tail_ratio) {
  head_reciprocal_sum_ = 0.0;
  for (std::size_t i = 0; i < head_.size(); ++i) {
    const double pi = head_[i];
    if (!(pi > 1.0) || !std::isfinite(pi)) {
      throw PreconditionError("exponent p_" + std::to_string(i + 1) +
                              " must lie in (1, inf)");
    }
    head_reciprocal_sum_ += 1.0 / pi;
  }
  if (!(tail_mass_ >= 0.0) || !std::isfinite(tail_mass_)) {
    throw PreconditionError("tail_mass must be finite and >= 0");
  }
  if (!(tail_ratio_ > 0.0 && tail_ratio_ < 1.0)) {
    throw PreconditionError("tail_ratio must lie in (0, 1)");
  }
  if (tail_mass_ > 0.0 && !(tail_mass_ * (1.0 - tail_ratio_) < 1.0)) {
    throw PreconditionError("first tail exponent must exceed 1");
  }
  aggregate_reciprocal_ = head_reciprocal_sum_ + tail_mass_;
  if (!(aggregate_reciprocal_ > 0.0)) {
    throw PreconditionError("sum of reciprocal exponents must be positive");
  }
}

void ExponentSequence::check_index(std::size_t i) const {
  if (i == 0) throw PreconditionError("exponent indices start at 1");
  if (!has_tail() && i > head_.size()) {
    throw PreconditionError("index " + std::to_string(i) +
                            " beyond a finite exponent family of size " +
                            std::to_string(head_.size()));
  }
}

double ExponentSequence::reciprocal_at(std::size_t i) const {
  check_index(i);
  if (i <= head_.size()) return 1.0 / head_[i - 1];
  const double k = static_cast<double>(i - head_.size());
  return tail_mass_ * (1.0 - tail_ratio_) * std::pow(tail_ratio_, k - 1.0);
}

double ExponentSequence::exponent_at(std::size_t i) const {
  check_index(i);
  if (i <= head_.size()) return head_[i - 1];
  return 1.0 / reciprocal_at(i);
}

double ExponentSequence::conjugate_at(std::size_t i) const {
  // p' = 1 / (1 - 1/p); reciprocal form stays accurate far into the tail.
  return 1.0 / (1.0 - reciprocal_at(i));
}

CertifiedInterval conjugate_product(const ExponentSequence& seq,
                                    double rel_tol) {
  if (!(rel_tol > 0.0)) throw PreconditionError("rel_tol must be positive");

  // Head: direct product of p/(p-1), tracking whether every operation was
  // exact (error-free transformations) so exact products stay points.
  double head_value = 1.0;
  int inexact_ops = 0;
  for (double pi : seq.head()) {
    const double d = pi - 1.0;
    if (two_sum_error(pi, -1.0, d) != 0.0) ++inexact_ops;
    const double q = pi / d;
    if (std::fma(q, d, -pi) != 0.0) ++inexact_ops;
    const double prod = head_value * q;
    if (std::fma(head_value, q, -prod) != 0.0) ++inexact_ops;
    head_value = prod;
  }
  const double head_pad = 2.0 * kEps * inexact_ops * head_value;
  const CertifiedInterval head_part{
      inexact_ops == 0 ? head_value : next_down(head_value - head_pad),
      inexact_ops == 0 ? head_value : next_up(head_value + head_pad)};
  if (!seq.has_tail()) {
    if (head_part.relative_width() > rel_tol) {
      throw PreconditionError("rel_tol is tighter than double precision can "
                              "certify");
    }
    return head_part;
  }

  // Tail: ln p'_{m+k} = -log1p(-t_k); prefix summed, remainder bracketed.
  const double s = seq.tail_mass();
  const double r = seq.tail_ratio();
  double log_sum = 0.0;
  int terms = 0;
  double t = s * (1.0 - r);  // t_1
  double mass_left = s;      // sum_{j >= k} t_j = s r^{k-1}
  double rem_lo = 0.0;
  double rem_hi = 0.0;
  for (int k = 0;; ++k) {
    rem_lo = mass_left;
    rem_hi = mass_left / (1.0 - t);
    if (rem_hi - rem_lo <= 0.25 * rel_tol || k >= kMaxTailTerms) break;
    log_sum += -std::log1p(-t);
    ++terms;
    mass_left *= r;
    t *= r;
  }
  // Rounding allowance for the accumulated sum, log1p and the geometric
  // recurrences.
  const double round_pad = 4.0 * kEps * (terms + 2) * (log_sum + rem_hi);
  const double log_lo = std::max(0.0, log_sum + rem_lo - round_pad);
  const double log_hi = log_sum + rem_hi + round_pad;
  const CertifiedInterval tail_part{
      next_down(std::exp(log_lo) * (1.0 - 2.0 * kEps)),
      next_up(std::exp(log_hi) * (1.0 + 2.0 * kEps))};
  CertifiedInterval out = head_part * tail_part;
  if (out.relative_width() > rel_tol) {
    throw PreconditionError("rel_tol " + std::to_string(rel_tol) +
                            " is tighter than double precision can certify");
  }
  return out;
}

double xi_constant(int n) {
  if (n < 1) throw PreconditionError("dimension n must be >= 1");
  const double h = 0.5 * n;
  // log v_n = h ln(pi) - lgamma(h + 1)
  const double log_vn = h * std::log(std::numbers::pi) - std::lgamma(h + 1.0);
  const double log_xi = n * std::log(3.0) - (log_vn + h * std::log(h));
  return std::exp(log_xi);
}

CertifiedInterval hl_bound_constant(const ExponentSequence& seq, int n,
                                    double rel_tol) {
  const double xi_pow = std::pow(xi_constant(n), seq.aggregate_reciprocal());
  const double pad = 16.0 * kEps * xi_pow;
  const CertifiedInterval xi_part{xi_pow - pad, xi_pow + pad};
  return xi_part * conjugate_product(seq, 0.5 * rel_tol);
}

}  // namespace infdoob
