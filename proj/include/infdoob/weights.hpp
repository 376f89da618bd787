#pragma once

#include <cstdint>
#include <vector>

#include "infdoob/exponents.hpp"
#include "infdoob/filtration.hpp"
#include "infdoob/holder.hpp"

namespace infdoob {

// Weights omega_1, omega_2, ... and v on a tree space. Components beyond the
// explicit ones are identically 1, so sigma_i = omega_i^{-1/(p_i - 1)} is 1
// there too and every tail factor of the standing assumptions equals 1.
class WeightSystem {
 public:
  // Pads `omegas` with constant 1 up to the head length. Throws
  // PreconditionError on nonpositive entries or misalignment.
  WeightSystem(TreeSpace space, ExponentSequence seq, std::vector<Rv> omegas,
               Rv v);
  static WeightSystem unit(TreeSpace space, ExponentSequence seq);

  const TreeSpace& space() const { return space_; }
  const ExponentSequence& seq() const { return seq_; }
  const std::vector<Rv>& omegas() const { return omegas_; }
  const std::vector<Rv>& sigmas() const { return sigmas_; }
  const Rv& v() const { return v_; }
  double p() const { return seq_.p(); }

  // Same omegas, v multiplied by c > 0.
  WeightSystem with_scaled_v(double c) const;

 private:
  TreeSpace space_;
  ExponentSequence seq_;
  std::vector<Rv> omegas_;
  std::vector<Rv> sigmas_;
  Rv v_;
};

// Smallest constant over a stopping-time family. For sampled families the
// value is only a lower bound for the true constant.
struct ConstantEstimate {
  double value = 0.0;
  std::uint64_t family_size = 0;
  std::uint64_t skipped_empty = 0;
  bool lower_bound = false;
};

// max over levels and atoms of E_n(v)^{1/p} prod E_n(sigma_i)^{1/p'_i}.
double ap_constant(const WeightSystem& ws);

// The two sides of the reverse Holder inequality on F = {tau < inf}:
//   lhs = prod (int_F sigma_i)^{p/p_i} (tail: |F|^{p s}),
//   rhs = int_F prod sigma_i^{p/p_i}.
struct RhSides {
  double lhs = 0.0;
  double rhs = 0.0;
};
RhSides rh_sides(const WeightSystem& ws, const LeafSet& f);
// lhs / rhs, evaluated through averages over F so that the tail bookkeeping
// sum_i p/p_i + p s = 1 cancels the |F| powers exactly. Requires |F| > 0.
double rh_ratio(const WeightSystem& ws, const LeafSet& f);
ConstantEstimate rh_constant(const WeightSystem& ws,
                             const StoppingFamily& family);

// Sides of the Sawyer testing inequality on F = {tau < inf}:
//   lhs = (int_F M(sigma chi_F)^p v)^{1/p},
//   rhs = prod |F|_{sigma_i}^{1/p_i} (tail: |F|^{s}).
struct SpSides {
  double lhs = 0.0;
  double rhs = 0.0;
};
SpSides sp_sides(const WeightSystem& ws, const LeafSet& f);
double sp_ratio(const WeightSystem& ws, const LeafSet& f);
ConstantEstimate sp_constant(const WeightSystem& ws,
                             const StoppingFamily& family);

// sigma_i chi_B with the tail masked by B. Throws PreconditionError unless
// B is a union of level-n atoms.
FunctionVector necessity_family_ap(const WeightSystem& ws, int level,
                                   const LeafSet& b);

}  // namespace infdoob
