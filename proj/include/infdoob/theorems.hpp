#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "infdoob/exponents.hpp"
#include "infdoob/filtration.hpp"
#include "infdoob/holder.hpp"
#include "infdoob/report.hpp"
#include "infdoob/weights.hpp"

namespace infdoob {

// prod_i ||f_i||_{L^{p_i}(omega_i)}, tail components contributing |Q|^{s}
// when masked by Q and 1 otherwise.
double weighted_norm_product(const WeightSystem& ws, const FunctionVector& f);

// prod_i (int_B f_i^{p_i} omega_i)^{p/p_i}, tail |B cap Q|^{p s}.
double localized_norm_power(const WeightSystem& ws, const FunctionVector& f,
                            const LeafSet& b);

// Sides of the testing inequality
//   (int_{tau<inf} prod E_tau(f_i)^p v)^{1/p} <= C prod ||f_i||_{L^{p_i}(omega_i)}.
struct TestingSides {
  double lhs = 0.0;
  double rhs = 0.0;
};
TestingSides testing_sides(const WeightSystem& ws, const FunctionVector& f,
                           const StoppingTime& tau);
// max over the family of lhs/rhs (0/0 pairs skipped).
double testing_constant(const WeightSystem& ws, const FunctionVector& f,
                        const StoppingFamily& family = StoppingFamily::all());

// ||M(f)||_{L^{p,inf}(v)} / prod ||f_i||_{L^{p_i}(omega_i)}; 0 when both vanish.
double weak_ratio(const WeightSystem& ws, const FunctionVector& f);

// A_p => testing, with C = ap_constant(ws), for one stopping time.
VerificationReport verify_ap_to_testing(const WeightSystem& ws,
                                        const FunctionVector& f,
                                        const StoppingTime& tau);
// Same over a stopping-time family; the report keeps the worst time.
VerificationReport verify_ap_to_testing(
    const WeightSystem& ws, const FunctionVector& f,
    const StoppingFamily& family = StoppingFamily::all());

// testing => weak type: sweeps every value lambda of M(f) (and the value just
// below it), builds tau = inf{n : prod E_n(f_i) > lambda} and checks
//   lambda |{M > lambda}|_v^{1/p} <= (int_{tau<inf} prod E_tau^p v)^{1/p}
//                                 <= C_test prod ||f_i||.
VerificationReport verify_testing_to_weak(const WeightSystem& ws,
                                          const FunctionVector& f,
                                          double c_test);

// Dyadic slicing B_k = {2^k < prod E_n(f_i) <= 2^{k+1}} per level n.
struct DyadicSlicing {
  std::vector<std::map<int, LeafSet>> per_level;
};
DyadicSlicing dyadic_slicing(const WeightSystem& ws, const FunctionVector& f);

// Largest weak ratio over the localizations f chi_B that the weak => testing
// argument feeds to the weak-type inequality (B = B_k cap {tau = n}).
double localized_weak_constant(
    const WeightSystem& ws, const FunctionVector& f,
    const StoppingFamily& family = StoppingFamily::all());

struct WeakToTestingResult {
  VerificationReport report;
  DyadicSlicing slicing;
};
// weak type => testing with constant 2^p C_weak^p on the p-th powers:
//   int_{tau<inf} prod E_tau(f_i)^p v <= 2^p C_weak^p prod (int f_i^{p_i} omega_i)^{p/p_i}
// for every tau in the family, checking each step of the slicing argument.
WeakToTestingResult verify_weak_to_testing(
    const WeightSystem& ws, const FunctionVector& f, double c_weak,
    const StoppingFamily& family = StoppingFamily::all());

// testing => A_p through the necessity family sigma chi_B over level-n atoms
// B: recovers E_n(v)^{1/p} prod E_n(sigma_i)^{1/p'_i} <= C_test C_RH^{1/p}.
VerificationReport verify_testing_to_ap(
    const WeightSystem& ws,
    const StoppingFamily& rh_family = StoppingFamily::all());

struct SawyerCell {
  int k = 0;
  int j = 0;
  LeafSet a;        // {tau_k < inf} cap {2^j < prod E_{tau_k}(sigma_i) <= 2^{j+1}}
  LeafSet b;        // a cap {tau_{k+1} = inf}
  double theta = 0; // int_b prod E_{tau_k}(sigma_i)^p v
  double t = 0;     // min over a of prod E^{sigma_i}_{tau_k}(g_i)^p
};

struct LambdaSlice {
  double lambda = 0;
  std::vector<std::size_t> cells;  // E_lambda, as indices into cells
  LeafSet g;                       // G_lambda
};

struct SawyerTrace {
  int k_min = 0;
  int k_max = -1;                  // empty trace when k_max < k_min
  std::vector<StoppingTime> taus;  // tau_k for k in [k_min, k_max + 1]
  std::vector<SawyerCell> cells;
  std::vector<LambdaSlice> lambda_slices;
  Rv maximal;                      // M(g sigma)

  bool empty() const { return k_max < k_min; }
  const StoppingTime& tau(int k) const { return taus[k - k_min]; }
};

SawyerTrace sawyer_decomposition(const WeightSystem& ws,
                                 const FunctionVector& g);

// Disjointness of B cells, band covering, B subset A, F_{tau_k}
// measurability of A, theta >= 0 and G_lambda = union of A over E_lambda.
VerificationReport sawyer_invariants(const WeightSystem& ws,
                                     const SawyerTrace& trace);

// S_p => strong type with C_final = 4 C_S C_RH^{1/p} prod p'_i (upper end of
// the certified product), including the trace inequality
// int M^p v <= 4^p sum T theta and the per-lambda chain.
VerificationReport verify_sp_to_strong(const WeightSystem& ws,
                                       const FunctionVector& g, double c_s,
                                       double c_rh);

// ||M(g sigma)||_{L^p(v)} / prod ||g_i||_{L^{p_i}(sigma_i)}.
double strong_ratio(const WeightSystem& ws, const FunctionVector& g);

enum class InequalityId { testing, weak, strong, sp_test };
InequalityId parse_inequality_id(const std::string& id);
std::string to_string(InequalityId id);

// Lower bound for the best constant: max of the ratio over canonical
// extremals (constants first, then indicator or sigma-built families) and
// `trials` seeded random vectors with log-uniform leaf values in
// [1e-3, 1e3]. Trial t draws from the stream (seed, t).
ConstantEstimate estimate_best_constant(
    InequalityId id, const WeightSystem& ws, std::uint64_t trials,
    std::uint64_t seed, const StoppingFamily& family = StoppingFamily::all());

}  // namespace infdoob
