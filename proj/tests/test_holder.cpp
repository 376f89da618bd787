#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "infdoob/errors.hpp"
#include "infdoob/holder.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace infdoob;
using testing_support::rel_close;
using testing_support::uniform_int;

using namespace oracles;

namespace {

TEST(Holder, NormsAndTailFactor) {
  const TreeSpace s = TreeSpace::uniform(1, 2);
  EXPECT_DOUBLE_EQ(lp_norm(s, Rv({4.0, 0.0}), 2.0), std::sqrt(8.0));
  EXPECT_DOUBLE_EQ(lp_norm(s, Rv({1.0, 1.0}), 3.0, Rv({2.0, 2.0})),
                   std::cbrt(2.0));
  const ExponentSequence seq({2.0}, 0.5, 0.5);
  FunctionVector f = FunctionVector::ones(s, seq);
  EXPECT_EQ(tail_norm_factor(s, seq, f), 1.0);
  const std::vector<std::size_t> first{0};
  f = f.masked(LeafSet::from_indices(2, first));
  EXPECT_DOUBLE_EQ(tail_norm_factor(s, seq, f), std::pow(0.5, 0.5));
  EXPECT_EQ(product_function(s, f), Rv({1.0, 0.0}));
}

TEST(Holder, AlignmentErrors) {
  const TreeSpace s = TreeSpace::uniform(1, 2);
  const ExponentSequence seq({2.0}, 0.0);
  EXPECT_THROW(FunctionVector::aligned(s, seq, {Rv({1.0, 1.0}), Rv({1.0, 1.0})}),
               PreconditionError);
  EXPECT_THROW(FunctionVector::aligned(s, seq, {Rv({1.0})}), PreconditionError);
  EXPECT_THROW(FunctionVector::aligned(s, seq, {Rv({-1.0, 1.0})}),
               PreconditionError);
}

TEST(Holder, IntegralAndConditionalOnRandomInstances) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10'000; ++trial) {
    const TreeSpace s = testing_support::random_space(rng, 3);
    const ExponentSequence seq = testing_support::random_sequence(rng, 4);
    FunctionVector f = testing_support::random_functions(rng, s, seq);
    if (uniform_int(rng, 0, 3) == 0) f = f.masked(random_mask(rng, s.leaf_count()));
    const auto whole = holder_integral_check(s, f, seq);
    ASSERT_TRUE(whole.pass) << trial << " slack " << whole.slack;
    const int n = uniform_int(rng, 0, s.depth());
    const auto local = holder_conditional_check(s, f, seq, n);
    ASSERT_TRUE(local.pass) << trial << " slack " << local.slack;
  }
}

TEST(Holder, TwoFunctionOracle) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 1000; ++trial) {
    const TreeSpace s = testing_support::random_space(rng, 3);
    const double p1 = testing_support::uniform(rng, 1.1, 6.0);
    const double p2 = testing_support::uniform(rng, 1.1, 6.0);
    const ExponentSequence seq({p1, p2}, 0.0);
    const Rv f = testing_support::random_nonneg(rng, s.leaf_count());
    const Rv g = testing_support::random_nonneg(rng, s.leaf_count());
    const double p = 1.0 / (1.0 / p1 + 1.0 / p2);
    double fg = 0.0, ff = 0.0, gg = 0.0;
    for (std::size_t x = 0; x < s.leaf_count(); ++x) {
      fg += s.prob(x) * std::pow(f[x] * g[x], p);
      ff += s.prob(x) * std::pow(f[x], p1);
      gg += s.prob(x) * std::pow(g[x], p2);
    }
    const auto r = holder_integral_check(
        s, FunctionVector::aligned(s, seq, {f, g}), seq);
    EXPECT_TRUE(rel_close(r.lhs, std::pow(fg, 1.0 / p), 1e-12));
    EXPECT_TRUE(rel_close(r.rhs, std::pow(ff, 1.0 / p1) * std::pow(gg, 1.0 / p2),
                          1e-12));
    EXPECT_TRUE(r.pass);
  }
}

TEST(Holder, LargeExponentsDoNotUnderflow) {
  // 0.01^200 underflows; the norms must still see the positive value.
  const TreeSpace s = TreeSpace::uniform(1, 2);
  const ExponentSequence seq({200.0, 1.5}, 0.0);
  const Rv f({0.01, 0.02});
  EXPECT_TRUE(rel_close(lp_norm(s, f, 200.0), 0.02 * std::pow(0.5, 1.0 / 200), 1e-12));
  const auto fv = FunctionVector::aligned(s, seq, {f, Rv({3.0, 1.0})});
  const auto local = holder_conditional_check(s, fv, seq, 1);
  EXPECT_GT(local.rhs, 0.0);
  EXPECT_TRUE(local.pass);
  EXPECT_TRUE(holder_integral_check(s, fv, seq).pass);
}

TEST(Holder, EqualityForConstants) {
  const TreeSpace s = TreeSpace::uniform(2, 2);
  const ExponentSequence seq({2.0, 3.0}, 0.25, 0.5);
  const FunctionVector f = FunctionVector::aligned(
      s, seq, {Rv::constant(4, 2.0), Rv::constant(4, 3.0)});
  const auto r = holder_integral_check(s, f, seq);
  EXPECT_TRUE(rel_close(r.lhs, 6.0, 1e-12));
  EXPECT_TRUE(rel_close(r.rhs, 6.0, 1e-12));
}

}  // namespace
