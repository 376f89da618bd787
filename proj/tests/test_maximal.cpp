#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "infdoob/errors.hpp"
#include "infdoob/maximal.hpp"
#include "support.hpp"

using namespace infdoob;
using testing_support::uniform_int;

namespace {

TEST(Maximal, DepthOneExamples) {
  const TreeSpace s = TreeSpace::uniform(1, 2);
  EXPECT_EQ(doob_maximal(s, Rv({4.0, 0.0})), Rv({4.0, 2.0}));
  const ExponentSequence seq({2.0, 2.0}, 0.0);
  const auto f = FunctionVector::aligned(s, seq, {Rv({4.0, 0.0}), Rv({0.0, 4.0})});
  EXPECT_EQ(gen_doob_maximal(s, f, seq), Rv({4.0, 4.0}));
  const ExponentSequence one({2.0}, 0.5);
  const auto g = FunctionVector::aligned(s, one, {Rv({3.0, 1.0})});
  EXPECT_EQ(gen_weighted_maximal(s, g, {Rv({1.0, 3.0})}, one), Rv({3.0, 1.5}));
  EXPECT_THROW(gen_weighted_maximal(s, g, {Rv({0.0, 3.0})}, one),
               PreconditionError);
  const std::vector<std::size_t> second{1};
  EXPECT_DOUBLE_EQ(
      weighted_measure(s, LeafSet::from_indices(2, second), Rv({2.0, 6.0})), 3.0);
  EXPECT_DOUBLE_EQ(weighted_measure(s, LeafSet(2), Rv({2.0, 6.0})), 0.0);
  EXPECT_DOUBLE_EQ(weak_lp_norm(s, Rv({4.0, 2.0}), 1.0, Rv({1.0, 1.0})), 2.0);
  EXPECT_DOUBLE_EQ(weak_lp_norm(s, Rv({0.0, 0.0}), 1.0, Rv({1.0, 1.0})), 0.0);
  const auto doob = doob_inequality_check(s, Rv({4.0, 0.0}), 2.0, Rv({1.0, 1.0}));
  EXPECT_DOUBLE_EQ(doob.lhs, std::sqrt(10.0));
  EXPECT_DOUBLE_EQ(doob.bound(), 2.0 * std::sqrt(8.0));
  EXPECT_TRUE(doob.pass);
}

TEST(Maximal, SingleActiveReductionIsExact) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 1000; ++trial) {
    const TreeSpace s = testing_support::random_space(rng, 4);
    const ExponentSequence seq = testing_support::random_sequence(rng, 4);
    if (seq.head_size() == 0) continue;
    const Rv f = testing_support::random_nonneg(rng, s.leaf_count());
    const auto fv = FunctionVector::aligned(s, seq, {f});
    ASSERT_EQ(gen_doob_maximal(s, fv, seq), doob_maximal(s, f)) << trial;
  }
}

TEST(Maximal, MaskedIdentityIsExact) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 1000; ++trial) {
    const TreeSpace s = testing_support::random_space(rng, 4);
    const ExponentSequence seq = testing_support::random_sequence(
        rng, 4, true, testing_support::uniform(rng, 0.3, 1.5));
    LeafSet q(s.leaf_count());
    for (std::size_t x = 0; x < s.leaf_count(); ++x) {
      if (uniform_int(rng, 0, 1) == 1) q.insert(x);
    }
    const auto ones = FunctionVector::ones(s, seq);
    ASSERT_EQ(gen_doob_maximal(s, ones, seq, q), q.indicator()) << trial;
    ASSERT_EQ(gen_doob_maximal(s, ones.masked(q), seq), q.indicator());
  }
  // The depth-2 example: Q is the first level-1 atom.
  const TreeSpace s = TreeSpace::uniform(2, 2);
  const ExponentSequence seq({2.0}, 0.5);
  const LeafSet q = s.atom_set(1, 0);
  EXPECT_EQ(gen_doob_maximal(s, FunctionVector::ones(s, seq), seq, q),
            Rv({1.0, 1.0, 0.0, 0.0}));
}

TEST(Maximal, FiniteFamilyMaskActsThroughComponents) {
  // Without a tail nothing forces the product to vanish off Q.
  const TreeSpace s = TreeSpace::uniform(1, 2);
  const ExponentSequence seq({2.0}, 0.0);
  const std::vector<std::size_t> first{0};
  const LeafSet q = LeafSet::from_indices(2, first);
  EXPECT_EQ(gen_doob_maximal(s, FunctionVector::ones(s, seq), seq, q),
            Rv({1.0, 0.5}));
}

TEST(Maximal, PropertiesOnRandomInstances) {
  std::mt19937_64 rng(57);
  for (int trial = 0; trial < 1000; ++trial) {
    const TreeSpace s = testing_support::random_space(rng, 4);
    const ExponentSequence seq = testing_support::random_sequence(rng, 4);
    const FunctionVector f = testing_support::random_functions(rng, s, seq);
    const Rv m = gen_doob_maximal(s, f, seq);
    const auto products = level_products(s, f, seq);
    for (const Rv& level : products) {
      for (std::size_t x = 0; x < m.size(); ++x) ASSERT_GE(m[x], level[x]);
    }
    const Rv v = testing_support::random_rv(rng, s.leaf_count(), 0.1, 10.0);
    const double p = seq.p();
    EXPECT_LE(weak_lp_norm(s, m, p, v), lp_norm(s, m, p, v) * (1 + 1e-12));

    // sigma == 1 reduces the weighted operator to the plain one.
    std::vector<Rv> ones(f.size(), Rv::constant(s.leaf_count(), 1.0));
    EXPECT_EQ(gen_weighted_maximal(s, f, ones, seq), m);

    if (f.size() > 0) {
      FunctionVector scaled = f;
      for (double& x : scaled.active[0].values) x *= 4.0;
      Rv expect = m;
      for (double& x : expect.values) x *= 4.0;
      EXPECT_EQ(gen_doob_maximal(s, scaled, seq), expect);
    }
  }
}

TEST(Maximal, DoobInequalityOnRandomInstances) {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 1000; ++trial) {
    const TreeSpace s = testing_support::random_space(rng, 3);
    const Rv g = testing_support::random_nonneg(rng, s.leaf_count());
    const Rv sigma = testing_support::random_rv(rng, s.leaf_count(), 0.01, 100.0);
    for (double q : {1.5, 2.0, 4.0}) {
      const auto r = doob_inequality_check(s, g, q, sigma);
      ASSERT_TRUE(r.pass) << trial << " q=" << q << " slack " << r.slack;
    }
  }
  const TreeSpace s = TreeSpace::uniform(1, 2);
  EXPECT_THROW(doob_inequality_check(s, Rv({1.0, 1.0}), 1.0, Rv({1.0, 1.0})),
               PreconditionError);
}

TEST(Maximal, LevelSetStoppingTime) {
  const TreeSpace s = TreeSpace::uniform(2, 2);
  const ExponentSequence seq({2.0}, 0.5);
  const auto f = FunctionVector::aligned(s, seq, {Rv({6.0, 0.0, 0.0, 3.0})});
  const StoppingTime tau = level_set_stopping_time(s, f, seq, 2.5);
  EXPECT_EQ(tau.values, (std::vector<Level>{1, 1, kNever, 2}));
  EXPECT_TRUE(is_stopping_time(s, tau));
}

}  // namespace
