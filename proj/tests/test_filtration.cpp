#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "infdoob/errors.hpp"
#include "infdoob/filtration.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace infdoob;
using testing_support::rel_close;

using namespace oracles;

namespace {

TEST(TreeSpace, ShapeAndErrors) {
  const TreeSpace s = TreeSpace::uniform(2, 3);
  EXPECT_EQ(s.leaf_count(), 9u);
  EXPECT_EQ(s.atom_count(1), 3u);
  EXPECT_EQ(s.block_size(1), 3u);
  EXPECT_EQ(s.atom_of(7, 1), 2u);
  EXPECT_DOUBLE_EQ(s.measure(LeafSet(9, true)), 1.0);
  EXPECT_THROW(TreeSpace(1, 1, {1.0}), PreconditionError);
  EXPECT_THROW(TreeSpace(1, 2, {0.5, 0.6}), PreconditionError);
  EXPECT_THROW(TreeSpace(1, 2, {1.0, 0.0}), PreconditionError);
  EXPECT_THROW(TreeSpace::uniform(21, 2), PreconditionError);
  EXPECT_THROW(s.check_level(3), PreconditionError);
}

TEST(ConditionalExpectation, DepthOneExample) {
  const TreeSpace s = TreeSpace::uniform(1, 2);
  const Rv f{{4.0, 0.0}};
  EXPECT_EQ(cond_exp(s, f, 0), Rv({2.0, 2.0}));
  EXPECT_EQ(cond_exp(s, f, 1), f);
  const Rv sigma{{1.0, 3.0}};
  const Rv g{{3.0, 1.0}};
  EXPECT_DOUBLE_EQ(cond_exp_weighted(s, g, sigma, 0)[0], 1.5);
}

TEST(ConditionalExpectation, TowerConservationContraction) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const TreeSpace s = testing_support::random_space(rng, 4);
    Rv f = testing_support::random_rv(rng, s.leaf_count(), 1e-2, 1e2);
    for (double& x : f.values) {
      if (testing_support::uniform_int(rng, 0, 3) == 0) x = -x;
    }
    Rv abs_f = f;
    for (double& x : abs_f.values) x = std::abs(x);
    const double total = s.integral(f);
    for (int n = 0; n <= s.depth(); ++n) {
      const Rv en = cond_exp(s, f, n);
      EXPECT_LE(std::abs(s.integral(en) - total), 1e-12 * s.integral(abs_f));
      for (int m = 0; m <= s.depth(); ++m) {
        const Rv both = cond_exp(s, en, m);
        const Rv direct = cond_exp(s, f, std::min(n, m));
        // Scale of the average being compared: E(|f|) on the same atom.
        const Rv scale = cond_exp(s, abs_f, std::min(n, m));
        for (std::size_t x = 0; x < f.size(); ++x) {
          ASSERT_LE(std::abs(both[x] - direct[x]), 1e-12 * scale[x]) << trial;
        }
      }
      double norm_f = 0.0, norm_e = 0.0;
      for (std::size_t x = 0; x < f.size(); ++x) {
        norm_f += s.prob(x) * f[x] * f[x];
        norm_e += s.prob(x) * en[x] * en[x];
      }
      EXPECT_LE(norm_e, norm_f * (1.0 + 1e-12));
      const Rv e_abs = cond_exp(s, abs_f, n);
      for (std::size_t x = 0; x < f.size(); ++x) {
        EXPECT_LE(std::abs(en[x]), e_abs[x] * (1.0 + 1e-12));
      }
    }
    EXPECT_EQ(cond_exp(s, f, s.depth()), f);
  }
}

TEST(ConditionalExpectation, ConstantsAreReproducedExactly) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const TreeSpace s = testing_support::random_space(rng, 4);
    const Rv one = Rv::constant(s.leaf_count(), 1.0);
    for (int n = 0; n <= s.depth(); ++n) EXPECT_EQ(cond_exp(s, one, n), one);
  }
}

TEST(StoppingTimes, CountsMatchRecurrenceAndBruteForce) {
  const std::vector<std::pair<TreeSpace, std::uint64_t>> cases = {
      {TreeSpace::uniform(0, 2), 2},   {TreeSpace::uniform(1, 2), 5},
      {TreeSpace::uniform(2, 2), 26},  {TreeSpace::uniform(3, 2), 677},
      {TreeSpace::uniform(1, 3), 9},   {TreeSpace::uniform(2, 3), 730}};
  for (const auto& [space, expected] : cases) {
    EXPECT_EQ(count_stopping_times(space), expected);
    const auto listed = enumerate_stopping_times(space);
    ASSERT_EQ(listed.size(), expected);
    std::set<std::vector<Level>> distinct;
    for (const StoppingTime& tau : listed) {
      EXPECT_TRUE(is_stopping_time(space, tau));
      distinct.insert(tau.values);
    }
    EXPECT_EQ(distinct.size(), listed.size()) << "duplicates emitted";
    const auto brute = brute_force_times(space);
    EXPECT_EQ(brute.size(), expected);
    EXPECT_EQ(std::set<std::vector<Level>>(brute.begin(), brute.end()),
              distinct);
  }
  EXPECT_EQ(count_stopping_times(TreeSpace::uniform(20, 2)),
            std::numeric_limits<std::uint64_t>::max());
}

TEST(StoppingTimes, CapAndSampling) {
  const TreeSpace s = TreeSpace::uniform(3, 2);
  EXPECT_THROW(enumerate_stopping_times(s, 100), EnumerationCapError);
  std::vector<StoppingTime> a, b;
  for_each_in_family(s, StoppingFamily::sample(50, 9),
                     [&](const StoppingTime& t) { a.push_back(t); });
  for_each_in_family(s, StoppingFamily::sample(50, 9),
                     [&](const StoppingTime& t) { b.push_back(t); });
  EXPECT_EQ(a.size(), 50u);
  EXPECT_EQ(a, b);
  for (const StoppingTime& t : a) EXPECT_TRUE(is_stopping_time(s, t));
}

TEST(StoppingTimes, NonAdaptedTimesAreRejected) {
  const TreeSpace s = TreeSpace::uniform(1, 2);
  const StoppingTime bad{{0, 1}};
  EXPECT_FALSE(is_stopping_time(s, bad));
  EXPECT_THROW(stopped_value(s, Rv({1.0, 2.0}), bad), PreconditionError);
}

TEST(StoppingTimes, FirstExceedanceIsAdapted) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const TreeSpace s = testing_support::random_space(rng, 4);
    const Rv f = testing_support::random_rv(rng, s.leaf_count(), 1e-2, 1e2);
    const auto path = martingale_path(s, f);
    const StoppingTime tau = first_exceedance(path, 1.0);
    EXPECT_TRUE(is_stopping_time(s, tau));
    for (std::size_t x = 0; x < f.size(); ++x) {
      for (int n = 0; n <= s.depth(); ++n) {
        if (n < tau.values[x]) EXPECT_LE(path[n][x], 1.0);
      }
      if (tau.finite_at(x)) EXPECT_GT(path[tau.values[x]][x], 1.0);
    }
  }
}

TEST(StoppedValue, MatchesFtauAtomAveraging) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 1000; ++trial) {
    const TreeSpace s = testing_support::random_space(rng, 4);
    const StoppingTime tau = sample_stopping_time(s, rng);
    const Rv f = testing_support::random_rv(rng, s.leaf_count(), 1e-2, 1e2);
    const Rv got = stopped_value(s, f, tau);
    const Rv want = s.leaf_count() <= 9 ? stopped_value_oracle(s, tau, f)
                                        : stopped_value_by_atoms(s, tau, f);
    for (std::size_t x = 0; x < f.size(); ++x) {
      ASSERT_TRUE(rel_close(got[x], want[x], 1e-12)) << trial << " leaf " << x;
    }
    EXPECT_EQ(stopped_value(martingale_path(s, f), f, tau), got);
  }
}

TEST(StoppedValue, FtauMeasurabilityAgreesWithDefinition) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const TreeSpace s = testing_support::random_space(rng, 3);
    if (s.leaf_count() > 9) continue;
    const StoppingTime tau = sample_stopping_time(s, rng);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s.leaf_count());
         ++mask) {
      LeafSet a(s.leaf_count());
      for (std::size_t x = 0; x < s.leaf_count(); ++x) {
        if (mask >> x & 1) a.insert(x);
      }
      ASSERT_EQ(is_ftau_measurable(s, tau, a), ftau_oracle(s, tau, a));
    }
  }
}

TEST(LeafSet, Algebra) {
  const std::vector<std::size_t> ia{0, 2}, ib{2, 3};
  const LeafSet a = LeafSet::from_indices(4, ia);
  const LeafSet b = LeafSet::from_indices(4, ib);
  EXPECT_EQ((a & b).indices(), std::vector<std::size_t>{2});
  EXPECT_EQ((a | b).count(), 3u);
  EXPECT_TRUE((a & b).is_subset_of(a));
  EXPECT_TRUE(a.intersects(b));
  EXPECT_EQ(a.indicator(), Rv({1.0, 0.0, 1.0, 0.0}));
}

}  // namespace
