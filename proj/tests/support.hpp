#pragma once

// Hand-rolled generators shared by the property suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "infdoob/exponents.hpp"
#include "infdoob/filtration.hpp"
#include "infdoob/holder.hpp"
#include "infdoob/weights.hpp"

namespace testing_support {

using infdoob::ExponentSequence;
using infdoob::FunctionVector;
using infdoob::Rv;
using infdoob::TreeSpace;
using infdoob::WeightSystem;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

// Positive reciprocals normalized to `total`; the last one is the tail mass
// when with_tail is set.
inline ExponentSequence random_sequence(std::mt19937_64& rng, int max_head,
                                        bool with_tail, double total) {
  const int m = uniform_int(rng, with_tail ? 0 : 1, max_head);
  std::vector<double> w;
  for (int i = 0; i < m + (with_tail ? 1 : 0); ++i) {
    w.push_back(uniform(rng, 0.05, 1.0));
  }
  double sum = 0.0;
  for (double x : w) sum += x;
  // Keep every reciprocal below 1 so each exponent exceeds 1.
  const double scale = total / sum;
  std::vector<double> head;
  for (int i = 0; i < m; ++i) {
    head.push_back(1.0 / std::min(w[i] * scale, 0.95));
  }
  const double s = with_tail ? std::min(w.back() * scale, 0.95) : 0.0;
  return ExponentSequence(head, s, uniform(rng, 0.1, 0.9));
}

// Any positive aggregate (p may fall below 1).
inline ExponentSequence random_sequence(std::mt19937_64& rng, int max_head) {
  const bool tail = uniform_int(rng, 0, 1) == 1;
  return random_sequence(rng, max_head, tail, uniform(rng, 0.2, 1.6));
}

inline TreeSpace random_space(std::mt19937_64& rng, int max_depth,
                              bool uniform_probs = false) {
  const int depth = uniform_int(rng, 0, max_depth);
  const int branching = uniform_int(rng, 2, 3);
  if (uniform_probs) return TreeSpace::uniform(depth, branching);
  std::size_t leaves = 1;
  for (int i = 0; i < depth; ++i) leaves *= static_cast<std::size_t>(branching);
  std::vector<double> probs(leaves);
  double sum = 0.0;
  for (double& q : probs) {
    q = uniform(rng, 0.2, 1.0);
    sum += q;
  }
  for (double& q : probs) q /= sum;
  // Renormalize the last entry so the total is 1 to the last bit.
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < leaves; ++i) head += probs[i];
  probs.back() = 1.0 - head;
  return TreeSpace(depth, branching, probs);
}

inline Rv random_rv(std::mt19937_64& rng, std::size_t leaves, double lo,
                    double hi) {
  Rv r{std::vector<double>(leaves)};
  for (double& x : r.values) x = log_uniform(rng, lo, hi);
  return r;
}

// Nonnegative values, sometimes with exact zeros.
inline Rv random_nonneg(std::mt19937_64& rng, std::size_t leaves) {
  Rv r = random_rv(rng, leaves, 1e-2, 1e2);
  for (double& x : r.values) {
    if (uniform_int(rng, 0, 5) == 0) x = 0.0;
  }
  return r;
}

inline FunctionVector random_functions(std::mt19937_64& rng,
                                       const TreeSpace& space,
                                       const ExponentSequence& seq) {
  std::vector<Rv> active;
  const int m = uniform_int(rng, 0, static_cast<int>(seq.head_size()));
  for (int i = 0; i < m; ++i) {
    active.push_back(random_nonneg(rng, space.leaf_count()));
  }
  return FunctionVector::aligned(space, seq, std::move(active));
}

inline WeightSystem random_system(std::mt19937_64& rng, const TreeSpace& space,
                                  const ExponentSequence& seq, double spread) {
  std::vector<Rv> omegas;
  for (std::size_t i = 0; i < seq.head_size(); ++i) {
    omegas.push_back(random_rv(rng, space.leaf_count(), 1.0 / spread, spread));
  }
  Rv v = random_rv(rng, space.leaf_count(), 1.0 / spread, spread);
  return WeightSystem(space, seq, std::move(omegas), std::move(v));
}

struct Weights {
  std::vector<double> head;
  double tail_mass;
  double tail_ratio;
};

// Weights summing to one, at least two pieces so each stays below 1.
inline Weights random_weights(std::mt19937_64& rng) {
  const bool tail = uniform_int(rng, 0, 1) == 1;
  const int m = uniform_int(rng, tail ? 1 : 2, 8);
  std::vector<double> w(m + (tail ? 1 : 0));
  double sum = 0.0;
  for (double& x : w) sum += (x = uniform(rng, 0.05, 1.0));
  for (double& x : w) x /= sum;
  Weights out;
  out.tail_mass = tail ? w.back() : 0.0;
  out.tail_ratio = uniform(rng, 0.1, 0.9);
  out.head.assign(w.begin(), w.begin() + m);
  return out;
}

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace testing_support
