#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace infdoob {

// A real value per leaf.
struct Rv {
  std::vector<double> values;

  Rv() = default;
  explicit Rv(std::vector<double> v) : values(std::move(v)) {}
  static Rv constant(std::size_t leaves, double c) {
    return Rv(std::vector<double>(leaves, c));
  }

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  std::span<const double> span() const { return values; }
  bool operator==(const Rv&) const = default;
};

// A set of leaves (events are unions of leaves; F_N is the power set).
class LeafSet {
 public:
  LeafSet() = default;
  explicit LeafSet(std::size_t leaves, bool full = false)
      : members_(leaves, full ? 1 : 0) {}
  static LeafSet from_indices(std::size_t leaves,
                              std::span<const std::size_t> idx);

  std::size_t universe() const { return members_.size(); }
  bool contains(std::size_t leaf) const { return members_[leaf] != 0; }
  void insert(std::size_t leaf) { members_[leaf] = 1; }
  void erase(std::size_t leaf) { members_[leaf] = 0; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  std::vector<std::size_t> indices() const;
  // 0/1 indicator.
  Rv indicator() const;

  bool is_subset_of(const LeafSet& other) const;
  bool intersects(const LeafSet& other) const;
  LeafSet operator&(const LeafSet& other) const;
  LeafSet operator|(const LeafSet& other) const;
  bool operator==(const LeafSet&) const = default;

 private:
  std::vector<std::uint8_t> members_;
};

using Level = std::int32_t;
// The value "infinity" of a stopping time.
inline constexpr Level kNever = std::numeric_limits<Level>::max();

// A finite filtered probability space: an r-adic tree of depth N with
// positive leaf probabilities. Level-n atoms are the r^n consecutive blocks of
// r^{N-n} leaves.
class TreeSpace {
 public:
  static constexpr std::size_t kMaxLeaves = std::size_t{1} << 20;

  // Throws PreconditionError on depth < 0, branching < 2, r^N > 2^20,
  // nonpositive probabilities or a total off 1 by more than 1e-12.
  TreeSpace(int depth, int branching, std::vector<double> leaf_probs);
  static TreeSpace uniform(int depth, int branching);

  int depth() const { return depth_; }
  int branching() const { return branching_; }
  std::size_t leaf_count() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double prob(std::size_t leaf) const { return probs_[leaf]; }

  std::size_t atom_count(int level) const;
  std::size_t block_size(int level) const;
  std::size_t atom_of(std::size_t leaf, int level) const {
    return leaf / block_size(level);
  }
  // Leaves [first, first + block_size) of atom `atom` at `level`.
  std::size_t atom_begin(int level, std::size_t atom) const {
    return atom * block_size(level);
  }
  void check_level(int level) const;

  // Level-n atoms entirely inside q, as one flag per atom.
  std::vector<std::uint8_t> atoms_inside(const LeafSet& q, int level) const;
  // True when q is a union of level-n atoms (q in F_n).
  bool is_measurable(const LeafSet& q, int level) const;
  LeafSet atom_set(int level, std::size_t atom) const;

  double measure(const LeafSet& q) const;
  double integral(const Rv& f) const;

 private:
  int depth_;
  int branching_;
  std::vector<double> probs_;
  std::vector<std::size_t> block_sizes_;  // indexed by level
};

// Adapted random time, stored leaf-wise, values in {0..N} or kNever.
struct StoppingTime {
  std::vector<Level> values;

  bool finite_at(std::size_t leaf) const { return values[leaf] != kNever; }
  LeafSet finite_set() const;  // {tau < inf}
  LeafSet level_set(Level n) const;  // {tau = n}
  bool operator==(const StoppingTime&) const = default;
};

StoppingTime constant_time(const TreeSpace& space, Level value);

// E_n(f): atom-wise mu-average over level-n atoms.
Rv cond_exp(const TreeSpace& space, const Rv& f, int level);
// E_n(g sigma) / E_n(sigma), the conditional expectation under sigma dmu.
Rv cond_exp_weighted(const TreeSpace& space, const Rv& g, const Rv& sigma,
                     int level);
// E_0 .. E_N of f, indexed by level.
std::vector<Rv> martingale_path(const TreeSpace& space, const Rv& f);

bool is_stopping_time(const TreeSpace& space, const StoppingTime& tau);
// F_tau measurability of q: q cap {tau = n} is a union of level-n atoms for
// every finite n.
bool is_ftau_measurable(const TreeSpace& space, const StoppingTime& tau,
                        const LeafSet& q);

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

// Number of adapted times, by S(level-N node) = 2 and
// S(internal) = 1 + S(child)^r; saturates at UINT64_MAX.
std::uint64_t count_stopping_times(const TreeSpace& space);

// Visits every adapted time exactly once. A node below level N either stops
// its atom there or defers to its children; a level-N node stops at N or
// never. The visitor returns false to stop early. Throws EnumerationCapError
// when the count exceeds `cap`.
void for_each_stopping_time(
    const TreeSpace& space,
    const std::function<bool(const StoppingTime&)>& visit,
    std::uint64_t cap = kDefaultEnumerationCap);
std::vector<StoppingTime> enumerate_stopping_times(
    const TreeSpace& space, std::uint64_t cap = kDefaultEnumerationCap);

// Draws an adapted time by making each node's two-way choice uniformly.
StoppingTime sample_stopping_time(const TreeSpace& space, std::mt19937_64& rng);

// First level at which the per-level values exceed `threshold`:
// tau(x) = min{n : values[n](x) > threshold}, kNever if none. Adapted
// whenever each values[n] is F_n-measurable.
StoppingTime first_exceedance(std::span<const Rv> per_level, double threshold);

// E_tau(f) = f_tau: E_{tau(x)}(f)(x) where tau is finite, f(x) elsewhere.
// Throws PreconditionError for non-adapted tau.
Rv stopped_value(const TreeSpace& space, const Rv& f, const StoppingTime& tau);
// Same, from a precomputed martingale path.
Rv stopped_value(std::span<const Rv> path, const Rv& f,
                 const StoppingTime& tau);

// Stopping-time family used for suprema over T.
struct StoppingFamily {
  enum class Kind { all, sample };
  Kind kind = Kind::all;
  std::uint64_t count = 0;  // sample size
  std::uint64_t seed = 0;
  std::uint64_t cap = kDefaultEnumerationCap;

  static StoppingFamily all() { return {}; }
  static StoppingFamily sample(std::uint64_t count, std::uint64_t seed) {
    return {Kind::sample, count, seed, kDefaultEnumerationCap};
  }
  bool exhaustive() const { return kind == Kind::all; }
};

// Visits the family; returns the number of stopping times visited.
std::uint64_t for_each_in_family(
    const TreeSpace& space, const StoppingFamily& family,
    const std::function<void(const StoppingTime&)>& visit);

}  // namespace infdoob
