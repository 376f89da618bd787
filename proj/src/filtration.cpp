#include "infdoob/filtration.hpp"

#include <cmath>
#include <string>

#include "infdoob/errors.hpp"
#include "infdoob/simd.hpp"

namespace infdoob {

LeafSet LeafSet::from_indices(std::size_t leaves,
                              std::span<const std::size_t> idx) {
  LeafSet s(leaves);
  for (std::size_t i : idx) {
    if (i >= leaves) throw PreconditionError("leaf index out of range");
    s.insert(i);
  }
  return s;
}

std::size_t LeafSet::count() const {
  std::size_t c = 0;
  for (auto m : members_) c += m;
  return c;
}

std::vector<std::size_t> LeafSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i]) out.push_back(i);
  }
  return out;
}

Rv LeafSet::indicator() const {
  Rv r = Rv::constant(members_.size(), 0.0);
  for (std::size_t i = 0; i < members_.size(); ++i) r[i] = members_[i];
  return r;
}

bool LeafSet::is_subset_of(const LeafSet& other) const {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i] && !other.members_[i]) return false;
  }
  return true;
}

bool LeafSet::intersects(const LeafSet& other) const {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i] && other.members_[i]) return true;
  }
  return false;
}

LeafSet LeafSet::operator&(const LeafSet& other) const {
  LeafSet out(members_.size());
  for (std::size_t i = 0; i < members_.size(); ++i) {
    out.members_[i] = members_[i] & other.members_[i];
  }
  return out;
}

LeafSet LeafSet::operator|(const LeafSet& other) const {
  LeafSet out(members_.size());
  for (std::size_t i = 0; i < members_.size(); ++i) {
    out.members_[i] = members_[i] | other.members_[i];
  }
  return out;
}

TreeSpace::TreeSpace(int depth, int branching, std::vector<double> leaf_probs)
    : depth_(depth), branching_(branching), probs_(std::move(leaf_probs)) {
  if (depth_ < 0) throw PreconditionError("depth must be >= 0");
  if (branching_ < 2) throw PreconditionError("branching must be >= 2");
  std::size_t leaves = 1;
  for (int n = 0; n < depth_; ++n) {
    leaves *= static_cast<std::size_t>(branching_);
    if (leaves > kMaxLeaves) {
      throw PreconditionError("r^N exceeds the 2^20 leaf limit");
    }
  }
  if (probs_.size() != leaves) {
    throw PreconditionError("expected " + std::to_string(leaves) +
                            " leaf probabilities, got " +
                            std::to_string(probs_.size()));
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p > 0.0) || !std::isfinite(p)) {
      throw PreconditionError("leaf probabilities must be positive");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw PreconditionError("leaf probabilities sum to " +
                            std::to_string(total) + ", not 1");
  }
  block_sizes_.assign(depth_ + 1, 1);
  for (int n = depth_ - 1; n >= 0; --n) {
    block_sizes_[n] = block_sizes_[n + 1] * branching_;
  }
}

TreeSpace TreeSpace::uniform(int depth, int branching) {
  if (depth < 0 || branching < 2) {
    throw PreconditionError("depth must be >= 0 and branching >= 2");
  }
  std::size_t leaves = 1;
  for (int n = 0; n < depth; ++n) {
    leaves *= static_cast<std::size_t>(branching);
    if (leaves > kMaxLeaves) {
      throw PreconditionError("r^N exceeds the 2^20 leaf limit");
    }
  }
  return TreeSpace(depth, branching,
                   std::vector<double>(leaves, 1.0 / static_cast<double>(leaves)));
}

void TreeSpace::check_level(int level) const {
  if (level < 0 || level > depth_) {
    throw PreconditionError("level " + std::to_string(level) +
                            " outside [0, " + std::to_string(depth_) + "]");
  }
}

std::size_t TreeSpace::atom_count(int level) const {
  check_level(level);
  return probs_.size() / block_sizes_[level];
}

std::size_t TreeSpace::block_size(int level) const {
  return block_sizes_[level];
}

std::vector<std::uint8_t> TreeSpace::atoms_inside(const LeafSet& q,
                                                  int level) const {
  check_level(level);
  const std::size_t b = block_sizes_[level];
  std::vector<std::uint8_t> inside(probs_.size() / b, 1);
  for (std::size_t leaf = 0; leaf < probs_.size(); ++leaf) {
    if (!q.contains(leaf)) inside[leaf / b] = 0;
  }
  return inside;
}

bool TreeSpace::is_measurable(const LeafSet& q, int level) const {
  check_level(level);
  const std::size_t b = block_sizes_[level];
  for (std::size_t start = 0; start < probs_.size(); start += b) {
    const bool first = q.contains(start);
    for (std::size_t i = start + 1; i < start + b; ++i) {
      if (q.contains(i) != first) return false;
    }
  }
  return true;
}

LeafSet TreeSpace::atom_set(int level, std::size_t atom) const {
  check_level(level);
  LeafSet s(probs_.size());
  const std::size_t b = block_sizes_[level];
  for (std::size_t i = atom * b; i < (atom + 1) * b; ++i) s.insert(i);
  return s;
}

double TreeSpace::measure(const LeafSet& q) const {
  double m = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (q.contains(i)) m += probs_[i];
  }
  return m;
}

double TreeSpace::integral(const Rv& f) const {
  return simd::dot(probs_, f.span());
}

LeafSet StoppingTime::finite_set() const {
  LeafSet s(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != kNever) s.insert(i);
  }
  return s;
}

LeafSet StoppingTime::level_set(Level n) const {
  LeafSet s(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == n) s.insert(i);
  }
  return s;
}

StoppingTime constant_time(const TreeSpace& space, Level value) {
  if (value != kNever) space.check_level(value);
  return {std::vector<Level>(space.leaf_count(), value)};
}

Rv cond_exp(const TreeSpace& space, const Rv& f, int level) {
  space.check_level(level);
  if (f.size() != space.leaf_count()) {
    throw PreconditionError("random variable does not match the space");
  }
  if (level == space.depth()) return f;
  const std::size_t b = space.block_size(level);
  const std::size_t atoms = space.leaf_count() / b;
  std::vector<double> num(atoms);
  std::vector<double> den(atoms);
  simd::block_sums(space.probs(), f.span(), b, num, den);
  Rv out(std::vector<double>(space.leaf_count()));
  for (std::size_t a = 0; a < atoms; ++a) {
    const double avg = num[a] / den[a];
    for (std::size_t i = a * b; i < (a + 1) * b; ++i) out[i] = avg;
  }
  return out;
}

Rv cond_exp_weighted(const TreeSpace& space, const Rv& g, const Rv& sigma,
                     int level) {
  if (g.size() != space.leaf_count() || sigma.size() != space.leaf_count()) {
    throw PreconditionError("random variable does not match the space");
  }
  for (double s : sigma.values) {
    if (!(s > 0.0)) throw PreconditionError("weight must be positive");
  }
  space.check_level(level);
  if (level == space.depth()) return g;
  Rv gs(std::vector<double>(g.size()));
  simd::product(g.span(), sigma.span(), gs.values);
  Rv num = cond_exp(space, gs, level);
  const Rv den = cond_exp(space, sigma, level);
  for (std::size_t i = 0; i < num.size(); ++i) num[i] /= den[i];
  return num;
}

std::vector<Rv> martingale_path(const TreeSpace& space, const Rv& f) {
  std::vector<Rv> path;
  path.reserve(space.depth() + 1);
  for (int n = 0; n <= space.depth(); ++n) path.push_back(cond_exp(space, f, n));
  return path;
}

bool is_stopping_time(const TreeSpace& space, const StoppingTime& tau) {
  if (tau.values.size() != space.leaf_count()) return false;
  for (Level v : tau.values) {
    if (v != kNever && (v < 0 || v > space.depth())) return false;
  }
  for (int n = 0; n <= space.depth(); ++n) {
    const std::size_t b = space.block_size(n);
    for (std::size_t start = 0; start < space.leaf_count(); start += b) {
      const bool first = tau.values[start] == n;
      for (std::size_t i = start + 1; i < start + b; ++i) {
        if ((tau.values[i] == n) != first) return false;
      }
    }
  }
  return true;
}

bool is_ftau_measurable(const TreeSpace& space, const StoppingTime& tau,
                        const LeafSet& q) {
  for (int n = 0; n <= space.depth(); ++n) {
    const std::size_t b = space.block_size(n);
    for (std::size_t start = 0; start < space.leaf_count(); start += b) {
      std::optional<bool> seen;
      for (std::size_t i = start; i < start + b; ++i) {
        if (tau.values[i] != n) continue;
        if (seen && *seen != q.contains(i)) return false;
        seen = q.contains(i);
      }
    }
  }
  return true;
}

std::uint64_t count_stopping_times(const TreeSpace& space) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t s = 2;
  for (int n = space.depth() - 1; n >= 0; --n) {
    std::uint64_t pw = 1;
    for (int c = 0; c < space.branching(); ++c) {
      if (pw != 0 && s > kMax / pw) {
        pw = kMax;
        break;
      }
      pw *= s;
    }
    s = pw == kMax ? kMax : pw + 1;
  }
  return s;
}

namespace {

struct Node {
  int level;
  std::size_t atom;
};

class Enumerator {
 public:
  Enumerator(const TreeSpace& space,
             const std::function<bool(const StoppingTime&)>& visit)
      : space_(space), visit_(visit) {
    tau_.values.assign(space.leaf_count(), kNever);
  }

  bool run() {
    pending_.push_back({0, 0});
    return step();
  }

 private:
  void assign(const Node& node, Level v) {
    const std::size_t b = space_.block_size(node.level);
    for (std::size_t i = node.atom * b; i < (node.atom + 1) * b; ++i) {
      tau_.values[i] = v;
    }
  }

  // Resolves the last pending node in each possible way, then recurses.
  bool step() {
    if (pending_.empty()) return visit_(tau_);
    const Node node = pending_.back();
    pending_.pop_back();
    bool keep_going = true;
    if (node.level == space_.depth()) {
      assign(node, node.level);
      keep_going = step();
      if (keep_going) {
        assign(node, kNever);
        keep_going = step();
      }
    } else {
      assign(node, node.level);
      keep_going = step();
      if (keep_going) {
        assign(node, kNever);
        const std::size_t first = node.atom * space_.branching();
        for (int c = space_.branching() - 1; c >= 0; --c) {
          pending_.push_back({node.level + 1, first + c});
        }
        keep_going = step();
        pending_.resize(pending_.size() - space_.branching());
      }
    }
    pending_.push_back(node);
    return keep_going;
  }

  const TreeSpace& space_;
  const std::function<bool(const StoppingTime&)>& visit_;
  StoppingTime tau_;
  std::vector<Node> pending_;
};

void sample_node(const TreeSpace& space, int level, std::size_t atom,
                 std::mt19937_64& rng, StoppingTime& tau) {
  const bool stop_here = (rng() >> 63) != 0;
  const std::size_t b = space.block_size(level);
  if (stop_here || level == space.depth()) {
    const Level v = stop_here ? level : kNever;
    for (std::size_t i = atom * b; i < (atom + 1) * b; ++i) tau.values[i] = v;
    return;
  }
  for (int c = 0; c < space.branching(); ++c) {
    sample_node(space, level + 1, atom * space.branching() + c, rng, tau);
  }
}

}  // namespace

void for_each_stopping_time(
    const TreeSpace& space,
    const std::function<bool(const StoppingTime&)>& visit, std::uint64_t cap) {
  const std::uint64_t total = count_stopping_times(space);
  if (total > cap) {
    throw EnumerationCapError(
        "space has " + std::to_string(total) +
        " stopping times, above the enumeration cap " + std::to_string(cap) +
        "; use a sampled family");
  }
  Enumerator(space, visit).run();
}

std::vector<StoppingTime> enumerate_stopping_times(const TreeSpace& space,
                                                   std::uint64_t cap) {
  std::vector<StoppingTime> out;
  for_each_stopping_time(
      space,
      [&](const StoppingTime& t) {
        out.push_back(t);
        return true;
      },
      cap);
  return out;
}

StoppingTime sample_stopping_time(const TreeSpace& space,
                                  std::mt19937_64& rng) {
  StoppingTime tau{std::vector<Level>(space.leaf_count(), kNever)};
  sample_node(space, 0, 0, rng, tau);
  return tau;
}

StoppingTime first_exceedance(std::span<const Rv> per_level, double threshold) {
  if (per_level.empty()) return {};
  const std::size_t leaves = per_level.front().size();
  StoppingTime tau{std::vector<Level>(leaves, kNever)};
  for (std::size_t x = 0; x < leaves; ++x) {
    for (std::size_t n = 0; n < per_level.size(); ++n) {
      if (per_level[n][x] > threshold) {
        tau.values[x] = static_cast<Level>(n);
        break;
      }
    }
  }
  return tau;
}

Rv stopped_value(std::span<const Rv> path, const Rv& f,
                 const StoppingTime& tau) {
  Rv out = f;
  for (std::size_t x = 0; x < f.size(); ++x) {
    if (tau.finite_at(x)) out[x] = path[tau.values[x]][x];
  }
  return out;
}

Rv stopped_value(const TreeSpace& space, const Rv& f, const StoppingTime& tau) {
  if (!is_stopping_time(space, tau)) {
    throw PreconditionError("stopped_value needs an adapted stopping time");
  }
  return stopped_value(martingale_path(space, f), f, tau);
}

std::uint64_t for_each_in_family(
    const TreeSpace& space, const StoppingFamily& family,
    const std::function<void(const StoppingTime&)>& visit) {
  std::uint64_t visited = 0;
  if (family.exhaustive()) {
    for_each_stopping_time(
        space,
        [&](const StoppingTime& t) {
          visit(t);
          ++visited;
          return true;
        },
        family.cap);
    return visited;
  }
  std::mt19937_64 rng(family.seed);
  for (std::uint64_t i = 0; i < family.count; ++i) {
    visit(sample_stopping_time(space, rng));
    ++visited;
  }
  return visited;
}

}  // namespace infdoob
