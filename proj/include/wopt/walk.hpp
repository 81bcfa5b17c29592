#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wopt/sample_cloud.hpp"

namespace wopt {

// A covering walk over (merged) sample indices: every index appears at least
// once, consecutive entries differ, cost is the sum of squared Euclidean step
// lengths. revisit_count = order.size() - n.
struct WalkSolution {
  std::vector<int> order;
  int revisit_count = 0;
  double cost = 0.0;
  bool exact = false;
};

// All-pairs minimum squared-length walk costs through sample waypoints
// (Floyd-Warshall on the squared-distance graph). Intermediate points lower a
// pair's cost exactly when they land inside the ball whose diameter is the
// pair, which is what lets covering walks revisit points for free.
class ClosureMatrix {
public:
  ClosureMatrix(const SampleCloud& merged_cloud);

  std::size_t size() const { return n_; }
  double cost(std::size_t i, std::size_t j) const { return c_[i * n_ + j]; }

  // Expands the closure edge (i, j) into an explicit waypoint sequence
  // [i, ..., j]. Direct edges win cost ties so expansions stay hop-minimal.
  std::vector<int> path_between(std::size_t i, std::size_t j) const;

private:
  void expand(std::size_t i, std::size_t j, std::vector<int>& out) const;

  std::size_t n_ = 0;
  std::vector<double> c_;  // closure costs
  std::vector<double> d2_; // direct squared distances
};

ClosureMatrix squared_metric_closure(const SampleCloud& cloud);

inline constexpr std::size_t kExactWalkLimit = 14;

// Optimal covering walk: Held-Karp over (visited subset, last index) on the
// closure, then expansion of closure edges into explicit revisits. Throws
// size_error above `limit` distinct points.
WalkSolution exact_covering_walk(const SampleCloud& cloud, std::size_t limit = kExactWalkLimit);

// Exhaustive minimum over all covering sequences of length <= n + k_max with
// no immediate repeats. Test oracle for the exact solver; tiny n only.
WalkSolution brute_force_walk(const SampleCloud& cloud, int k_max);

// Nearest-neighbour start (seeded) + 2-opt on the closure Hamiltonian path,
// then closure-edge expansion. Deterministic given the seed.
WalkSolution heuristic_covering_walk(const SampleCloud& cloud, std::uint64_t seed);

// n * max_i sum_{j in sigma^{-1}(i)} (||X_{sigma(j-1)} - X_i|| +
// ||X_{sigma(j+1)} - X_i||) / 2, with the walk's endpoints repeated by
// convention. Minimal Lipschitz constant for which the walking generator on
// this walk is well defined.
double k_lower_bound_walk(const SampleCloud& cloud, const WalkSolution& walk);

// Best Hamiltonian-path length under plain Euclidean costs (no revisits); the
// walk bound above can never fall below it. Exact for n <= limit.
double min_permutation_path_length(const SampleCloud& cloud, std::size_t limit = kExactWalkLimit);

// Recomputes a walk's cost from the cloud and checks coverage and the
// no-immediate-repeat rule; throws domain_error on inconsistency.
double validate_walk(const SampleCloud& cloud, const WalkSolution& walk);

} // namespace wopt
