#include "wopt/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wopt/errors.hpp"
#include "wopt/generator.hpp"
#include "wopt/rng.hpp"

namespace wopt {

namespace {

constexpr double kTieTol = 1e-12;

std::vector<double> pairwise_squared(const SampleCloud& cloud) {
  const std::size_t n = cloud.size();
  std::vector<double> d2(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = squared_distance(cloud.point(i), cloud.point(j));
      d2[i * n + j] = v;
      d2[j * n + i] = v;
    }
  return d2;
}

WalkSolution finish_walk(std::vector<int> order, const std::vector<double>& d2, std::size_t n,
                         bool exact) {
  WalkSolution w;
  w.exact = exact;
  w.cost = 0.0;
  for (std::size_t j = 0; j + 1 < order.size(); ++j)
    w.cost += d2[static_cast<std::size_t>(order[j]) * n + static_cast<std::size_t>(order[j + 1])];
  w.revisit_count = static_cast<int>(order.size()) - static_cast<int>(n);
  w.order = std::move(order);
  return w;
}

// Hamiltonian-path Held-Karp over an n x n cost matrix; returns the optimal
// order. Deterministic: candidates are scanned in ascending index order and
// only strict improvements are taken.
std::vector<int> held_karp_path(const std::vector<double>& cost, std::size_t n) {
  if (n == 1) return {0};
  const std::size_t full = std::size_t{1} << n;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp(full * n, inf);
  std::vector<int> pred(full * n, -1);
  for (std::size_t v = 0; v < n; ++v) dp[(std::size_t{1} << v) * n + v] = 0.0;
  for (std::size_t mask = 1; mask < full; ++mask) {
    for (std::size_t last = 0; last < n; ++last) {
      if (!(mask & (std::size_t{1} << last))) continue;
      const double base = dp[mask * n + last];
      if (base == inf) continue;
      for (std::size_t nxt = 0; nxt < n; ++nxt) {
        if (mask & (std::size_t{1} << nxt)) continue;
        const std::size_t nmask = mask | (std::size_t{1} << nxt);
        double& slot = dp[nmask * n + nxt];
        const double val = base + cost[last * n + nxt];
        if (val < slot) {
          slot = val;
          pred[nmask * n + nxt] = static_cast<int>(last);
        }
      }
    }
  }
  std::size_t best_last = 0;
  double best = inf;
  for (std::size_t last = 0; last < n; ++last)
    if (dp[(full - 1) * n + last] < best) {
      best = dp[(full - 1) * n + last];
      best_last = last;
    }
  std::vector<int> order;
  std::size_t mask = full - 1, last = best_last;
  while (true) {
    order.push_back(static_cast<int>(last));
    const int p = pred[mask * n + last];
    if (p < 0) break;
    mask &= ~(std::size_t{1} << last);
    last = static_cast<std::size_t>(p);
  }
  std::reverse(order.begin(), order.end());
  return order;
}

// Expands a closure-level visiting order into an explicit walk.
WalkSolution expand_closure_order(const ClosureMatrix& closure, const std::vector<double>& d2,
                                  std::size_t n, const std::vector<int>& order, bool exact) {
  std::vector<int> walk;
  walk.push_back(order.front());
  for (std::size_t j = 0; j + 1 < order.size(); ++j) {
    const auto seg = closure.path_between(static_cast<std::size_t>(order[j]),
                                          static_cast<std::size_t>(order[j + 1]));
    walk.insert(walk.end(), seg.begin() + 1, seg.end());
  }
  return finish_walk(std::move(walk), d2, n, exact);
}

} // namespace

ClosureMatrix::ClosureMatrix(const SampleCloud& merged_cloud) : n_(merged_cloud.size()) {
  d2_ = pairwise_squared(merged_cloud);
  c_ = d2_;
  // Floyd-Warshall, index-ascending relaxation order, strict improvements
  // only. The inner loop is kept branch-light so it vectorizes.
  for (std::size_t k = 0; k < n_; ++k) {
    const double* ck = c_.data() + k * n_;
    for (std::size_t i = 0; i < n_; ++i) {
      if (i == k) continue;
      const double cik = c_[i * n_ + k];
      double* ci = c_.data() + i * n_;
      for (std::size_t j = 0; j < n_; ++j) {
        const double via = cik + ck[j];
        if (via < ci[j]) ci[j] = via;
      }
    }
  }
  for (std::size_t i = 0; i < n_; ++i) c_[i * n_ + i] = 0.0;
}

void ClosureMatrix::expand(std::size_t i, std::size_t j, std::vector<int>& out) const {
  const double cij = c_[i * n_ + j];
  // Direct edge wins ties so expansions use as few hops as possible.
  if (d2_[i * n_ + j] <= cij + kTieTol) {
    out.push_back(static_cast<int>(j));
    return;
  }
  std::size_t best = n_;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < n_; ++m) {
    if (m == i || m == j) continue;
    const double v = c_[i * n_ + m] + c_[m * n_ + j];
    if (v < best_cost - kTieTol) {
      best_cost = v;
      best = m;
    }
  }
  if (best == n_ || best_cost > cij + kTieTol)
    throw construction_error("closure expansion: no witness found");
  expand(i, best, out);
  expand(best, j, out);
}

std::vector<int> ClosureMatrix::path_between(std::size_t i, std::size_t j) const {
  std::vector<int> out{static_cast<int>(i)};
  if (i != j) expand(i, j, out);
  return out;
}

ClosureMatrix squared_metric_closure(const SampleCloud& cloud) {
  return ClosureMatrix(cloud.merged());
}

WalkSolution exact_covering_walk(const SampleCloud& cloud, std::size_t limit) {
  const SampleCloud mc = cloud.merged();
  const std::size_t n = mc.size();
  if (n > limit)
    throw size_error("exact_covering_walk: " + std::to_string(n) + " points exceed the exact limit " +
                     std::to_string(limit) + "; use heuristic_covering_walk");
  const auto d2 = pairwise_squared(mc);
  if (n == 1) return finish_walk({0}, d2, 1, true);
  const ClosureMatrix closure(mc);
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = closure.cost(i, j);
  const auto order = held_karp_path(cost, n);
  return expand_closure_order(closure, d2, n, order, true);
}

WalkSolution brute_force_walk(const SampleCloud& cloud, int k_max) {
  const SampleCloud mc = cloud.merged();
  const std::size_t n = mc.size();
  if (n > 7 || k_max > 3)
    throw size_error("brute_force_walk: enumeration limited to n <= 7, k_max <= 3");
  const auto d2 = pairwise_squared(mc);
  if (n == 1) return finish_walk({0}, d2, 1, true);

  const std::size_t max_len = n + static_cast<std::size_t>(std::max(0, k_max));
  std::vector<int> seq;
  std::vector<int> seen(n, 0);
  std::vector<int> best_seq;
  double best = std::numeric_limits<double>::infinity();
  std::size_t covered = 0;

  auto dfs = [&](auto&& self, double acc) -> void {
    if (acc >= best) return;
    if (covered == n) {
      best = acc;
      best_seq = seq;
      return; // extending a covering walk only adds cost
    }
    if (seq.size() == max_len) return;
    for (std::size_t v = 0; v < n; ++v) {
      if (!seq.empty() && seq.back() == static_cast<int>(v)) continue;
      const double step =
          seq.empty() ? 0.0 : d2[static_cast<std::size_t>(seq.back()) * n + v];
      seq.push_back(static_cast<int>(v));
      if (++seen[v] == 1) ++covered;
      self(self, acc + step);
      if (--seen[v] == 0) --covered;
      seq.pop_back();
    }
  };
  dfs(dfs, 0.0);
  return finish_walk(std::move(best_seq), d2, n, true);
}

WalkSolution heuristic_covering_walk(const SampleCloud& cloud, std::uint64_t seed) {
  const SampleCloud mc = cloud.merged();
  const std::size_t n = mc.size();
  const auto d2 = pairwise_squared(mc);
  if (n <= 2) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    return finish_walk(std::move(order), d2, n, n == 1);
  }
  const ClosureMatrix closure(mc);
  auto cl = [&](int a, int b) {
    return closure.cost(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  };

  // Nearest-neighbour construction from a seeded start.
  Rng rng(seed_combine(seed, 0x77a1ULL));
  std::vector<int> order;
  order.reserve(n);
  std::vector<char> used(n, 0);
  int cur = static_cast<int>(rng.below(n));
  order.push_back(cur);
  used[static_cast<std::size_t>(cur)] = 1;
  for (std::size_t step = 1; step < n; ++step) {
    int best = -1;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < n; ++v)
      if (!used[v] && cl(cur, static_cast<int>(v)) < best_cost) {
        best_cost = cl(cur, static_cast<int>(v));
        best = static_cast<int>(v);
      }
    order.push_back(best);
    used[static_cast<std::size_t>(best)] = 1;
    cur = best;
  }

  // 2-opt on the closure Hamiltonian path: reverse order[a..b].
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t a = 0; a + 1 < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double before = (a > 0 ? cl(order[a - 1], order[a]) : 0.0) +
                              (b + 1 < n ? cl(order[b], order[b + 1]) : 0.0);
        const double after = (a > 0 ? cl(order[a - 1], order[b]) : 0.0) +
                             (b + 1 < n ? cl(order[a], order[b + 1]) : 0.0);
        if (after < before - kTieTol) {
          std::reverse(order.begin() + static_cast<std::ptrdiff_t>(a),
                       order.begin() + static_cast<std::ptrdiff_t>(b) + 1);
          improved = true;
        }
      }
    }
  }

  return expand_closure_order(closure, d2, n, order, false);
}

double validate_walk(const SampleCloud& cloud, const WalkSolution& walk) {
  const SampleCloud mc = cloud.merged();
  const std::size_t n = mc.size();
  if (walk.order.empty()) throw domain_error("walk: empty order");
  std::vector<char> seen(n, 0);
  for (std::size_t j = 0; j < walk.order.size(); ++j) {
    const int v = walk.order[j];
    if (v < 0 || static_cast<std::size_t>(v) >= n)
      throw domain_error("walk: index out of range");
    if (j > 0 && walk.order[j - 1] == v)
      throw domain_error("walk: immediate repeat at position " + std::to_string(j));
    seen[static_cast<std::size_t>(v)] = 1;
  }
  for (std::size_t v = 0; v < n; ++v)
    if (!seen[v]) throw domain_error("walk: point " + std::to_string(v) + " is never visited");
  double cost = 0.0;
  for (std::size_t j = 0; j + 1 < walk.order.size(); ++j)
    cost += squared_distance(mc.point(static_cast<std::size_t>(walk.order[j])),
                             mc.point(static_cast<std::size_t>(walk.order[j + 1])));
  return cost;
}

double k_lower_bound_walk(const SampleCloud& cloud, const WalkSolution& walk) {
  const SampleCloud mc = cloud.merged();
  const std::size_t n = mc.size();
  const double recomputed = validate_walk(cloud, walk);
  if (std::fabs(recomputed - walk.cost) > 1e-9 * std::max(1.0, recomputed))
    throw domain_error("walk: stored cost disagrees with its own step lengths");
  if (n == 1) return 0.0;

  const std::size_t len = walk.order.size();
  auto at = [&](std::ptrdiff_t j) {
    // Endpoint convention: the walk starts and ends standing still.
    if (j < 0) j = 0;
    if (j >= static_cast<std::ptrdiff_t>(len)) j = static_cast<std::ptrdiff_t>(len) - 1;
    return static_cast<std::size_t>(walk.order[static_cast<std::size_t>(j)]);
  };
  std::vector<double> visit_sum(n, 0.0);
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(len); ++j) {
    const std::size_t i = at(j);
    visit_sum[i] += 0.5 * (distance(mc.point(at(j - 1)), mc.point(i)) +
                           distance(mc.point(at(j + 1)), mc.point(i)));
  }
  const double bound =
      static_cast<double>(n) * *std::max_element(visit_sum.begin(), visit_sum.end());

  if (n <= kExactWalkLimit) {
    const double perm = min_permutation_path_length(cloud);
    if (bound < perm - kGeomTol)
      throw construction_error("k_lower_bound_walk: bound fell below the permutation-path length");
  }
  return bound;
}

double min_permutation_path_length(const SampleCloud& cloud, std::size_t limit) {
  const SampleCloud mc = cloud.merged();
  const std::size_t n = mc.size();
  if (n > limit) throw size_error("min_permutation_path_length: instance too large");
  if (n == 1) return 0.0;
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = distance(mc.point(i), mc.point(j));
  const auto order = held_karp_path(dist, n);
  double len = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j)
    len += dist[static_cast<std::size_t>(order[j]) * n + static_cast<std::size_t>(order[j + 1])];
  return len;
}

} // namespace wopt
