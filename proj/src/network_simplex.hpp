#pragma once

// Network simplex specialized to the uncapacitated transportation problem on a
// complete bipartite graph. The tree bookkeeping (thread / rev_thread /
// succ_num / last_succ and the pivot update sequence) follows the classic
// LEMON network simplex. Arcs are implicit: arc a < m*n joins source a/n to
// sink a%n and its cost is produced by a callback, so memory stays O(m+n)
// regardless of the arc count. Non-tree arcs of an uncapacitated problem
// always carry zero flow, so flows are stored per node (on the arc to the
// parent) instead of per arc.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "wopt/errors.hpp"

namespace wopt::detail {

class TransportSimplex {
public:
  using CostFn = std::function<double(std::size_t, std::size_t)>; // (source, sink) -> cost

  struct Result {
    double cost = 0.0;
    double max_dual_violation = 0.0; // most negative reduced cost seen in the certificate
    std::uint64_t pivots = 0;
  };

  // supplies and demands must be nonnegative with equal sums (the caller
  // rebalances); cost(i,j) must be nonnegative.
  Result solve(const std::vector<double>& supplies, const std::vector<double>& demands,
               const CostFn& cost, double cost_scale_hint) {
    m_ = supplies.size();
    n_ = demands.size();
    if (m_ == 0 || n_ == 0) throw domain_error("transport: empty measure");
    node_count_ = m_ + n_ + 1; // + artificial root
    root_ = static_cast<Node>(m_ + n_);
    arc_count_ = static_cast<Arc>(m_) * static_cast<Arc>(n_);
    cost_ = &cost;

    parent_.assign(node_count_, -1);
    pred_arc_.assign(node_count_, -1);
    forward_.assign(node_count_, 0);
    thread_.assign(node_count_, 0);
    rev_thread_.assign(node_count_, 0);
    succ_num_.assign(node_count_, 0);
    last_succ_.assign(node_count_, 0);
    pi_.assign(node_count_, 0.0);
    flow_.assign(node_count_, 0.0);
    supply_.assign(node_count_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) supply_[i] = supplies[i];
    for (std::size_t j = 0; j < n_; ++j) supply_[m_ + j] = -demands[j];

    const double art_cost = (cost_scale_hint + 1.0) * static_cast<double>(node_count_);
    init_tree(art_cost);

    scale_ = std::max(1.0, cost_scale_hint);
    block_size_ = std::max<Arc>(
        64, static_cast<Arc>(std::sqrt(static_cast<double>(arc_count_))));
    next_arc_ = 0;

    initial_pivots();

    const std::uint64_t iter_cap =
        64ULL * static_cast<std::uint64_t>(node_count_) + (1ULL << 20);
    Result res;
    while (find_entering_arc()) {
      if (++res.pivots > iter_cap)
        throw convergence_error("transport: pivot budget exhausted", 0.0);
      pivot();
    }

    // Artificial arcs must have drained; otherwise the instance was unbalanced.
    for (Node u = 0; u < root_; ++u)
      if (pred_arc_[u] >= arc_count_ && std::fabs(flow_[u]) > 1e-9)
        throw domain_error("transport: supplies and demands do not balance");

    for (Node u = 0; u < root_; ++u) {
      if (pred_arc_[u] < arc_count_) res.cost += flow_[u] * arc_cost(pred_arc_[u]);
    }
    res.max_dual_violation = certify();
    return res;
  }

private:
  using Node = std::int64_t;
  using Arc = std::int64_t;

  std::size_t m_ = 0, n_ = 0;
  Node node_count_ = 0, root_ = 0;
  Arc arc_count_ = 0;
  const CostFn* cost_ = nullptr;
  double scale_ = 1.0;

  std::vector<Node> parent_, thread_, rev_thread_, succ_num_, last_succ_;
  std::vector<Arc> pred_arc_;
  std::vector<char> forward_; // forward_[u]: pred arc is oriented u -> parent(u)
  std::vector<double> pi_, flow_, supply_;

  Arc block_size_ = 64, next_arc_ = 0;

  // current pivot scratch
  Arc in_arc_ = -1;
  Node join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0;
  double delta_ = 0.0;

  Node arc_source(Arc a) const { return a / static_cast<Arc>(n_); }
  Node arc_target(Arc a) const { return static_cast<Node>(m_) + a % static_cast<Arc>(n_); }
  double arc_cost(Arc a) const {
    return (*cost_)(static_cast<std::size_t>(a / static_cast<Arc>(n_)),
                    static_cast<std::size_t>(a % static_cast<Arc>(n_)));
  }
  bool is_tree_arc(Arc a, Node u, Node v) const {
    return pred_arc_[u] == a || pred_arc_[v] == a;
  }

  void init_tree(double art_cost) {
    parent_[root_] = -1;
    pred_arc_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = node_count_;
    last_succ_[root_] = root_ - 1;
    pi_[root_] = 0.0;
    for (Node u = 0; u < root_; ++u) {
      parent_[u] = root_;
      pred_arc_[u] = arc_count_ + u; // artificial arc id
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      if (supply_[u] >= 0.0) {
        forward_[u] = 1; // u -> root, cost 0
        pi_[u] = 0.0;
        flow_[u] = supply_[u];
      } else {
        forward_[u] = 0; // root -> u, cost art_cost
        pi_[u] = art_cost;
        flow_[u] = -supply_[u];
      }
    }
  }

  // Sends each source's mass toward its cheapest sink first; drastically cuts
  // the number of block-search pivots on transport instances.
  void initial_pivots() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (supply_[i] <= 0.0) continue;
      std::size_t best = 0;
      double best_cost = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n_; ++j) {
        const double c = (*cost_)(i, j);
        if (c < best_cost) {
          best_cost = c;
          best = j;
        }
      }
      const Arc a = static_cast<Arc>(i) * static_cast<Arc>(n_) + static_cast<Arc>(best);
      const Node u = arc_source(a), v = arc_target(a);
      if (is_tree_arc(a, u, v)) continue;
      if (best_cost + pi_[u] - pi_[v] < 0.0) {
        in_arc_ = a;
        pivot();
      }
    }
  }

  bool find_entering_arc() {
    double min_rc = 0.0;
    Arc candidate = -1;
    Arc a = next_arc_;
    Arc remaining_in_block = block_size_;
    const double threshold = -1e-14 * scale_;
    for (Arc scanned = 0; scanned < arc_count_; ++scanned, ++a) {
      if (a == arc_count_) a = 0;
      const Node u = arc_source(a), v = arc_target(a);
      const double rc = arc_cost(a) + pi_[u] - pi_[v];
      if (rc < min_rc && !is_tree_arc(a, u, v)) {
        min_rc = rc;
        candidate = a;
      }
      if (--remaining_in_block == 0) {
        if (min_rc < threshold) {
          in_arc_ = candidate;
          next_arc_ = a + 1 == arc_count_ ? 0 : a + 1;
          return true;
        }
        remaining_in_block = block_size_;
      }
    }
    if (min_rc < threshold) {
      in_arc_ = candidate;
      next_arc_ = 0;
      return true;
    }
    return false;
  }

  void find_join() {
    Node u = arc_source(in_arc_), v = arc_target(in_arc_);
    while (u != v) {
      if (succ_num_[u] < succ_num_[v])
        u = parent_[u];
      else
        v = parent_[v];
    }
    join_ = u;
  }

  // The entering arc is always at its lower bound (flow 0), so the cycle is
  // oriented along it: source -> target.
  void find_leaving_arc() {
    const Node first = arc_source(in_arc_);
    const Node second = arc_target(in_arc_);
    delta_ = std::numeric_limits<double>::infinity();
    char side = 0;
    for (Node u = first; u != join_; u = parent_[u]) {
      if (forward_[u] && flow_[u] < delta_) {
        delta_ = flow_[u];
        u_out_ = u;
        side = 1;
      }
    }
    for (Node u = second; u != join_; u = parent_[u]) {
      if (!forward_[u] && flow_[u] <= delta_) {
        delta_ = flow_[u];
        u_out_ = u;
        side = 2;
      }
    }
    if (!std::isfinite(delta_))
      throw construction_error("transport: unbounded pivot (missing root bound)");
    if (side == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }
  }

  void change_flows() {
    if (delta_ > 0.0) {
      for (Node u = arc_source(in_arc_); u != join_; u = parent_[u])
        flow_[u] += forward_[u] ? -delta_ : delta_;
      for (Node u = arc_target(in_arc_); u != join_; u = parent_[u])
        flow_[u] += forward_[u] ? delta_ : -delta_;
    }
  }

  void relink_tree() {
    Node u = last_succ_[u_in_];
    const Node old_rev_thread = rev_thread_[u_out_];
    const Node old_succ_num = succ_num_[u_out_];
    const Node old_last_succ = last_succ_[u_out_];
    const Node v_out = parent_[u_out_];
    Node right = thread_[u];
    Node last = (old_rev_thread == v_in_) ? thread_[last_succ_[u_out_]] : thread_[v_in_];

    thread_[v_in_] = u_in_;
    dirty_revs_.clear();
    dirty_revs_.push_back(v_in_);
    Node stem = u_in_;
    Node par_stem = v_in_;
    while (stem != u_out_) {
      const Node new_stem = parent_[stem];
      thread_[u] = new_stem;
      dirty_revs_.push_back(u);

      const Node w = rev_thread_[stem];
      thread_[w] = right;
      rev_thread_[right] = w;

      parent_[stem] = par_stem;
      par_stem = stem;
      stem = new_stem;

      u = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
      right = thread_[u];
    }
    parent_[u_out_] = par_stem;
    thread_[u] = last;
    rev_thread_[last] = u;
    last_succ_[u_out_] = u;

    if (old_rev_thread != v_in_) {
      thread_[old_rev_thread] = right;
      rev_thread_[right] = old_rev_thread;
    }
    for (Node d : dirty_revs_) rev_thread_[thread_[d]] = d;

    // Move pred arcs / flows down the reversed stem. flow_ rides along with
    // the physical edge, which is pred of the deeper endpoint on each side.
    Node tmp_sc = 0;
    Node tmp_ls = last_succ_[u_out_];
    u = u_out_;
    while (u != u_in_) {
      const Node w = parent_[u];
      pred_arc_[u] = pred_arc_[w];
      flow_[u] = flow_[w];
      forward_[u] = !forward_[w];
      tmp_sc += succ_num_[u] - succ_num_[w];
      succ_num_[u] = tmp_sc;
      last_succ_[w] = tmp_ls;
      u = w;
    }
    pred_arc_[u_in_] = in_arc_;
    flow_[u_in_] = delta_;
    forward_[u_in_] = (u_in_ == arc_source(in_arc_));
    succ_num_[u_in_] = old_succ_num;

    Node up_limit_in = -1, up_limit_out = -1;
    if (last_succ_[join_] == v_in_)
      up_limit_out = join_;
    else
      up_limit_in = join_;

    for (u = v_in_; u != up_limit_in && last_succ_[u] == v_in_; u = parent_[u])
      last_succ_[u] = last_succ_[u_out_];

    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (u = v_out; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = old_rev_thread;
    } else {
      for (u = v_out; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = last_succ_[u_out_];
    }

    for (u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (u = v_out; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potentials() {
    const double c = arc_cost(pred_arc_[u_in_]);
    const double sigma =
        forward_[u_in_] ? pi_[v_in_] - pi_[u_in_] - c : pi_[v_in_] - pi_[u_in_] + c;
    const Node end = thread_[last_succ_[u_in_]];
    for (Node u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  void pivot() {
    find_join();
    find_leaving_arc();
    change_flows();
    relink_tree();
    update_potentials();
  }

  // Full dual feasibility sweep; returns the most negative reduced cost.
  double certify() const {
    double worst = 0.0;
    for (Arc a = 0; a < arc_count_; ++a) {
      const double rc = arc_cost(a) + pi_[arc_source(a)] - pi_[arc_target(a)];
      if (rc < worst) worst = rc;
    }
    return worst;
  }

  std::vector<Node> dirty_revs_;
};

} // namespace wopt::detail
