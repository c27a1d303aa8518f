#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <unordered_map>
#include <utility>
#include <vector>

#include "antplan/distribution.hpp"
#include "antplan/grid.hpp"
#include "antplan/world.hpp"

namespace antplan::testkit {

/// Explicit state graph: every state reachable from a start state.
struct StateSpace {
  std::vector<WorldState> states;  ///< states[0] is the start
  std::vector<std::vector<std::pair<int, Cost>>> succ;
  std::unordered_map<WorldState, int, WorldStateHash> index;
};

inline StateSpace enumerate_states(const WorldState& s0) {
  StateSpace sp;
  sp.states.push_back(s0);
  sp.index.emplace(s0, 0);
  for (std::size_t i = 0; i < sp.states.size(); ++i) {
    std::vector<std::pair<int, Cost>> out;
    const WorldState current = sp.states[i];
    for_each_successor(current, [&](const GroundedAction& a, WorldState&& next) {
      auto [it, inserted] = sp.index.emplace(next, static_cast<int>(sp.states.size()));
      if (inserted) sp.states.push_back(std::move(next));
      out.emplace_back(it->second, a.cost);
    });
    sp.succ.push_back(std::move(out));
  }
  return sp;
}

/// Dijkstra over the explicit graph from `sources` (cost zero), forward or
/// along reversed edges.
inline std::vector<Cost> graph_dijkstra(const StateSpace& sp, const std::vector<int>& sources, bool reverse) {
  const std::size_t n = sp.states.size();
  std::vector<std::vector<std::pair<int, Cost>>> adj;
  if (reverse) {
    adj.resize(n);
    for (std::size_t u = 0; u < n; ++u)
      for (auto [v, c] : sp.succ[u]) adj[v].emplace_back(static_cast<int>(u), c);
  }
  const auto& edges = reverse ? adj : sp.succ;
  std::vector<Cost> dist(n, Cost::infinite());
  using Item = std::pair<std::int64_t, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  for (int s : sources) {
    dist[s] = Cost::zero();
    open.emplace(0, s);
  }
  while (!open.empty()) {
    auto [d, u] = open.top();
    open.pop();
    if (d != dist[u].milli()) continue;
    for (auto [v, c] : edges[u]) {
      const Cost nd = dist[u] + c;
      if (nd < dist[v]) {
        dist[v] = nd;
        open.emplace(nd.milli(), v);
      }
    }
  }
  return dist;
}

/// Optimal cost from every state of `sp` to the goal of `task`.
inline std::vector<Cost> cost_to_go(const StateSpace& sp, const TaskSpec& task) {
  std::vector<int> goals;
  for (std::size_t i = 0; i < sp.states.size(); ++i)
    if (satisfies(sp.states[i], task)) goals.push_back(static_cast<int>(i));
  return graph_dijkstra(sp, goals, true);
}

/// Uniform-cost search from `s0` to the first goal state; infinite when none is reachable.
inline Cost ucs_cost(const WorldState& s0, const TaskSpec& task) {
  std::unordered_map<WorldState, std::int64_t, WorldStateHash> best;
  std::vector<WorldState> store{s0};
  using Item = std::pair<std::int64_t, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  best.emplace(s0, 0);
  open.emplace(0, 0);
  while (!open.empty()) {
    auto [d, i] = open.top();
    open.pop();
    const WorldState s = store[i];
    if (best.at(s) != d) continue;
    if (satisfies(s, task)) return Cost::from_milli(d);
    for_each_successor(s, [&](const GroundedAction& a, WorldState&& next) {
      const std::int64_t nd = d + a.cost.milli();
      auto it = best.find(next);
      if (it != best.end() && it->second <= nd) return;
      best[next] = nd;
      store.push_back(std::move(next));
      open.emplace(nd, store.size() - 1);
    });
  }
  return Cost::infinite();
}

/// Rounds to six decimals, the comparison precision for totals.
inline double round6(double v) { return std::round(v * 1e6) / 1e6; }

/// Σ weight · cost-to-go at state `i`, in distribution order.
inline double expected_cost(const std::vector<std::vector<Cost>>& to_go, const TaskDistribution& dist, int i) {
  double total = 0.0;
  for (std::size_t t = 0; t < dist.entries.size(); ++t) total += dist.entries[t].weight * to_go[t][i].units();
  return total;
}

/// Minimum over reachable goal states s of g(s0 → s) + Σ w · V_t(s), by enumeration.
/// Goal states that leave a distribution task unsolvable score infinite.
inline double brute_force_anticipatory(const WorldState& s0, const TaskSpec& task, const TaskDistribution& dist) {
  const StateSpace sp = enumerate_states(s0);
  const auto g = graph_dijkstra(sp, {0}, false);
  std::vector<std::vector<Cost>> to_go;
  for (const auto& e : dist.entries) to_go.push_back(cost_to_go(sp, e.task));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sp.states.size(); ++i) {
    if (g[i].is_infinite() || !satisfies(sp.states[i], task)) continue;
    best = std::min(best, g[i].units() + expected_cost(to_go, dist, static_cast<int>(i)));
  }
  return best;
}

/// Breadth-first step counts on a 4-connected grid.
inline std::vector<int> bfs_steps(const OccupancyGrid& g, Cell source) {
  std::vector<int> d(g.size(), -1);
  if (!g.free(source)) return d;
  std::queue<Cell> q;
  d[g.index(source)] = 0;
  q.push(source);
  const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop();
    for (int k = 0; k < 4; ++k) {
      const Cell n{c.x + dx[k], c.y + dy[k]};
      if (g.free(n) && d[g.index(n)] < 0) {
        d[g.index(n)] = d[g.index(c)] + 1;
        q.push(n);
      }
    }
  }
  return d;
}

}  // namespace antplan::testkit
