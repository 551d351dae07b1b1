#include "pmod/max_flow.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "pmod/error.hpp"

namespace pmod {

MaxFlow::MaxFlow(int nodes) : head_(static_cast<std::size_t>(nodes)) {}

void MaxFlow::push_arc(int u, int v, double cap, double back) {
  if (u < 0 || v < 0 || u >= num_nodes() || v >= num_nodes() || u == v) throw InvalidInput("bad max-flow edge");
  if (cap < 0 || back < 0) throw InvalidInput("negative capacity");
  const int ru = static_cast<int>(head_[v].size());
  const int rv = static_cast<int>(head_[u].size());
  head_[u].push_back({v, ru, cap});
  head_[v].push_back({u, rv, back});
}

void MaxFlow::add_undirected(int u, int v, double cap) { push_arc(u, v, cap, cap); }
void MaxFlow::add_directed(int u, int v, double cap) { push_arc(u, v, cap, 0.0); }

double MaxFlow::solve(int s, int t) {
  const int n = num_nodes();
  sink_ = t;
  double total = 0.0;
  for (const auto& arcs : head_) {
    for (const auto& a : arcs) total = std::max(total, a.residual);
  }
  eps_ = 1e-13 * std::max(total, 1e-300);

  // Exact distance labels from a backward BFS; unreachable nodes sit at n.
  std::vector<int> height(static_cast<std::size_t>(n), n);
  std::vector<double> excess(static_cast<std::size_t>(n), 0.0);
  auto global_relabel = [&]() {
    std::fill(height.begin(), height.end(), 2 * n);
    std::deque<int> queue{t};
    height[t] = 0;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (const auto& a : head_[v]) {
        const auto& back = head_[a.to][a.rev];
        if (back.residual > eps_ && height[a.to] == 2 * n && a.to != s) {
          height[a.to] = height[v] + 1;
          queue.push_back(a.to);
        }
      }
    }
    height[s] = n;
  };
  global_relabel();

  std::vector<std::vector<int>> bucket(static_cast<std::size_t>(2 * n + 1));
  std::vector<std::size_t> current(static_cast<std::size_t>(n), 0);
  int top = -1;
  auto activate = [&](int v) {
    if (v == s || v == t || height[v] >= 2 * n) return;
    bucket[height[v]].push_back(v);
    top = std::max(top, height[v]);
  };
  for (auto& a : head_[s]) {
    if (a.residual <= 0) continue;
    const double d = a.residual;
    a.residual = 0;
    head_[a.to][a.rev].residual += d;
    const bool was_active = excess[a.to] > eps_;
    excess[a.to] += d;
    excess[s] -= d;
    if (!was_active) activate(a.to);
  }

  std::size_t work = 0;
  while (top >= 0) {
    if (bucket[top].empty()) {
      --top;
      continue;
    }
    const int v = bucket[top].back();
    bucket[top].pop_back();
    if (height[v] != top || excess[v] <= eps_) continue;
    // Discharge v.
    while (excess[v] > eps_) {
      if (current[v] == head_[v].size()) {
        int best = 2 * n;
        for (const auto& a : head_[v]) {
          if (a.residual > eps_) best = std::min(best, height[a.to] + 1);
        }
        height[v] = std::min(best, 2 * n);
        current[v] = 0;
        ++work;
        if (height[v] >= 2 * n) break;
        continue;
      }
      auto& a = head_[v][current[v]];
      if (a.residual > eps_ && height[v] == height[a.to] + 1) {
        const double d = std::min(excess[v], a.residual);
        a.residual -= d;
        head_[a.to][a.rev].residual += d;
        const bool was_active = excess[a.to] > eps_;
        excess[v] -= d;
        excess[a.to] += d;
        if (!was_active) activate(a.to);
      } else {
        ++current[v];
      }
    }
    if (excess[v] > eps_) activate(v);
    if (work > static_cast<std::size_t>(4 * n)) {
      work = 0;
      global_relabel();
      std::fill(current.begin(), current.end(), 0);
      for (auto& b : bucket) b.clear();
      top = -1;
      for (int u = 0; u < n; ++u) {
        if (excess[u] > eps_) activate(u);
      }
    }
  }
  return excess[t];
}

std::vector<bool> MaxFlow::source_side() const {
  if (sink_ < 0) throw InternalError("source_side before solve");
  std::vector<bool> reach_t(head_.size(), false);
  std::deque<int> queue{sink_};
  reach_t[sink_] = true;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (const auto& a : head_[v]) {
      const auto& back = head_[a.to][a.rev];
      if (!reach_t[a.to] && back.residual > eps_) {
        reach_t[a.to] = true;
        queue.push_back(a.to);
      }
    }
  }
  std::vector<bool> side(head_.size());
  for (std::size_t i = 0; i < side.size(); ++i) side[i] = !reach_t[i];
  return side;
}

}  // namespace pmod
