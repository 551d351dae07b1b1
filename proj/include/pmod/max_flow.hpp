#pragma once

#include <cstddef>
#include <vector>

namespace pmod {

// Highest-label push-relabel on a capacitated graph. Deterministic: nodes and
// arcs are scanned in insertion order.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes);

  // Undirected edge of capacity `cap` in both directions.
  void add_undirected(int u, int v, double cap);
  void add_directed(int u, int v, double cap);

  // Value of a maximum preflow into `t` (= max flow value).
  double solve(int s, int t);

  // Nodes that cannot reach `t` in the residual graph; the arcs leaving this
  // set form a minimum cut. Valid after solve().
  std::vector<bool> source_side() const;

  int num_nodes() const { return static_cast<int>(head_.size()); }

 private:
  struct Arc {
    int to;
    int rev;
    double residual;
  };
  void push_arc(int u, int v, double cap, double back);

  std::vector<std::vector<Arc>> head_;
  int sink_ = -1;
  double eps_ = 0.0;
};

}  // namespace pmod
