#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

namespace mpano {

// Two-terminal max-flow / min-cut over a sparse directed graph using the
// Boykov-Kolmogorov augmenting-path search (two search trees that are reused
// between augmentations). Exact for non-negative capacities.
class MaxFlowGraph {
 public:
  explicit MaxFlowGraph(int node_count = 0, std::size_t edge_hint = 0);

  int add_node();
  int node_count() const noexcept { return static_cast<int>(nodes_.size()); }

  // Arc i->j with capacity `cap` and the reverse arc j->i with `rev_cap`.
  void add_edge(int i, int j, double cap, double rev_cap);
  // Adds capacity source->i and i->sink. May be called several times per node.
  void add_terminal_weights(int i, double source_cap, double sink_cap);

  // Computes the maximum flow. Call once after the graph is complete.
  double solve();

  // After solve(): true iff the node is reachable from the source in the
  // residual graph. Nodes on the sink side of the minimum cut return false.
  bool in_source_set(int i) const;

 private:
  static constexpr int kNone = -1;
  static constexpr int kTerminal = -2;
  static constexpr int kOrphan = -3;

  struct Node {
    int first = kNone;   // first outgoing arc
    int parent = kNone;  // arc to parent, kTerminal, kOrphan or kNone
    bool is_sink = false;
    bool queued = false;
    std::int64_t ts = 0;
    int dist = 0;
    double tr_cap = 0.0;  // >0: residual from source, <0: residual to sink
  };
  struct Arc {
    int head;
    int next;
    double r_cap;
  };

  static int sister(int a) noexcept { return a ^ 1; }
  void set_active(int i);
  int grow(int i);
  void augment(int middle);
  void adopt_source_orphan(int i);
  void adopt_sink_orphan(int i);
  void make_orphan_front(int i);
  void make_orphan_back(int i);

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::deque<int> active_;
  std::deque<int> orphans_;
  std::int64_t time_ = 0;
  double flow_ = 0.0;
  bool solved_ = false;
};

}  // namespace mpano
