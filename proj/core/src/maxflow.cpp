#include "mpano/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "mpano/error.hpp"

namespace mpano {

MaxFlowGraph::MaxFlowGraph(int node_count, std::size_t edge_hint) {
  nodes_.resize(static_cast<std::size_t>(std::max(node_count, 0)));
  arcs_.reserve(2 * edge_hint);
}

int MaxFlowGraph::add_node() {
  nodes_.emplace_back();
  return static_cast<int>(nodes_.size()) - 1;
}

void MaxFlowGraph::add_edge(int i, int j, double cap, double rev_cap) {
  if (i < 0 || j < 0 || i >= node_count() || j >= node_count() || i == j) {
    throw Error(ErrorCode::kInvalidArgument, "bad edge endpoints");
  }
  if (!(cap >= 0.0) || !(rev_cap >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "edge capacities must be non-negative");
  }
  const int a = static_cast<int>(arcs_.size());
  arcs_.push_back({j, nodes_[i].first, cap});
  arcs_.push_back({i, nodes_[j].first, rev_cap});
  nodes_[i].first = a;
  nodes_[j].first = a + 1;
}

void MaxFlowGraph::add_terminal_weights(int i, double source_cap, double sink_cap) {
  if (!(source_cap >= 0.0) || !(sink_cap >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "terminal capacities must be non-negative");
  }
  // Only the difference matters for the cut; the common part is flow that
  // passes source -> i -> sink directly.
  const double delta = nodes_[i].tr_cap;
  if (delta > 0.0) {
    source_cap += delta;
  } else {
    sink_cap -= delta;
  }
  flow_ += std::min(source_cap, sink_cap);
  nodes_[i].tr_cap = source_cap - sink_cap;
}

void MaxFlowGraph::set_active(int i) {
  if (!nodes_[i].queued) {
    nodes_[i].queued = true;
    active_.push_back(i);
  }
}

void MaxFlowGraph::make_orphan_front(int i) {
  nodes_[i].parent = kOrphan;
  orphans_.push_front(i);
}

void MaxFlowGraph::make_orphan_back(int i) {
  nodes_[i].parent = kOrphan;
  orphans_.push_back(i);
}

// Expands the tree containing i by one layer. Returns an arc that goes from
// the source tree into the sink tree, or kNone.
int MaxFlowGraph::grow(int i) {
  Node& ni = nodes_[i];
  for (int a = ni.first; a != kNone; a = arcs_[a].next) {
    const int j = arcs_[a].head;
    Node& nj = nodes_[j];
    const double cap = ni.is_sink ? arcs_[sister(a)].r_cap : arcs_[a].r_cap;
    if (cap <= 0.0) continue;
    if (nj.parent == kNone) {
      nj.is_sink = ni.is_sink;
      nj.parent = sister(a);
      nj.ts = ni.ts;
      nj.dist = ni.dist + 1;
      set_active(j);
    } else if (nj.is_sink != ni.is_sink) {
      return ni.is_sink ? sister(a) : a;
    } else if (nj.ts <= ni.ts && nj.dist > ni.dist) {
      // shorter path to the terminal through i
      nj.parent = sister(a);
      nj.ts = ni.ts;
      nj.dist = ni.dist + 1;
    }
  }
  return kNone;
}

void MaxFlowGraph::augment(int middle) {
  double bottleneck = arcs_[middle].r_cap;

  // source side: walk from the tail of `middle` to the source
  for (int i = arcs_[sister(middle)].head;;) {
    const int a = nodes_[i].parent;
    if (a == kTerminal) {
      bottleneck = std::min(bottleneck, nodes_[i].tr_cap);
      break;
    }
    bottleneck = std::min(bottleneck, arcs_[sister(a)].r_cap);
    i = arcs_[a].head;
  }
  // sink side
  for (int i = arcs_[middle].head;;) {
    const int a = nodes_[i].parent;
    if (a == kTerminal) {
      bottleneck = std::min(bottleneck, -nodes_[i].tr_cap);
      break;
    }
    bottleneck = std::min(bottleneck, arcs_[a].r_cap);
    i = arcs_[a].head;
  }

  arcs_[sister(middle)].r_cap += bottleneck;
  arcs_[middle].r_cap -= bottleneck;

  for (int i = arcs_[sister(middle)].head;;) {
    const int a = nodes_[i].parent;
    if (a == kTerminal) {
      nodes_[i].tr_cap -= bottleneck;
      if (nodes_[i].tr_cap <= 0.0) make_orphan_front(i);
      break;
    }
    arcs_[a].r_cap += bottleneck;
    arcs_[sister(a)].r_cap -= bottleneck;
    const int parent = arcs_[a].head;
    if (arcs_[sister(a)].r_cap <= 0.0) make_orphan_front(i);
    i = parent;
  }
  for (int i = arcs_[middle].head;;) {
    const int a = nodes_[i].parent;
    if (a == kTerminal) {
      nodes_[i].tr_cap += bottleneck;
      if (nodes_[i].tr_cap >= 0.0) make_orphan_front(i);
      break;
    }
    arcs_[sister(a)].r_cap += bottleneck;
    arcs_[a].r_cap -= bottleneck;
    const int parent = arcs_[a].head;
    if (arcs_[a].r_cap <= 0.0) make_orphan_front(i);
    i = parent;
  }
  flow_ += bottleneck;
}

namespace {
constexpr int kInfiniteDist = std::numeric_limits<int>::max();
}

void MaxFlowGraph::adopt_source_orphan(int i) {
  int best_arc = kNone;
  int best_dist = kInfiniteDist;

  for (int a0 = nodes_[i].first; a0 != kNone; a0 = arcs_[a0].next) {
    if (arcs_[sister(a0)].r_cap <= 0.0) continue;
    int j = arcs_[a0].head;
    if (nodes_[j].is_sink || nodes_[j].parent == kNone) continue;

    // distance from j to the source, or infinite if j hangs off an orphan
    int d = 0;
    for (;;) {
      if (nodes_[j].ts == time_) {
        d += nodes_[j].dist;
        break;
      }
      const int a = nodes_[j].parent;
      ++d;
      if (a == kTerminal) {
        nodes_[j].ts = time_;
        nodes_[j].dist = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInfiniteDist;
        break;
      }
      j = arcs_[a].head;
    }
    if (d == kInfiniteDist) continue;
    if (d < best_dist) {
      best_arc = a0;
      best_dist = d;
    }
    // cache distances along the verified path
    for (j = arcs_[a0].head; nodes_[j].ts != time_; j = arcs_[nodes_[j].parent].head) {
      nodes_[j].ts = time_;
      nodes_[j].dist = d--;
    }
  }

  Node& ni = nodes_[i];
  if (best_arc != kNone) {
    ni.parent = best_arc;
    ni.ts = time_;
    ni.dist = best_dist + 1;
    return;
  }

  ni.ts = 0;
  for (int a0 = ni.first; a0 != kNone; a0 = arcs_[a0].next) {
    const int j = arcs_[a0].head;
    Node& nj = nodes_[j];
    if (nj.is_sink || nj.parent == kNone) continue;
    if (arcs_[sister(a0)].r_cap > 0.0) set_active(j);
    if (nj.parent != kTerminal && nj.parent != kOrphan && arcs_[nj.parent].head == i) {
      make_orphan_back(j);
    }
  }
  ni.parent = kNone;
}

void MaxFlowGraph::adopt_sink_orphan(int i) {
  int best_arc = kNone;
  int best_dist = kInfiniteDist;

  for (int a0 = nodes_[i].first; a0 != kNone; a0 = arcs_[a0].next) {
    if (arcs_[a0].r_cap <= 0.0) continue;
    int j = arcs_[a0].head;
    if (!nodes_[j].is_sink || nodes_[j].parent == kNone) continue;

    int d = 0;
    for (;;) {
      if (nodes_[j].ts == time_) {
        d += nodes_[j].dist;
        break;
      }
      const int a = nodes_[j].parent;
      ++d;
      if (a == kTerminal) {
        nodes_[j].ts = time_;
        nodes_[j].dist = 1;
        break;
      }
      if (a == kOrphan) {
        d = kInfiniteDist;
        break;
      }
      j = arcs_[a].head;
    }
    if (d == kInfiniteDist) continue;
    if (d < best_dist) {
      best_arc = a0;
      best_dist = d;
    }
    for (j = arcs_[a0].head; nodes_[j].ts != time_; j = arcs_[nodes_[j].parent].head) {
      nodes_[j].ts = time_;
      nodes_[j].dist = d--;
    }
  }

  Node& ni = nodes_[i];
  if (best_arc != kNone) {
    ni.parent = best_arc;
    ni.ts = time_;
    ni.dist = best_dist + 1;
    return;
  }

  ni.ts = 0;
  for (int a0 = ni.first; a0 != kNone; a0 = arcs_[a0].next) {
    const int j = arcs_[a0].head;
    Node& nj = nodes_[j];
    if (!nj.is_sink || nj.parent == kNone) continue;
    if (arcs_[a0].r_cap > 0.0) set_active(j);
    if (nj.parent != kTerminal && nj.parent != kOrphan && arcs_[nj.parent].head == i) {
      make_orphan_back(j);
    }
  }
  ni.parent = kNone;
}

double MaxFlowGraph::solve() {
  if (solved_) throw Error(ErrorCode::kInvalidArgument, "max-flow already solved");
  solved_ = true;

  for (int i = 0; i < node_count(); ++i) {
    Node& n = nodes_[i];
    n.ts = 0;
    n.dist = 1;
    if (n.tr_cap > 0.0) {
      n.is_sink = false;
      n.parent = kTerminal;
      set_active(i);
    } else if (n.tr_cap < 0.0) {
      n.is_sink = true;
      n.parent = kTerminal;
      set_active(i);
    } else {
      n.parent = kNone;
    }
  }

  int current = kNone;
  for (;;) {
    int i = current;
    if (i == kNone || nodes_[i].parent == kNone) {
      i = kNone;
      while (!active_.empty()) {
        const int cand = active_.front();
        active_.pop_front();
        nodes_[cand].queued = false;
        if (nodes_[cand].parent != kNone) {
          i = cand;
          break;
        }
      }
      if (i == kNone) break;
    }

    const int middle = grow(i);
    ++time_;
    if (middle == kNone) {
      current = kNone;
      continue;
    }

    current = i;
    augment(middle);
    while (!orphans_.empty()) {
      const int o = orphans_.front();
      orphans_.pop_front();
      if (nodes_[o].is_sink) {
        adopt_sink_orphan(o);
      } else {
        adopt_source_orphan(o);
      }
    }
  }
  return flow_;
}

bool MaxFlowGraph::in_source_set(int i) const {
  if (!solved_) throw Error(ErrorCode::kInvalidArgument, "max-flow not solved yet");
  return nodes_[i].parent != kNone && !nodes_[i].is_sink;
}

}  // namespace mpano
