#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "immunet/error.hpp"
#include "immunet/graph_gen.hpp"

namespace immunet {

/// Spanning directed subgraph of a multigraph: each non-loop edge {u,v}
/// independently carries an arc u->v, an arc v->u, both, or neither.
/// Self-loops carry no arcs.
class DirectedOverlay {
 public:
  static constexpr std::uint8_t kForward = 1;   // edge.u -> edge.v
  static constexpr std::uint8_t kBackward = 2;  // edge.v -> edge.u

  explicit DirectedOverlay(const Multigraph& base) : base_(&base), bits_(base.edge_count(), 0) {}

  const Multigraph& base() const noexcept { return *base_; }

  /// Number of presence slots: two per non-loop edge.
  std::size_t presence_bit_count() const {
    std::size_t c = 0;
    for (const Edge& e : base_->edges()) c += e.is_loop() ? 0 : 2;
    return c;
  }

  /// Sets or clears the arc leaving `from` along edge `e`.
  void set_arc(EdgeId e, NodeId from, bool present) {
    const Edge& ed = base_->edge(e);
    if (ed.is_loop()) return;
    const std::uint8_t mask = ed.u == from ? kForward : kBackward;
    bits_[e] = present ? (bits_[e] | mask) : (bits_[e] & ~mask);
  }

  bool has_arc(EdgeId e, NodeId from) const {
    const Edge& ed = base_->edge(e);
    if (ed.is_loop()) return false;
    return bits_[e] & (ed.u == from ? kForward : kBackward);
  }

  std::uint8_t raw_bits(EdgeId e) const { return bits_[e]; }

  std::size_t arc_count() const {
    std::size_t c = 0;
    for (auto b : bits_) c += (b & kForward ? 1 : 0) + (b & kBackward ? 1 : 0);
    return c;
  }

  /// Same base, every arc flipped.
  DirectedOverlay reversed() const {
    DirectedOverlay r(*base_);
    for (std::size_t e = 0; e < bits_.size(); ++e)
      r.bits_[e] = static_cast<std::uint8_t>(((bits_[e] & kForward) << 1) | ((bits_[e] & kBackward) >> 1));
    return r;
  }

  template <class F>
  void for_each_out(NodeId u, F&& f) const {
    for (const Incidence& inc : base_->incident(u))
      if (has_arc(inc.edge, u)) f(inc.neighbor);
  }

  template <class F>
  void for_each_in(NodeId u, F&& f) const {
    for (const Incidence& inc : base_->incident(u))
      if (has_arc(inc.edge, inc.neighbor)) f(inc.neighbor);
  }

 private:
  const Multigraph* base_;
  std::vector<std::uint8_t> bits_;
};

/// Partition of (a subset of) the nodes. Components are numbered in order of
/// their lowest node id; excluded nodes carry kExcluded.
struct ComponentPartition {
  static constexpr std::int32_t kExcluded = -1;

  std::vector<std::int32_t> component_id;
  std::vector<std::size_t> sizes;
  std::int32_t largest = kExcluded;

  std::size_t component_count() const noexcept { return sizes.size(); }
  std::size_t largest_size() const noexcept { return largest == kExcluded ? 0 : sizes[largest]; }

  std::vector<NodeId> members(std::int32_t id) const {
    std::vector<NodeId> out;
    for (NodeId u = 0; u < component_id.size(); ++u)
      if (component_id[u] == id) out.push_back(u);
    return out;
  }
};

namespace detail {

/// Renumbers raw labels by lowest member and picks the largest component
/// (ties to the lowest member).
inline ComponentPartition canonical_partition(const std::vector<std::int32_t>& raw) {
  ComponentPartition p;
  p.component_id.assign(raw.size(), ComponentPartition::kExcluded);
  std::vector<std::int32_t> remap;
  for (std::size_t u = 0; u < raw.size(); ++u) {
    const std::int32_t r = raw[u];
    if (r < 0) continue;
    if (static_cast<std::size_t>(r) >= remap.size()) remap.resize(r + 1, -1);
    if (remap[r] < 0) {
      remap[r] = static_cast<std::int32_t>(p.sizes.size());
      p.sizes.push_back(0);
    }
    p.component_id[u] = remap[r];
    ++p.sizes[remap[r]];
  }
  // Ids are assigned in order of first (lowest) member, so strict > keeps
  // the lowest-member component on ties.
  for (std::size_t c = 0; c < p.sizes.size(); ++c)
    if (p.largest < 0 || p.sizes[c] > p.sizes[p.largest]) p.largest = static_cast<std::int32_t>(c);
  return p;
}

}  // namespace detail

/// Connected components over edges whose endpoints both pass `keep`.
/// Nodes failing `keep` are excluded from the partition.
template <class Keep>
ComponentPartition undirected_components(const Multigraph& g, Keep&& keep) {
  const std::size_t n = g.node_count();
  std::vector<std::int32_t> label(n, -1);
  std::vector<NodeId> stack;
  std::int32_t next = 0;
  for (NodeId s = 0; s < n; ++s) {
    if (label[s] >= 0 || !keep(s)) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId u = stack.back();
      stack.pop_back();
      for (const Incidence& inc : g.incident(u)) {
        const NodeId v = inc.neighbor;
        if (label[v] < 0 && keep(v)) {
          label[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return detail::canonical_partition(label);
}

inline ComponentPartition undirected_components(const Multigraph& g) {
  return undirected_components(g, [](NodeId) { return true; });
}

/// Strongly connected components by Tarjan's low-link algorithm, driven by
/// an explicit call stack.
inline ComponentPartition strongly_connected_components(const DirectedOverlay& s) {
  const Multigraph& g = s.base();
  const std::size_t n = g.node_count();
  constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
  std::vector<std::int32_t> label(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<NodeId> scc_stack;
  struct Frame {
    NodeId node;
    std::size_t next_incidence;
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0;
  std::int32_t next_label = 0;

  for (NodeId root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    index[root] = low[root] = counter++;
    scc_stack.push_back(root);
    on_stack[root] = 1;
    call.push_back({root, 0});
    while (!call.empty()) {
      Frame& f = call.back();
      const NodeId u = f.node;
      auto inc = g.incident(u);
      bool descended = false;
      while (f.next_incidence < inc.size()) {
        const Incidence& e = inc[f.next_incidence++];
        if (!s.has_arc(e.edge, u)) continue;
        const NodeId v = e.neighbor;
        if (index[v] == kUnvisited) {
          index[v] = low[v] = counter++;
          scc_stack.push_back(v);
          on_stack[v] = 1;
          call.push_back({v, 0});
          descended = true;
          break;
        }
        if (on_stack[v]) low[u] = std::min(low[u], index[v]);
      }
      if (descended) continue;
      if (low[u] == index[u]) {
        NodeId w;
        do {
          w = scc_stack.back();
          scc_stack.pop_back();
          on_stack[w] = 0;
          label[w] = next_label;
        } while (w != u);
        ++next_label;
      }
      call.pop_back();
      if (!call.empty()) {
        const NodeId parent = call.back().node;
        low[parent] = std::min(low[parent], low[u]);
      }
    }
  }
  return detail::canonical_partition(label);
}

/// Membership mask plus the member list.
struct NodeSet {
  std::vector<char> contains;
  std::vector<NodeId> members;

  explicit NodeSet(std::size_t n = 0) : contains(n, 0) {}

  bool insert(NodeId u) {
    if (contains[u]) return false;
    contains[u] = 1;
    members.push_back(u);
    return true;
  }
  bool has(NodeId u) const { return contains[u] != 0; }
  std::size_t size() const noexcept { return members.size(); }

  std::vector<NodeId> sorted() const {
    auto v = members;
    std::sort(v.begin(), v.end());
    return v;
  }
};

struct InOutSets {
  NodeSet in_set;   // nodes with a directed path into the core
  NodeSet out_set;  // nodes reachable from the core
};

inline InOutSets in_out_components(const DirectedOverlay& s, std::span<const NodeId> core) {
  if (core.empty()) throw InvalidParameter("in_out_components: empty core");
  const std::size_t n = s.base().node_count();
  auto sweep = [&](bool forward) {
    NodeSet seen(n);
    std::vector<NodeId> frontier;
    for (NodeId c : core) {
      if (c >= n) throw InvalidParameter("in_out_components: core node out of range");
      if (seen.insert(c)) frontier.push_back(c);
    }
    while (!frontier.empty()) {
      const NodeId u = frontier.back();
      frontier.pop_back();
      auto visit = [&](NodeId v) {
        if (seen.insert(v)) frontier.push_back(v);
      };
      if (forward)
        s.for_each_out(u, visit);
      else
        s.for_each_in(u, visit);
    }
    return seen;
  };
  return {sweep(false), sweep(true)};
}

}  // namespace immunet
