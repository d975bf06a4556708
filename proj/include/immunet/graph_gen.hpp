#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "immunet/degree_dist.hpp"
#include "immunet/error.hpp"
#include "immunet/rng.hpp"

namespace immunet {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

struct DegreeSequence {
  std::vector<Degree> degrees;

  std::uint64_t stub_count() const noexcept {
    return std::accumulate(degrees.begin(), degrees.end(), std::uint64_t{0});
  }
};

struct Edge {
  NodeId u;
  NodeId v;
  bool is_loop() const noexcept { return u == v; }
};

/// One incidence of an edge at a node: the node on the other end and the
/// edge it travels along.
struct Incidence {
  NodeId neighbor;
  EdgeId edge;
};

/// Undirected multigraph on dense ids 0..n-1. Parallel edges and self-loops
/// are kept. A self-loop adds 2 to its node's degree but never appears in
/// the incidence lists, since it cannot carry anything to another node.
class Multigraph {
 public:
  Multigraph() = default;

  Multigraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)), degree_(n, 0) {
    for (const Edge& e : edges_) {
      if (e.u >= n_ || e.v >= n_) throw InvalidParameter("edge endpoint out of range");
      degree_[e.u] += 1;
      degree_[e.v] += 1;
    }
    offsets_.assign(n_ + 1, 0);
    for (const Edge& e : edges_) {
      if (e.is_loop()) continue;
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    incidences_.resize(offsets_.back());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (EdgeId id = 0; id < edges_.size(); ++id) {
      const Edge& e = edges_[id];
      if (e.is_loop()) continue;
      incidences_[cursor[e.u]++] = {e.v, id};
      incidences_[cursor[e.v]++] = {e.u, id};
    }
  }

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }

  /// Structural degree: every edge end counts, so a self-loop counts 2.
  Degree degree(NodeId u) const { return degree_[u]; }
  std::span<const Degree> degrees() const noexcept { return degree_; }

  std::span<const Incidence> incident(NodeId u) const {
    return {incidences_.data() + offsets_[u], incidences_.data() + offsets_[u + 1]};
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<Degree> degree_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Incidence> incidences_;
};

inline constexpr int kMaxParityResamples = 10000;

/// n i.i.d. degrees from `pmf`; the whole sequence is redrawn until the
/// degree sum is even.
inline DegreeSequence sample_degree_sequence(const DegreePmf& pmf, std::size_t n, Rng& rng) {
  if (n < 2) throw InvalidParameter("degree sequence needs n >= 2");
  DegreeSequence seq;
  seq.degrees.resize(n);
  for (int attempt = 0; attempt < kMaxParityResamples; ++attempt) {
    for (auto& d : seq.degrees) d = sample_degree(pmf, rng);
    if (seq.stub_count() % 2 == 0) return seq;
  }
  throw PathologicalDistribution("no even-sum degree sequence after " + std::to_string(kMaxParityResamples) +
                                 " resamples");
}

/// Uniform random perfect matching of the stubs: shuffle the stub list and
/// pair consecutive entries.
inline Multigraph configuration_model(const DegreeSequence& seq, Rng& rng) {
  const std::uint64_t stubs_total = seq.stub_count();
  if (stubs_total % 2 != 0) throw InvariantViolation("degree sum is odd");
  std::vector<NodeId> stubs;
  stubs.reserve(stubs_total);
  for (NodeId u = 0; u < seq.degrees.size(); ++u) stubs.insert(stubs.end(), seq.degrees[u], u);
  std::shuffle(stubs.begin(), stubs.end(), rng);
  std::vector<Edge> edges;
  edges.reserve(stubs.size() / 2);
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2)
    edges.push_back({std::min(stubs[i], stubs[i + 1]), std::max(stubs[i], stubs[i + 1])});
  return Multigraph(seq.degrees.size(), std::move(edges));
}

// Edge-list format: "n m" then m lines "u v", 0-based.

inline void write_edge_list(std::ostream& os, const Multigraph& g) {
  os << g.node_count() << ' ' << g.edge_count() << '\n';
  for (const Edge& e : g.edges()) os << e.u << ' ' << e.v << '\n';
}

inline Multigraph read_edge_list(std::istream& is) {
  std::size_t n = 0, m = 0;
  if (!(is >> n >> m)) throw InvalidParameter("edge list: missing 'n m' header");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    long long u, v;
    if (!(is >> u >> v)) throw InvalidParameter("edge list: expected " + std::to_string(m) + " edges");
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
      throw InvalidParameter("edge list: endpoint out of range");
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  return Multigraph(n, std::move(edges));
}

}  // namespace immunet
