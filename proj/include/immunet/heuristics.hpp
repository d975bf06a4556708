#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <numeric>
#include <vector>

#include "immunet/degree_dist.hpp"
#include "immunet/error.hpp"
#include "immunet/graph_gen.hpp"
#include "immunet/rng.hpp"

namespace immunet {

/// Forwarding probability h(a, b) for a sender of degree a and a receiver of
/// degree b.
template <class H>
concept Heuristic = requires(const H& h, Degree a, Degree b) {
  { h(a, b) } -> std::convertible_to<double>;
};

/// Favors forwarding toward high-degree receivers and damps high-degree
/// senders. Case order matters: the tanh branch is only reached for a >= 3,
/// where (a-2)^alpha >= 1.
class TanhHeuristic {
 public:
  explicit TanhHeuristic(double alpha = 1.0) : alpha_(alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidParameter("alpha must be >= 0");
  }

  double alpha() const noexcept { return alpha_; }

  double operator()(Degree a, Degree b) const {
    if (a == 0 || b == 0) return 0.0;
    if (b == 1) return 0.0;
    if (a <= 2) return 1.0;  // b >= 2 here
    const double denom = std::pow(static_cast<double>(a - 2), alpha_);
    return std::tanh(static_cast<double>(b - 1) / denom);
  }

 private:
  double alpha_;
};

/// Same probability for every pair; 0 and 1 give the degenerate cases.
struct ConstantHeuristic {
  double value;
  double operator()(Degree, Degree) const { return value; }
};

/// h'(a, b) = h(b, a).
template <Heuristic H>
struct SwappedHeuristic {
  H inner;
  double operator()(Degree a, Degree b) const { return inner(b, a); }
};

template <Heuristic H>
SwappedHeuristic<H> swapped(H h) {
  return {std::move(h)};
}

// Baseline strategies. Each returns a sorted list of distinct nodes.

inline std::vector<NodeId> random_immunization(const Multigraph& g, double fraction, Rng& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw InvalidParameter("fraction must be in [0,1]");
  const std::size_t n = g.node_count();
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  std::vector<NodeId> all(n);
  std::iota(all.begin(), all.end(), NodeId{0});
  std::vector<NodeId> picked;
  picked.reserve(k);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), k, rng);
  return picked;
}

inline std::vector<NodeId> degree_threshold_immunization(const Multigraph& g, Degree threshold) {
  std::vector<NodeId> out;
  for (NodeId u = 0; u < g.node_count(); ++u)
    if (g.degree(u) > threshold) out.push_back(u);
  return out;
}

/// Samples floor(node_fraction * n) nodes and, for each, immunizes
/// ceil(neighbor_fraction * degree) distinct neighbors (capped by the
/// number of distinct neighbors).
inline std::vector<NodeId> acquaintance_immunization(const Multigraph& g, double node_fraction,
                                                     double neighbor_fraction, Rng& rng) {
  if (!(neighbor_fraction >= 0.0 && neighbor_fraction <= 1.0))
    throw InvalidParameter("neighbor fraction must be in [0,1]");
  const auto seeds = random_immunization(g, node_fraction, rng);
  std::vector<char> chosen(g.node_count(), 0);
  std::vector<NodeId> nbrs;
  for (NodeId s : seeds) {
    nbrs.clear();
    for (const Incidence& inc : g.incident(s)) nbrs.push_back(inc.neighbor);
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    auto k = static_cast<std::size_t>(std::ceil(neighbor_fraction * static_cast<double>(g.degree(s))));
    k = std::min(k, nbrs.size());
    std::vector<NodeId> pick;
    std::sample(nbrs.begin(), nbrs.end(), std::back_inserter(pick), k, rng);
    for (NodeId v : pick) chosen[v] = 1;
  }
  std::vector<NodeId> out;
  for (NodeId u = 0; u < g.node_count(); ++u)
    if (chosen[u]) out.push_back(u);
  return out;
}

}  // namespace immunet
