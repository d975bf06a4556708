#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "immunet/analytic.hpp"
#include "immunet/components.hpp"
#include "immunet/degree_dist.hpp"
#include "immunet/error.hpp"
#include "immunet/graph_gen.hpp"
#include "immunet/heuristics.hpp"
#include "immunet/rng.hpp"

namespace immunet {

/// Draws every arc of the overlay independently: u->v with probability
/// h(deg u, deg v) and v->u with h(deg v, deg u), once per parallel copy.
template <Heuristic H>
DirectedOverlay sample_overlay(const Multigraph& g, const H& h, Rng& rng) {
  DirectedOverlay s(g);
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (ed.is_loop()) continue;
    const Degree du = g.degree(ed.u), dv = g.degree(ed.v);
    s.set_arc(e, ed.u, bernoulli(rng, h(du, dv)));
    s.set_arc(e, ed.v, bernoulli(rng, h(dv, du)));
  }
  return s;
}

/// Breadth-first flooding from `originator`. Each node, on first receipt,
/// asks `coin(edge, from, to)` once per incident non-loop edge copy and
/// forwards where it returns true. Later receipts are ignored.
template <class Coin>
NodeSet flood_with(const Multigraph& g, NodeId originator, Coin&& coin) {
  if (originator >= g.node_count()) throw InvalidParameter("flood: originator out of range");
  NodeSet got(g.node_count());
  got.insert(originator);
  for (std::size_t head = 0; head < got.members.size(); ++head) {
    const NodeId u = got.members[head];
    for (const Incidence& inc : g.incident(u))
      if (coin(inc.edge, u, inc.neighbor)) got.insert(inc.neighbor);
  }
  return got;
}

/// Returns every node that received the vaccine, originator included.
template <Heuristic H>
NodeSet flood(const Multigraph& g, const H& h, NodeId originator, Rng& rng) {
  return flood_with(g, originator, [&](EdgeId, NodeId from, NodeId to) {
    return bernoulli(rng, h(g.degree(from), g.degree(to)));
  });
}

struct OverlayStats {
  std::size_t gscc_size;
  std::size_t gin_size;
  std::size_t gout_size;
  std::size_t gcc_size;
};

/// Largest SCC of the overlay, the in/out sets around it, and the largest
/// undirected component of the base graph.
inline OverlayStats overlay_stats(const Multigraph&, const DirectedOverlay& s, std::size_t gcc_size) {
  const auto scc = strongly_connected_components(s);
  const auto core = scc.members(scc.largest);
  const auto io = in_out_components(s, core);
  return {core.size(), io.in_set.size(), io.out_set.size(), gcc_size};
}

inline OverlayStats overlay_stats(const Multigraph& g, const DirectedOverlay& s) {
  return overlay_stats(g, s, undirected_components(g).largest_size());
}

/// Fraction of the giant component an infection starting at `target` can
/// reach through non-immunized nodes.
inline double measure_vulnerability(const Multigraph& g, const NodeSet& gcc, const NodeSet& immunized,
                                    NodeId target) {
  if (target >= g.node_count() || !gcc.has(target))
    throw InvalidParameter("measure_vulnerability: target outside the giant component");
  if (immunized.has(target)) return 0.0;
  NodeSet reach(g.node_count());
  reach.insert(target);
  for (std::size_t head = 0; head < reach.members.size(); ++head) {
    for (const Incidence& inc : g.incident(reach.members[head])) {
      const NodeId v = inc.neighbor;
      if (!immunized.has(v) && gcc.has(v)) reach.insert(v);
    }
  }
  return static_cast<double>(reach.size()) / static_cast<double>(gcc.size());
}

struct TrialOutcome {
  double spread_fraction;
  double vulnerability_fraction;
  bool originator_in_gin;
};

struct ExperimentConfig {
  std::size_t n = 10000;
  std::vector<double> tau_values{2.1};
  std::vector<double> alpha_values{1.0};
  std::size_t num_graphs = 20;
  std::size_t trials_per_graph = 200;
  std::size_t overlay_samples_per_graph = 200;
  std::uint64_t master_seed = 1;
  Degree dmax = 0;  // 0 means n - 1
  bool with_analytic = true;
  FixedPointConfig solver{};
  unsigned threads = 1;  // worker cap; results do not depend on it

  Degree effective_dmax() const { return dmax == 0 ? static_cast<Degree>(n - 1) : dmax; }

  void validate() const {
    if (n < 3) throw InvalidParameter("n must be >= 3");
    if (tau_values.empty() || alpha_values.empty()) throw InvalidParameter("tau and alpha lists must be non-empty");
    for (double t : tau_values)
      if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("tau values must be > 0");
    for (double a : alpha_values)
      if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidParameter("alpha values must be >= 0");
    if (num_graphs < 1 || trials_per_graph < 1 || overlay_samples_per_graph < 1)
      throw InvalidParameter("graph, trial and overlay counts must be >= 1");
    if (effective_dmax() < 2) throw InvalidParameter("dmax must be >= 2");
    if (threads < 1) throw InvalidParameter("threads must be >= 1");
  }
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

/// Mean and standard error of the mean, summed in index order.
inline MeanSe mean_se(std::span<const double> xs) {
  MeanSe m;
  m.count = xs.size();
  if (xs.empty()) return {std::nan(""), std::nan(""), 0};
  double s = 0.0;
  for (double x : xs) s += x;
  m.mean = s / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return m;
}

struct AnalyticPrediction {
  double gin_gcc;
  double gout_gcc;
  double spread;
  double vulnerability;
  double gcc;
  long iterations;  // summed over all solves
  double max_residual;
  std::size_t guard_activations;
};

struct CellSummary {
  double tau = 0.0;
  double alpha = 0.0;
  std::size_t n = 0;
  std::size_t num_graphs = 0;
  std::size_t trials = 0;
  std::size_t overlay_samples = 0;
  MeanSe gin_gcc, gout_gcc, spread, vulnerability;
  MeanSe gcc_fraction;  // realized |GCC| / n, one value per graph
  double originator_in_gin_rate = std::nan("");
  std::optional<AnalyticPrediction> analytic;
  std::string error;           // simulation failure, empty on success
  std::string analytic_error;  // solver failure, empty on success
  double wall_seconds = 0.0;

  bool ok() const { return error.empty(); }
};

struct ExperimentSummary {
  ExperimentConfig config;
  std::vector<CellSummary> cells;
};

/// Stream tags mixed into derived seeds next to (tau, alpha, graph, task).
enum class Stream : std::uint64_t { kGraph = 1, kOverlay = 2, kTrial = 3 };

inline std::uint64_t task_seed(std::uint64_t master, std::size_t tau_idx, std::size_t alpha_idx, std::size_t graph,
                               Stream stream, std::size_t task) {
  return derive_seed(master, {tau_idx, alpha_idx, graph, static_cast<std::uint64_t>(stream), task});
}

namespace detail {

struct GraphSamples {
  std::vector<double> gin_gcc, gout_gcc, spread, vulnerability;
  std::size_t in_gin = 0;
  double gcc_fraction = 0.0;
  std::string error;
};

/// One dissemination plus one infection probe. The flood's coins are kept in
/// an overlay that is then completed with fresh coins for arcs leaving
/// non-recipients, which yields an overlay distributed exactly as
/// sample_overlay and coupled to this flood.
template <Heuristic H>
TrialOutcome run_trial(const Multigraph& g, const H& h, const NodeSet& gcc, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, gcc.size() - 1);
  const NodeId originator = gcc.members[pick(rng)];
  DirectedOverlay s(g);
  const NodeSet immunized = flood_with(g, originator, [&](EdgeId e, NodeId from, NodeId to) {
    const bool sent = bernoulli(rng, h(g.degree(from), g.degree(to)));
    s.set_arc(e, from, sent);
    return sent;
  });
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (ed.is_loop()) continue;
    if (!immunized.has(ed.u)) s.set_arc(e, ed.u, bernoulli(rng, h(g.degree(ed.u), g.degree(ed.v))));
    if (!immunized.has(ed.v)) s.set_arc(e, ed.v, bernoulli(rng, h(g.degree(ed.v), g.degree(ed.u))));
  }
  const auto scc = strongly_connected_components(s);
  bool in_gin = false;
  for (NodeId u : immunized.members)
    if (scc.component_id[u] == scc.largest) {
      in_gin = true;
      break;
    }
  std::size_t in_gcc = 0;
  for (NodeId u : immunized.members) in_gcc += gcc.has(u) ? 1 : 0;
  const NodeId target = gcc.members[pick(rng)];
  return {static_cast<double>(in_gcc) / static_cast<double>(gcc.size()),
          measure_vulnerability(g, gcc, immunized, target), in_gin};
}

template <class MakeHeuristic>
GraphSamples run_graph(const ExperimentConfig& cfg, const DegreePmf& pmf, const MakeHeuristic& make, std::size_t ti,
                       std::size_t ai, std::size_t graph) {
  GraphSamples out;
  const auto h = make(cfg.alpha_values[ai]);
  Rng grng(task_seed(cfg.master_seed, ti, ai, graph, Stream::kGraph, 0));
  const auto seq = sample_degree_sequence(pmf, cfg.n, grng);
  const Multigraph g = configuration_model(seq, grng);
  const auto parts = undirected_components(g);
  NodeSet gcc(g.node_count());
  for (NodeId u : parts.members(parts.largest)) gcc.insert(u);
  const double gcc_size = static_cast<double>(gcc.size());
  out.gcc_fraction = gcc_size / static_cast<double>(g.node_count());

  for (std::size_t k = 0; k < cfg.overlay_samples_per_graph; ++k) {
    Rng rng(task_seed(cfg.master_seed, ti, ai, graph, Stream::kOverlay, k));
    const auto s = sample_overlay(g, h, rng);
    const auto st = overlay_stats(g, s, gcc.size());
    out.gin_gcc.push_back(static_cast<double>(st.gin_size) / gcc_size);
    out.gout_gcc.push_back(static_cast<double>(st.gout_size) / gcc_size);
  }
  for (std::size_t t = 0; t < cfg.trials_per_graph; ++t) {
    Rng rng(task_seed(cfg.master_seed, ti, ai, graph, Stream::kTrial, t));
    const auto tr = run_trial(g, h, gcc, rng);
    out.spread.push_back(tr.spread_fraction);
    out.vulnerability.push_back(tr.vulnerability_fraction);
    out.in_gin += tr.originator_in_gin ? 1 : 0;
  }
  return out;
}

/// Runs f(i) for i in [0, count) on up to `threads` workers.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& f) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) f(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// Monte Carlo sweep over every (tau, alpha) cell. Per-graph work runs in
/// parallel; every unit seeds its own generator through task_seed and
/// results are reduced in (cell, graph, sample) order, so the summary is a
/// function of the configuration alone. `make(alpha)` supplies the
/// heuristic for both the simulation and the analytic prediction.
template <class MakeHeuristic>
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const MakeHeuristic& make) {
  cfg.validate();
  ExperimentSummary summary{cfg, {}};
  const std::size_t ntau = cfg.tau_values.size(), nalpha = cfg.alpha_values.size();
  const std::size_t ncells = ntau * nalpha;

  std::vector<std::optional<DegreePmf>> pmfs(ntau);
  std::vector<std::string> pmf_errors(ntau);
  for (std::size_t ti = 0; ti < ntau; ++ti) {
    try {
      pmfs[ti] = power_law_pmf(cfg.tau_values[ti], cfg.effective_dmax());
    } catch (const std::exception& e) {
      pmf_errors[ti] = e.what();
    }
  }

  std::vector<detail::GraphSamples> units(ncells * cfg.num_graphs);
  std::vector<double> unit_seconds(units.size(), 0.0);
  detail::parallel_for(units.size(), cfg.threads, [&](std::size_t i) {
    const std::size_t cell = i / cfg.num_graphs, graph = i % cfg.num_graphs;
    const std::size_t ti = cell / nalpha, ai = cell % nalpha;
    const auto t0 = std::chrono::steady_clock::now();
    if (!pmfs[ti]) {
      units[i].error = pmf_errors[ti];
      return;
    }
    try {
      units[i] = detail::run_graph(cfg, *pmfs[ti], make, ti, ai, graph);
    } catch (const std::exception& e) {
      units[i].error = e.what();
    }
    unit_seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });

  for (std::size_t cell = 0; cell < ncells; ++cell) {
    const std::size_t ti = cell / nalpha, ai = cell % nalpha;
    CellSummary c;
    c.tau = cfg.tau_values[ti];
    c.alpha = cfg.alpha_values[ai];
    c.n = cfg.n;
    c.num_graphs = cfg.num_graphs;
    c.trials = cfg.trials_per_graph;
    c.overlay_samples = cfg.overlay_samples_per_graph;
    std::vector<double> gin, gout, spread, vuln, gccf;
    std::size_t in_gin = 0;
    for (std::size_t g = 0; g < cfg.num_graphs; ++g) {
      const auto& u = units[cell * cfg.num_graphs + g];
      c.wall_seconds += unit_seconds[cell * cfg.num_graphs + g];
      if (!u.error.empty()) {
        if (c.error.empty()) c.error = "graph " + std::to_string(g) + ": " + u.error;
        continue;
      }
      gin.insert(gin.end(), u.gin_gcc.begin(), u.gin_gcc.end());
      gout.insert(gout.end(), u.gout_gcc.begin(), u.gout_gcc.end());
      spread.insert(spread.end(), u.spread.begin(), u.spread.end());
      vuln.insert(vuln.end(), u.vulnerability.begin(), u.vulnerability.end());
      gccf.push_back(u.gcc_fraction);
      in_gin += u.in_gin;
    }
    if (c.ok()) {
      c.gin_gcc = mean_se(gin);
      c.gout_gcc = mean_se(gout);
      c.spread = mean_se(spread);
      c.vulnerability = mean_se(vuln);
      c.gcc_fraction = mean_se(gccf);
      c.originator_in_gin_rate = static_cast<double>(in_gin) / static_cast<double>(spread.size());
    }
    if (cfg.with_analytic) {
      if (!pmfs[ti]) {
        c.analytic_error = pmf_errors[ti];
      } else {
        const auto t0 = std::chrono::steady_clock::now();
        try {
          const auto r = analyze(*pmfs[ti], make(c.alpha), cfg.solver);
          c.analytic = AnalyticPrediction{
              r.gin / r.gcc,
              r.gout / r.gcc,
              r.spread,
              r.vulnerability,
              r.gcc,
              r.gcc_stats.iterations + r.gin_stats.iterations + r.gout_stats.iterations + r.gccV_stats.iterations,
              std::max({r.gcc_stats.residual, r.gin_stats.residual, r.gout_stats.residual, r.gccV_stats.residual}),
              r.guard_activations};
        } catch (const std::exception& e) {
          c.analytic_error = e.what();
        }
        c.wall_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
    }
    summary.cells.push_back(std::move(c));
  }
  return summary;
}

inline ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  return run_experiment(cfg, [](double alpha) { return TanhHeuristic(alpha); });
}

}  // namespace immunet
