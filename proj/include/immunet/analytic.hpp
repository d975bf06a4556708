#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "immunet/degree_dist.hpp"
#include "immunet/error.hpp"
#include "immunet/heuristics.hpp"

namespace immunet {

struct FixedPointConfig {
  double tolerance = 1e-12;  // max-norm of F(x) - x
  long max_iterations = 100000;
  double damping = 1.0;  // x <- x + damping (F(x) - x)
  /// Per-degree kernels up to this many entries are materialized; larger
  /// ones are recomputed row by row on every sweep.
  std::size_t kernel_cache_entries = std::size_t{1} << 27;

  void validate() const {
    if (!(tolerance > 0.0)) throw InvalidParameter("tolerance must be > 0");
    if (max_iterations < 1) throw InvalidParameter("max_iterations must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw InvalidParameter("damping must be in (0,1]");
  }
};

/// Called with the starting iterate and with every accepted iterate after it.
using IterateObserver = std::function<void(std::span<const double>)>;

struct SolveStats {
  double residual = 0.0;
  long iterations = 0;
};

struct GccSolution {
  double q;    // probability of a small reach through a random edge
  double gcc;  // fraction of nodes in the giant component
  SolveStats stats;
};

/// Solution of a per-degree dead-end recursion.
struct DeadEndSolution {
  std::vector<double> dead_end;     // indexed by degree 0..dmax
  std::vector<double> small_reach;  // dead_end[b]^(b-1)
  double fraction;                  // giant in/out/vulnerable fraction
  SolveStats stats;
  std::size_t guard_activations = 0;
};

namespace detail {

/// Plain (optionally damped) Picard iteration from the all-zeros vector.
/// On success `x` holds the last iterate whose residual was measured.
template <class Map>
SolveStats picard(std::vector<double>& x, Map&& map, const FixedPointConfig& cfg, const std::string& stage,
                  const IterateObserver& observer) {
  std::fill(x.begin(), x.end(), 0.0);
  std::vector<double> y(x.size());
  if (observer) observer(x);
  double residual = 0.0;
  for (long it = 1; it <= cfg.max_iterations; ++it) {
    map(std::span<const double>(x), std::span<double>(y));
    residual = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) residual = std::max(residual, std::abs(y[i] - x[i]));
    if (!(residual == residual)) throw ConvergenceFailure(stage + " (NaN)", residual, it);
    if (residual <= cfg.tolerance) return {residual, it};
    if (cfg.damping == 1.0) {
      x.swap(y);
    } else {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += cfg.damping * (y[i] - x[i]);
    }
    if (observer) observer(x);
  }
  throw ConvergenceFailure(stage, residual, cfg.max_iterations);
}

/// Dense rows x cols table that is either materialized or regenerated per
/// row on demand.
class RowTable {
 public:
  using Fill = std::function<void(std::size_t row, std::span<double> out)>;

  RowTable(std::size_t rows, std::size_t cols, Fill fill, std::size_t cache_limit)
      : rows_(rows), cols_(cols), fill_(std::move(fill)) {
    if (rows_ * cols_ <= cache_limit) {
      data_.resize(rows_ * cols_);
      for (std::size_t r = 0; r < rows_; ++r) fill_(r, {data_.data() + r * cols_, cols_});
      cached_ = true;
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool cached() const noexcept { return cached_; }

  std::span<const double> row(std::size_t r, std::vector<double>& scratch) const {
    if (cached_) return {data_.data() + r * cols_, cols_};
    scratch.resize(cols_);
    fill_(r, scratch);
    return scratch;
  }

  /// Rewrites every row through `fn(row, span)`. Materialized tables are
  /// rewritten in place; lazy ones compose the generator.
  void transform(std::function<void(std::size_t, std::span<double>)> fn) {
    if (cached_) {
      for (std::size_t r = 0; r < rows_; ++r) fn(r, {data_.data() + r * cols_, cols_});
    } else {
      fill_ = [inner = std::move(fill_), fn = std::move(fn)](std::size_t r, std::span<double> out) {
        inner(r, out);
        fn(r, out);
      };
    }
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  Fill fill_;
  std::vector<double> data_;
  bool cached_ = false;
};

/// Degrees a neighbor reached along a random edge can have (b p_b > 0),
/// with their edge-biased weights b p_b / Z.
struct EdgeBiased {
  std::vector<Degree> degrees;
  std::vector<double> weights;
};

inline EdgeBiased edge_biased(const DegreePmf& pmf) {
  const double z = mean_degree(pmf);
  if (!(z > 0.0)) throw DegenerateDistribution("mean degree is zero");
  EdgeBiased eb;
  auto p = pmf.probs();
  for (std::size_t b = 1; b < p.size(); ++b) {
    const double w = static_cast<double>(b) * p[b] / z;
    if (w > 0.0) {
      eb.degrees.push_back(static_cast<Degree>(b));
      eb.weights.push_back(w);
    }
  }
  return eb;
}

/// small_reach[b] = dead_end[b]^(b-1); degree 0 is assigned 1.
inline void small_reach_from(std::span<const double> dead_end, std::span<double> out) {
  out[0] = 1.0;
  for (std::size_t b = 1; b < dead_end.size(); ++b) out[b] = std::pow(dead_end[b], static_cast<double>(b - 1));
}

/// 1 - sum_a dead_end[a]^a p_a
inline double giant_fraction(std::span<const double> dead_end, const DegreePmf& pmf) {
  auto p = pmf.probs();
  double s = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) s += std::pow(dead_end[a], static_cast<double>(a)) * p[a];
  return 1.0 - s;
}

/// Row a holds h(a, b_j) for sender-major kernels or h(b_j, a) otherwise,
/// over the edge-biased support b_j.
template <Heuristic H>
RowTable heuristic_kernel(const H& h, const DegreePmf& pmf, const EdgeBiased& eb, bool sender_major,
                          std::size_t cache_limit) {
  auto fill = [h, cols = eb.degrees, sender_major](std::size_t a, std::span<double> out) {
    const auto deg = static_cast<Degree>(a);
    if (sender_major)
      for (std::size_t j = 0; j < cols.size(); ++j) out[j] = static_cast<double>(h(deg, cols[j]));
    else
      for (std::size_t j = 0; j < cols.size(); ++j) out[j] = static_cast<double>(h(cols[j], deg));
  };
  return RowTable(static_cast<std::size_t>(pmf.dmax()) + 1, eb.degrees.size(), fill, cache_limit);
}

/// Shared sweep of the in/out recursions:
///   dead_end[a] = sum_j (1 - k[a][j] + k[a][j] small_reach[b_j]) w_j
inline DeadEndSolution solve_dead_end(const RowTable& kernel, const DegreePmf& pmf, const EdgeBiased& eb,
                                      const FixedPointConfig& cfg, const std::string& stage,
                                      const IterateObserver& observer) {
  const std::size_t rows = static_cast<std::size_t>(pmf.dmax()) + 1;
  std::vector<double> reach(rows), scratch;
  std::vector<double> x(rows);
  auto map = [&](std::span<const double> cur, std::span<double> next) {
    small_reach_from(cur, reach);
    for (std::size_t a = 0; a < rows; ++a) {
      auto k = kernel.row(a, scratch);
      double s = 0.0;
      for (std::size_t j = 0; j < k.size(); ++j) {
        const double r = reach[eb.degrees[j]];
        s += (1.0 - k[j] + k[j] * r) * eb.weights[j];
      }
      next[a] = std::min(s, 1.0);  // the weights sum to 1 only up to rounding
    }
  };
  DeadEndSolution sol;
  sol.stats = picard(x, map, cfg, stage, observer);
  sol.small_reach.resize(rows);
  small_reach_from(x, sol.small_reach);
  sol.fraction = giant_fraction(x, pmf);
  sol.dead_end = std::move(x);
  return sol;
}

inline constexpr double kConditioningGuard = 1e-15;

/// Turns a receiver-major kernel row (h(b_j, a)) into the coefficients of
/// the vulnerable-subgraph recursion, which is affine in the small-reach
/// vector: dead_end[a] = c1[a] + sum_j row[j] q[b_j].
/// Returns c1[a] and counts guarded entries.
inline double vulnerable_row(std::size_t a, std::span<double> row, const EdgeBiased& eb,
                             std::span<const double> deout, std::span<const double> qout, std::size_t& guards) {
  // Neighbour mix conditioned on the edge being a dead end for the out
  // recursion. Normalizing by the row's own mass rather than deout[a] keeps
  // it a probability mix when deout carries solver residual.
  double cond = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double hba = row[j];
    cond += (1.0 - hba + hba * qout[eb.degrees[j]]) * eb.weights[j];
  }
  if (!(deout[a] > 0.0) || !(cond > 0.0)) {
    // u cannot lie outside the giant out-component; row never enters the
    // vulnerable fraction.
    std::fill(row.begin(), row.end(), 0.0);
    ++guards;
    return 0.0;
  }
  double c1 = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double hba = row[j];
    const double qo = qout[eb.degrees[j]];
    const double not_out = 1.0 - hba + hba * qo;  // P(v->u absent or v reaches u only from o(n) nodes)
    double arc_given_not_out = 0.0;
    if (not_out < kConditioningGuard)
      ++guards;
    else
      arc_given_not_out = hba * qo / not_out;
    const double biased = not_out / cond * eb.weights[j];
    // dead end w.p. wh q + (1 - wh)(1 - qo + qo q), q the unknown small reach
    c1 += (1.0 - arc_given_not_out) * (1.0 - qo) * biased;
    row[j] = (arc_given_not_out + (1.0 - arc_given_not_out) * qo) * biased;
  }
  return c1;
}

inline DeadEndSolution solve_vulnerable(RowTable kernel, const DegreePmf& pmf, const EdgeBiased& eb,
                                        std::span<const double> deout, std::span<const double> qout,
                                        const FixedPointConfig& cfg, const IterateObserver& observer) {
  const std::size_t rows = static_cast<std::size_t>(pmf.dmax()) + 1;
  if (deout.size() != rows || qout.size() != rows)
    throw InvalidParameter("solve_gccV: out-component vectors do not match the pmf support");
  std::vector<double> c1(rows, 0.0);
  std::size_t guards = 0;
  if (kernel.cached()) {
    kernel.transform([&](std::size_t a, std::span<double> row) { c1[a] = vulnerable_row(a, row, eb, deout, qout, guards); });
  } else {
    std::vector<double> scratch;
    for (std::size_t a = 0; a < rows; ++a) {
      auto k = kernel.row(a, scratch);
      std::vector<double> tmp(k.begin(), k.end());
      c1[a] = vulnerable_row(a, tmp, eb, deout, qout, guards);
    }
    std::vector<double> dout(deout.begin(), deout.end()), qo(qout.begin(), qout.end());
    kernel.transform([&eb, dout, qo](std::size_t a, std::span<double> row) {
      std::size_t ignored = 0;
      vulnerable_row(a, row, eb, dout, qo, ignored);
    });
  }
  std::vector<double> reach(rows), scratch, x(rows);
  auto map = [&](std::span<const double> cur, std::span<double> next) {
    small_reach_from(cur, reach);
    for (std::size_t a = 0; a < rows; ++a) {
      auto c2 = kernel.row(a, scratch);
      double s = c1[a];
      for (std::size_t j = 0; j < c2.size(); ++j) s += c2[j] * reach[eb.degrees[j]];
      next[a] = std::min(s, 1.0);
    }
  };
  DeadEndSolution sol;
  sol.stats = picard(x, map, cfg, "solve_gccV", observer);
  sol.guard_activations = guards;
  sol.small_reach.resize(rows);
  small_reach_from(x, sol.small_reach);
  auto p = pmf.probs();
  double frac = 0.0;
  for (std::size_t a = 0; a < rows; ++a) {
    const double ad = static_cast<double>(a);
    frac += std::pow(deout[a], ad) * (1.0 - std::pow(x[a], ad)) * p[a];
  }
  sol.fraction = frac;
  sol.dead_end = std::move(x);
  return sol;
}

}  // namespace detail

/// Least fixed point of q = sum_b q^(b-1) b p_b / Z, and the giant
/// component fraction 1 - sum_a q^a p_a.
inline GccSolution solve_gcc(const DegreePmf& pmf, const FixedPointConfig& cfg = {},
                             const IterateObserver& observer = {}) {
  cfg.validate();
  const auto eb = detail::edge_biased(pmf);
  std::vector<double> x(1);
  auto map = [&](std::span<const double> cur, std::span<double> next) {
    double s = 0.0;
    for (std::size_t j = 0; j < eb.degrees.size(); ++j)
      s += std::pow(cur[0], static_cast<double>(eb.degrees[j] - 1)) * eb.weights[j];
    next[0] = s;
  };
  auto stats = detail::picard(x, map, cfg, "solve_gcc", observer);
  auto p = pmf.probs();
  double s = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) s += std::pow(x[0], static_cast<double>(a)) * p[a];
  return {x[0], 1.0 - s, stats};
}

/// Dead-end probabilities for reach in the overlay; `fraction` is the giant
/// in-component share of all nodes.
template <Heuristic H>
DeadEndSolution solve_gin(const DegreePmf& pmf, const H& h, const FixedPointConfig& cfg = {},
                          const IterateObserver& observer = {}) {
  cfg.validate();
  const auto eb = detail::edge_biased(pmf);
  auto kernel = detail::heuristic_kernel(h, pmf, eb, /*sender_major=*/true, cfg.kernel_cache_entries);
  return detail::solve_dead_end(kernel, pmf, eb, cfg, "solve_gin", observer);
}

/// As solve_gin with the arc direction reversed: h(b, a) in place of h(a, b).
template <Heuristic H>
DeadEndSolution solve_gout(const DegreePmf& pmf, const H& h, const FixedPointConfig& cfg = {},
                           const IterateObserver& observer = {}) {
  cfg.validate();
  const auto eb = detail::edge_biased(pmf);
  auto kernel = detail::heuristic_kernel(h, pmf, eb, /*sender_major=*/false, cfg.kernel_cache_entries);
  return detail::solve_dead_end(kernel, pmf, eb, cfg, "solve_gout", observer);
}

/// Giant component of the subgraph left after removing the giant
/// out-component, given a converged out-component solution.
template <Heuristic H>
DeadEndSolution solve_gccV(const DegreePmf& pmf, const H& h, std::span<const double> deout,
                           std::span<const double> qout, const FixedPointConfig& cfg = {},
                           const IterateObserver& observer = {}) {
  cfg.validate();
  const auto eb = detail::edge_biased(pmf);
  auto kernel = detail::heuristic_kernel(h, pmf, eb, /*sender_major=*/false, cfg.kernel_cache_entries);
  return detail::solve_vulnerable(std::move(kernel), pmf, eb, deout, qout, cfg, observer);
}

/// Expected fraction of giant-component nodes that receive the vaccine.
inline double expected_spread(double gin, double gout, double gcc) {
  if (!(gcc > 0.0)) throw BelowTransition("expected_spread: giant component fraction is zero");
  return gin * gout / (gcc * gcc);
}

/// Expected fraction of giant-component nodes a single infection attempt
/// can reach after dissemination.
inline double expected_vulnerability(double gin, double gcc, double gccV) {
  if (!(gcc > 0.0)) throw BelowTransition("expected_vulnerability: giant component fraction is zero");
  const double in_share = gin / gcc;
  const double v_share = gccV / gcc;
  return 1.0 - in_share + in_share * v_share * v_share;
}

struct AnalyticReport {
  Degree dmax = 0;
  double mean_degree = 0.0;
  double branching_factor = 0.0;
  double q = 0.0;
  double gcc = 0.0;
  std::vector<double> dein, qin, deout, qout, degcc, qgcc;
  double gin = 0.0;
  double gout = 0.0;
  double gccV = 0.0;
  double spread = 0.0;
  double vulnerability = 0.0;
  SolveStats gcc_stats, gin_stats, gout_stats, gccV_stats;
  std::size_t guard_activations = 0;
};

/// Runs every solver on one degree distribution and heuristic.
template <Heuristic H>
AnalyticReport analyze(const DegreePmf& pmf, const H& h, const FixedPointConfig& cfg = {}) {
  cfg.validate();
  AnalyticReport r;
  r.dmax = pmf.dmax();
  r.mean_degree = mean_degree(pmf);
  if (!(r.mean_degree > 0.0)) throw BelowTransition("analyze: mean degree is zero");
  const auto phase = phase_criterion(pmf);
  r.branching_factor = phase.branching_factor;
  if (!phase.above_transition)
    throw BelowTransition("analyze: below the phase transition (branching factor " +
                          std::to_string(phase.branching_factor) + ")");

  auto gcc = solve_gcc(pmf, cfg);
  r.q = gcc.q;
  r.gcc = gcc.gcc;
  r.gcc_stats = gcc.stats;
  if (!(r.gcc > 0.0)) throw BelowTransition("analyze: solve_gcc found no giant component");

  const auto eb = detail::edge_biased(pmf);
  {
    auto kin = detail::heuristic_kernel(h, pmf, eb, true, cfg.kernel_cache_entries);
    auto in = detail::solve_dead_end(kin, pmf, eb, cfg, "solve_gin", {});
    r.dein = std::move(in.dead_end);
    r.qin = std::move(in.small_reach);
    r.gin = in.fraction;
    r.gin_stats = in.stats;
  }
  auto kout = detail::heuristic_kernel(h, pmf, eb, false, cfg.kernel_cache_entries);
  auto out = detail::solve_dead_end(kout, pmf, eb, cfg, "solve_gout", {});
  r.deout = std::move(out.dead_end);
  r.qout = std::move(out.small_reach);
  r.gout = out.fraction;
  r.gout_stats = out.stats;

  auto v = detail::solve_vulnerable(std::move(kout), pmf, eb, r.deout, r.qout, cfg, {});
  r.degcc = std::move(v.dead_end);
  r.qgcc = std::move(v.small_reach);
  r.gccV = v.fraction;
  r.gccV_stats = v.stats;
  r.guard_activations = v.guard_activations;

  r.spread = expected_spread(r.gin, r.gout, r.gcc);
  r.vulnerability = expected_vulnerability(r.gin, r.gcc, r.gccV);
  return r;
}

}  // namespace immunet
