#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "immunet/error.hpp"
#include "immunet/rng.hpp"

namespace immunet {

using Degree = std::uint32_t;

/// Probability mass function over node degrees 0..dmax with a cached CDF
/// for inverse-transform sampling. Immutable once built.
class DegreePmf {
 public:
  /// Normalizes `weights` (non-negative, not all zero) into a PMF.
  static DegreePmf from_weights(std::vector<double> weights) {
    if (weights.size() < 2) throw InvalidParameter("pmf needs dmax >= 1");
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidParameter("pmf weights must be finite and >= 0");
      total += w;
    }
    if (total <= 0.0) throw DegenerateDistribution("pmf has no mass");
    for (double& w : weights) w /= total;
    return DegreePmf(std::move(weights));
  }

  static DegreePmf point_mass(Degree k) {
    std::vector<double> w(std::max<Degree>(k, 1) + 1, 0.0);
    w[k] = 1.0;
    return DegreePmf(std::move(w));
  }

  Degree dmax() const noexcept { return static_cast<Degree>(probs_.size() - 1); }
  double operator[](Degree a) const noexcept { return a < probs_.size() ? probs_[a] : 0.0; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::span<const double> cdf() const noexcept { return cdf_; }

 private:
  explicit DegreePmf(std::vector<double> probs) : probs_(std::move(probs)), cdf_(probs_.size()) {
    double acc = 0.0;
    for (std::size_t a = 0; a < probs_.size(); ++a) {
      acc += probs_[a];
      cdf_[a] = acc;
    }
    // Pin the tail so a uniform draw in [0,1) always lands inside the support.
    cdf_.back() = 1.0;
  }

  std::vector<double> probs_;
  std::vector<double> cdf_;
};

/// p_a proportional to a^-tau on 1..dmax, p_0 = 0.
inline DegreePmf power_law_pmf(double tau, Degree dmax) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidParameter("tau must be > 0");
  if (dmax < 2) throw InvalidParameter("dmax must be >= 2");
  std::vector<double> w(dmax + 1, 0.0);
  for (Degree a = 1; a <= dmax; ++a) w[a] = std::pow(static_cast<double>(a), -tau);
  return DegreePmf::from_weights(std::move(w));
}

/// Poisson(z) truncated to 0..dmax and renormalized.
inline DegreePmf poisson_pmf(double z, Degree dmax) {
  if (!(z > 0.0) || !std::isfinite(z)) throw InvalidParameter("poisson mean must be > 0");
  if (dmax < 1) throw InvalidParameter("dmax must be >= 1");
  std::vector<double> w(dmax + 1);
  for (Degree a = 0; a <= dmax; ++a) {
    const double x = static_cast<double>(a);
    w[a] = std::exp(x * std::log(z) - z - std::lgamma(x + 1.0));
  }
  return DegreePmf::from_weights(std::move(w));
}

inline double mean_degree(const DegreePmf& pmf) {
  double z = 0.0;
  auto p = pmf.probs();
  for (std::size_t a = 1; a < p.size(); ++a) z += static_cast<double>(a) * p[a];
  return z;
}

/// Degree distribution of a node reached by following a random edge:
/// mass b p_b / Z at degree b.
inline DegreePmf neighbor_degree_pmf(const DegreePmf& pmf) {
  const double z = mean_degree(pmf);
  if (!(z > 0.0)) throw DegenerateDistribution("mean degree is zero");
  auto p = pmf.probs();
  std::vector<double> w(p.size());
  for (std::size_t b = 0; b < p.size(); ++b) w[b] = static_cast<double>(b) * p[b] / z;
  return DegreePmf::from_weights(std::move(w));
}

struct PhaseVerdict {
  double branching_factor;
  bool above_transition;
};

/// Expected number of further neighbors of a node reached along an edge.
/// A giant component exists iff this exceeds 1.
inline PhaseVerdict phase_criterion(const DegreePmf& pmf) {
  const double z = mean_degree(pmf);
  if (!(z > 0.0)) throw DegenerateDistribution("mean degree is zero");
  auto p = pmf.probs();
  double s = 0.0;
  for (std::size_t b = 1; b < p.size(); ++b) {
    const double bd = static_cast<double>(b);
    s += (bd - 1.0) * bd * p[b];
  }
  const double bf = s / z;
  return {bf, bf > 1.0};
}

inline Degree sample_degree(const DegreePmf& pmf, Rng& rng) {
  const double u = uniform01(rng);
  auto cdf = pmf.cdf();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  auto a = static_cast<Degree>(it - cdf.begin());
  return std::min(a, pmf.dmax());
}

// Text format: "# pmf dmax=<d>" header, then "degree probability" lines.

inline void write_pmf(std::ostream& os, const DegreePmf& pmf) {
  os << "# pmf dmax=" << pmf.dmax() << '\n';
  auto p = pmf.probs();
  char buf[64];
  for (std::size_t a = 0; a < p.size(); ++a) {
    std::snprintf(buf, sizeof buf, "%zu %.17g\n", a, p[a]);
    os << buf;
  }
}

/// Reads the text format. Degrees not listed get zero mass. The listed
/// probabilities must sum to 1 within 1e-6; the result is renormalized.
inline DegreePmf read_pmf(std::istream& is) {
  std::string line;
  long dmax = -1;
  std::vector<double> w;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto pos = line.find("dmax=");
      if (line.find("pmf") != std::string::npos && pos != std::string::npos) {
        dmax = std::stol(line.substr(pos + 5));
        if (dmax < 1) throw InvalidParameter("pmf header: dmax must be >= 1");
        w.assign(static_cast<std::size_t>(dmax) + 1, 0.0);
        header = true;
      }
      continue;
    }
    if (!header) throw InvalidParameter("pmf file: missing '# pmf dmax=<d>' header");
    std::istringstream ls(line);
    long a;
    double prob;
    if (!(ls >> a >> prob)) throw InvalidParameter("pmf file: malformed line '" + line + "'");
    if (a < 0 || a > dmax) throw InvalidParameter("pmf file: degree " + std::to_string(a) + " outside 0..dmax");
    if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidParameter("pmf file: probability outside [0,1]");
    w[static_cast<std::size_t>(a)] = prob;
  }
  if (!header) throw InvalidParameter("pmf file: missing '# pmf dmax=<d>' header");
  double total = 0.0;
  for (double x : w) total += x;
  if (std::abs(total - 1.0) > 1e-6) throw InvalidParameter("pmf file: probabilities sum to " + std::to_string(total));
  return DegreePmf::from_weights(std::move(w));
}

}  // namespace immunet
