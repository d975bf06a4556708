#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "immunet/analytic.hpp"
#include "oracles.hpp"

using namespace immunet;

namespace {

using HFn = std::function<double(Degree, Degree)>;

/// Literal transcription of the dead-end recursions, evaluated term by term
/// on a small support. Shares nothing with the solver internals.
struct LiteralModel {
  DegreePmf pmf;
  HFn h;
  std::vector<double> w;  // b p_b / Z

  LiteralModel(DegreePmf p, HFn hf) : pmf(std::move(p)), h(std::move(hf)) {
    double z = 0;
    for (Degree a = 0; a <= pmf.dmax(); ++a) z += a * pmf[a];
    for (Degree b = 0; b <= pmf.dmax(); ++b) w.push_back(b * pmf[b] / z);
  }

  std::size_t size() const { return pmf.dmax() + 1; }

  template <class Step>
  std::vector<double> iterate(Step step) const {
    std::vector<double> x(size(), 0.0);
    for (int it = 0; it < 200000; ++it) {
      auto y = step(x);
      double d = 0;
      for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(y[i] - x[i]));
      x = y;
      if (d < 1e-15) break;
    }
    return x;
  }

  std::vector<double> in_step(const std::vector<double>& d, bool reverse) const {
    std::vector<double> out(size(), 0.0);
    for (Degree a = 0; a <= pmf.dmax(); ++a)
      for (Degree b = 1; b <= pmf.dmax(); ++b) {
        const double hab = reverse ? h(b, a) : h(a, b);
        out[a] += (1 - hab + hab * std::pow(d[b], b - 1.0)) * w[b];
      }
    return out;
  }

  std::vector<double> dein() const { return iterate([&](auto& d) { return in_step(d, false); }); }
  std::vector<double> deout() const { return iterate([&](auto& d) { return in_step(d, true); }); }

  double fraction(const std::vector<double>& d) const {
    double s = 0;
    for (Degree a = 0; a <= pmf.dmax(); ++a) s += std::pow(d[a], static_cast<double>(a)) * pmf[a];
    return 1 - s;
  }

  std::vector<double> degcc(const std::vector<double>& dout) const {
    auto qo = [&](Degree b) { return std::pow(dout[b], b - 1.0); };
    return iterate([&](const std::vector<double>& dg) {
      std::vector<double> out(size(), 0.0);
      for (Degree a = 0; a <= pmf.dmax(); ++a) {
        if (dout[a] <= 0) continue;
        for (Degree b = 1; b <= pmf.dmax(); ++b) {
          const double hba = h(b, a);
          const double den = 1 - hba + hba * qo(b);
          const double wh = den < 1e-15 ? 0.0 : hba * qo(b) / den;
          const double wp = den / dout[a] * w[b];
          const double qg = std::pow(dg[b], b - 1.0);
          out[a] += (wh * qg + (1 - wh) * (1 - qo(b) + qo(b) * qg)) * wp;
        }
      }
      return out;
    });
  }

  double gccV(const std::vector<double>& dout, const std::vector<double>& dg) const {
    double s = 0;
    for (Degree a = 0; a <= pmf.dmax(); ++a) s += std::pow(dout[a], a) * (1 - std::pow(dg[a], a)) * pmf[a];
    return s;
  }
};

void expect_prob_vector(const std::vector<double>& v) {
  for (double x : v) {
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0 + 1e-12);
  }
}

/// Observer asserting every iterate dominates the previous one.
struct MonotoneCheck {
  std::vector<double> prev;
  long steps = 0;
  long violations = 0;
  IterateObserver observer() {
    return [this](std::span<const double> x) {
      if (!prev.empty())
        for (std::size_t i = 0; i < x.size(); ++i) violations += x[i] < prev[i];
      prev.assign(x.begin(), x.end());
      ++steps;
    };
  }
};

}  // namespace

TEST(SolveGcc, RegularAndTrivial) {
  auto r3 = solve_gcc(DegreePmf::point_mass(3));
  EXPECT_EQ(r3.q, 0.0);
  EXPECT_EQ(r3.gcc, 1.0);
  auto r1 = solve_gcc(DegreePmf::point_mass(1));
  EXPECT_EQ(r1.q, 1.0);
  EXPECT_EQ(r1.gcc, 0.0);
}

TEST(SolveGcc, PoissonMatchesClassicalGiant) {
  const double classical = oracle::poisson_giant(2.0);
  EXPECT_NEAR(classical, 0.79681213002002, 1e-12);
  auto r = solve_gcc(poisson_pmf(2.0, 60));
  EXPECT_NEAR(r.gcc, classical, 1e-3);
  EXPECT_NEAR(r.gcc, classical, 1e-9);
  EXPECT_LE(r.stats.residual, 1e-12);
}

TEST(SolveGcc, MonotoneIterates) {
  MonotoneCheck m;
  solve_gcc(power_law_pmf(2.4, 3000), {}, m.observer());
  EXPECT_GT(m.steps, 3);
  EXPECT_EQ(m.violations, 0);
}

TEST(SolveGin, DegenerateHeuristics) {
  auto pmf = power_law_pmf(2.3, 300);
  auto gcc = solve_gcc(pmf);
  auto one = solve_gin(pmf, ConstantHeuristic{1.0});
  for (Degree a = 0; a <= pmf.dmax(); ++a) EXPECT_NEAR(one.dead_end[a], gcc.q, 1e-11);
  EXPECT_NEAR(one.fraction, gcc.gcc, 1e-10);
  auto zero = solve_gin(pmf, ConstantHeuristic{0.0});
  for (double d : zero.dead_end) EXPECT_NEAR(d, 1.0, 1e-14);
  EXPECT_NEAR(zero.fraction, 0.0, 1e-13);

  auto out_one = solve_gout(pmf, ConstantHeuristic{1.0});
  EXPECT_NEAR(out_one.fraction, gcc.gcc, 1e-10);
  EXPECT_NEAR(solve_gout(pmf, ConstantHeuristic{0.0}).fraction, 0.0, 1e-13);
}

TEST(SolveGin, MatchesLiteralEquations) {
  for (double alpha : {0.1, 0.7, 1.0}) {
    const TanhHeuristic h(alpha);
    LiteralModel lit(power_law_pmf(2.2, 40), h);
    auto in = solve_gin(lit.pmf, h);
    auto out = solve_gout(lit.pmf, h);
    auto lin = lit.dein(), lout = lit.deout();
    for (Degree a = 0; a <= 40; ++a) {
      EXPECT_NEAR(in.dead_end[a], lin[a], 1e-11) << a;
      EXPECT_NEAR(out.dead_end[a], lout[a], 1e-11) << a;
    }
    EXPECT_NEAR(in.fraction, lit.fraction(lin), 1e-11);
    EXPECT_NEAR(out.fraction, lit.fraction(lout), 1e-11);
  }
}

TEST(SolveGin, SelfConsistentAndMonotone) {
  const TanhHeuristic h(0.4);
  auto pmf = power_law_pmf(2.5, 800);
  FixedPointConfig cfg;
  MonotoneCheck m;
  auto in = solve_gin(pmf, h, cfg, m.observer());
  EXPECT_EQ(m.violations, 0);
  EXPECT_LE(in.stats.residual, cfg.tolerance);
  expect_prob_vector(in.dead_end);
  LiteralModel lit(pmf, h);
  auto rhs = lit.in_step(in.dead_end, false);
  for (Degree a = 0; a <= pmf.dmax(); ++a) EXPECT_NEAR(rhs[a], in.dead_end[a], cfg.tolerance + 1e-13) << a;
}

TEST(SolveGin, SwappedHeuristicGivesGoutExactly) {
  auto pmf = power_law_pmf(2.4, 500);
  for (double alpha : {0.1, 1.0}) {
    const TanhHeuristic h(alpha);
    auto in = solve_gin(pmf, h);
    auto out = solve_gout(pmf, swapped(h));
    EXPECT_EQ(in.dead_end, out.dead_end);
    EXPECT_EQ(in.fraction, out.fraction);
    auto out2 = solve_gout(pmf, h);
    auto in2 = solve_gin(pmf, swapped(h));
    EXPECT_EQ(out2.fraction, in2.fraction);
  }
}

TEST(SolveGccV, DegenerateHeuristics) {
  auto pm3 = DegreePmf::point_mass(3);
  auto out = solve_gout(pm3, ConstantHeuristic{1.0});
  EXPECT_EQ(out.dead_end[3], 0.0);
  auto v = solve_gccV(pm3, ConstantHeuristic{1.0}, out.dead_end, out.small_reach);
  EXPECT_EQ(v.fraction, 0.0);
  EXPECT_GT(v.guard_activations, 0u);

  auto pmf = power_law_pmf(2.3, 300);
  auto gcc = solve_gcc(pmf);
  auto out0 = solve_gout(pmf, ConstantHeuristic{0.0});
  for (Degree b = 1; b <= pmf.dmax(); ++b) EXPECT_NEAR(out0.small_reach[b], 1.0, 1e-12);
  auto v0 = solve_gccV(pmf, ConstantHeuristic{0.0}, out0.dead_end, out0.small_reach);
  EXPECT_NEAR(v0.fraction, gcc.gcc, 1e-10);
  EXPECT_EQ(v0.guard_activations, 0u);
}

TEST(SolveGccV, MatchesLiteralEquations) {
  for (double alpha : {0.1, 0.4, 1.0}) {
    for (double tau : {2.2, 2.8}) {
      const TanhHeuristic h(alpha);
      LiteralModel lit(power_law_pmf(tau, 40), h);
      auto out = solve_gout(lit.pmf, h);
      MonotoneCheck m;
      auto v = solve_gccV(lit.pmf, h, out.dead_end, out.small_reach, {}, m.observer());
      EXPECT_EQ(m.violations, 0);
      auto lout = lit.deout();
      auto ldg = lit.degcc(lout);
      for (Degree a = 0; a <= 40; ++a) EXPECT_NEAR(v.dead_end[a], ldg[a], 1e-10) << tau << " " << alpha << " " << a;
      EXPECT_NEAR(v.fraction, lit.gccV(lout, ldg), 1e-10);
      expect_prob_vector(v.dead_end);
    }
  }
}

TEST(SolveGccV, RejectsMismatchedVectors) {
  auto pmf = power_law_pmf(2.3, 50);
  std::vector<double> short_vec(10, 0.5);
  EXPECT_THROW(solve_gccV(pmf, TanhHeuristic(1.0), short_vec, short_vec), InvalidParameter);
}

TEST(Solvers, LazyKernelMatchesCached) {
  auto pmf = power_law_pmf(2.3, 120);
  const TanhHeuristic h(0.7);
  FixedPointConfig lazy;
  lazy.kernel_cache_entries = 0;
  auto a = analyze(pmf, h);
  auto b = analyze(pmf, h, lazy);
  EXPECT_EQ(a.dein, b.dein);
  EXPECT_EQ(a.deout, b.deout);
  EXPECT_EQ(a.degcc, b.degcc);
  EXPECT_EQ(a.guard_activations, b.guard_activations);
}

TEST(Solvers, DampingReachesSameFixedPoint) {
  auto pmf = power_law_pmf(2.6, 300);
  const TanhHeuristic h(0.4);
  FixedPointConfig damped;
  damped.damping = 0.5;
  MonotoneCheck m;
  auto a = solve_gin(pmf, h);
  auto b = solve_gin(pmf, h, damped, m.observer());
  EXPECT_EQ(m.violations, 0);
  EXPECT_NEAR(a.fraction, b.fraction, 1e-10);
  EXPECT_GT(b.stats.iterations, a.stats.iterations);
}

TEST(Solvers, ConfigErrorsAndNonConvergence) {
  auto pmf = power_law_pmf(2.3, 100);
  FixedPointConfig bad;
  bad.tolerance = 0;
  EXPECT_THROW(solve_gcc(pmf, bad), InvalidParameter);
  bad = {};
  bad.max_iterations = 0;
  EXPECT_THROW(solve_gin(pmf, TanhHeuristic(1.0), bad), InvalidParameter);
  bad = {};
  bad.damping = 1.5;
  EXPECT_THROW(solve_gout(pmf, TanhHeuristic(1.0), bad), InvalidParameter);

  FixedPointConfig tight;
  tight.max_iterations = 2;
  try {
    solve_gin(pmf, TanhHeuristic(1.0), tight);
    FAIL() << "expected ConvergenceFailure";
  } catch (const ConvergenceFailure& e) {
    EXPECT_EQ(e.stage(), "solve_gin");
    EXPECT_GT(e.residual(), tight.tolerance);
  }
}

TEST(Formulas, SpreadAndVulnerability) {
  EXPECT_DOUBLE_EQ(expected_spread(0.5, 0.5, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(expected_spread(0.0, 0.3, 0.5), 0.0);
  EXPECT_NEAR(expected_spread(0.9, 0.1, 1.0), 0.09, 1e-15);
  EXPECT_THROW(expected_spread(0.1, 0.1, 0.0), BelowTransition);
  EXPECT_DOUBLE_EQ(expected_vulnerability(0.0, 0.8, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(expected_vulnerability(0.8, 0.8, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(expected_vulnerability(0.8, 0.8, 0.8), 1.0);
  EXPECT_THROW(expected_vulnerability(0.1, 0.0, 0.0), BelowTransition);
}

TEST(Analyze, BelowTransitionAndStub) {
  EXPECT_THROW(analyze(DegreePmf::point_mass(1), TanhHeuristic(1.0)), BelowTransition);
  EXPECT_THROW(analyze(poisson_pmf(0.5, 40), TanhHeuristic(1.0)), BelowTransition);
  auto r = analyze(power_law_pmf(2.2, 400), ConstantHeuristic{1.0});
  EXPECT_NEAR(r.spread, 1.0, 1e-9);
  EXPECT_NEAR(r.vulnerability, 0.0, 1e-9);
}

// Reference values from an independent dense-matrix implementation of the
// same recursions (vectorized NumPy, dmax = 2000).
TEST(Analyze, PowerLawReferenceValues) {
  auto r = analyze(power_law_pmf(2.1, 2000), TanhHeuristic(1.0));
  EXPECT_NEAR(r.gcc, 0.8751655786993036, 1e-9);
  EXPECT_NEAR(r.gin / r.gcc, 0.9990394007347602, 1e-8);
  EXPECT_NEAR(r.gout / r.gcc, 0.13561037327493614, 1e-8);
  EXPECT_NEAR(r.spread, 0.13548010605000932, 1e-8);
  EXPECT_NEAR(r.vulnerability, 0.0009605992652398365, 1e-8);
  EXPECT_LE(r.gin, r.gcc + 1e-9);
  EXPECT_LE(r.gout, r.gcc + 1e-9);
  for (const auto* v : {&r.dein, &r.qin, &r.deout, &r.qout, &r.degcc, &r.qgcc}) expect_prob_vector(*v);
  for (const auto& s : {r.gcc_stats, r.gin_stats, r.gout_stats, r.gccV_stats}) EXPECT_LE(s.residual, 1e-12);
}
