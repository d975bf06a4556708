#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "immunet/analytic.hpp"
#include "immunet/error.hpp"
#include "immunet/simulate.hpp"

namespace immunet {

namespace detail {

inline std::string fmt_num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

/// JSON has no NaN; missing values become null.
inline nlohmann::json num_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

inline nlohmann::json stats_json(const SolveStats& s) { return {{"residual", s.residual}, {"iterations", s.iterations}}; }

}  // namespace detail

inline nlohmann::json to_json(const AnalyticReport& r, bool full = false) {
  nlohmann::json j = {
      {"dmax", r.dmax},
      {"mean_degree", r.mean_degree},
      {"branching_factor", r.branching_factor},
      {"q", r.q},
      {"gcc", r.gcc},
      {"gin", r.gin},
      {"gout", r.gout},
      {"gccV", r.gccV},
      {"gin_gcc", r.gin / r.gcc},
      {"gout_gcc", r.gout / r.gcc},
      {"spread", r.spread},
      {"vulnerability", r.vulnerability},
      {"guard_activations", r.guard_activations},
      {"solves",
       {{"gcc", detail::stats_json(r.gcc_stats)},
        {"gin", detail::stats_json(r.gin_stats)},
        {"gout", detail::stats_json(r.gout_stats)},
        {"gccV", detail::stats_json(r.gccV_stats)}}},
  };
  if (full) {
    j["vectors"] = {{"dein", r.dein},   {"qin", r.qin},     {"deout", r.deout},
                    {"qout", r.qout},   {"degcc", r.degcc}, {"qgcc", r.qgcc}};
  }
  return j;
}

inline constexpr const char* kSummaryCsvHeader =
    "tau,alpha,n,num_graphs,trials,gin_gcc_sim,gin_gcc_se,gout_gcc_sim,gout_gcc_se,spread_sim,spread_se,"
    "vuln_sim,vuln_se,gin_gcc_ana,gout_gcc_ana,spread_ana,vuln_ana";

/// One row per cell. Failed simulations or solves leave "nan" in their
/// columns.
inline void write_summary_csv(std::ostream& os, const ExperimentSummary& s) {
  using detail::fmt_num;
  os << kSummaryCsvHeader << '\n';
  const double nan = std::nan("");
  for (const auto& c : s.cells) {
    const bool sim = c.ok();
    const auto& a = c.analytic;
    os << fmt_num(c.tau) << ',' << fmt_num(c.alpha) << ',' << c.n << ',' << c.num_graphs << ',' << c.trials << ','
       << fmt_num(sim ? c.gin_gcc.mean : nan) << ',' << fmt_num(sim ? c.gin_gcc.se : nan) << ','
       << fmt_num(sim ? c.gout_gcc.mean : nan) << ',' << fmt_num(sim ? c.gout_gcc.se : nan) << ','
       << fmt_num(sim ? c.spread.mean : nan) << ',' << fmt_num(sim ? c.spread.se : nan) << ','
       << fmt_num(sim ? c.vulnerability.mean : nan) << ',' << fmt_num(sim ? c.vulnerability.se : nan) << ','
       << fmt_num(a ? a->gin_gcc : nan) << ',' << fmt_num(a ? a->gout_gcc : nan) << ','
       << fmt_num(a ? a->spread : nan) << ',' << fmt_num(a ? a->vulnerability : nan) << '\n';
  }
}

inline nlohmann::json to_json(const ExperimentSummary& s) {
  using detail::num_or_null;
  const auto& cfg = s.config;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : s.cells) {
    auto ms = [&](const MeanSe& m) {
      return nlohmann::json{{"mean", num_or_null(m.mean)}, {"se", num_or_null(m.se)}, {"count", m.count}};
    };
    nlohmann::json j = {
        {"tau", c.tau},
        {"alpha", c.alpha},
        {"n", c.n},
        {"num_graphs", c.num_graphs},
        {"trials", c.trials},
        {"overlay_samples", c.overlay_samples},
        {"status", c.ok() ? "ok" : "failed"},
        {"wall_seconds", c.wall_seconds},
    };
    if (c.ok()) {
      j["gin_gcc_sim"] = ms(c.gin_gcc);
      j["gout_gcc_sim"] = ms(c.gout_gcc);
      j["spread_sim"] = ms(c.spread);
      j["vuln_sim"] = ms(c.vulnerability);
      j["gcc_fraction_sim"] = ms(c.gcc_fraction);
      j["originator_in_gin_rate"] = num_or_null(c.originator_in_gin_rate);
    } else {
      j["error"] = c.error;
    }
    if (c.analytic) {
      const auto& a = *c.analytic;
      j["analytic"] = {{"gin_gcc", a.gin_gcc},       {"gout_gcc", a.gout_gcc},
                       {"spread", a.spread},         {"vulnerability", a.vulnerability},
                       {"gcc", a.gcc},               {"iterations", a.iterations},
                       {"max_residual", a.max_residual}, {"guard_activations", a.guard_activations}};
    } else if (!c.analytic_error.empty()) {
      j["analytic_error"] = c.analytic_error;
    }
    cells.push_back(std::move(j));
  }
  return {
      {"config",
       {{"n", cfg.n},
        {"tau_values", cfg.tau_values},
        {"alpha_values", cfg.alpha_values},
        {"num_graphs", cfg.num_graphs},
        {"trials_per_graph", cfg.trials_per_graph},
        {"overlay_samples_per_graph", cfg.overlay_samples_per_graph},
        {"master_seed", cfg.master_seed},
        {"dmax", cfg.effective_dmax()},
        {"tolerance", cfg.solver.tolerance},
        {"max_iterations", cfg.solver.max_iterations},
        {"threads", cfg.threads}}},
      {"cells", cells},
  };
}

/// A parsed summary CSV row.
struct SummaryRow {
  double tau, alpha;
  double gin_gcc_sim, gin_gcc_se, gout_gcc_sim, gout_gcc_se, spread_sim, spread_se, vuln_sim, vuln_se;
  double gin_gcc_ana, gout_gcc_ana, spread_ana, vuln_ana;
};

inline std::vector<SummaryRow> read_summary_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.empty()) throw NoData("summary csv: empty input");
  std::map<std::string, std::size_t> col;
  {
    std::stringstream hs(line);
    std::string name;
    for (std::size_t i = 0; std::getline(hs, name, ','); ++i) col[name] = i;
  }
  const char* needed[] = {"tau",          "alpha",     "gin_gcc_sim",  "gin_gcc_se",  "gout_gcc_sim",
                          "gout_gcc_se",  "spread_sim", "spread_se",   "vuln_sim",    "vuln_se",
                          "gin_gcc_ana",  "gout_gcc_ana", "spread_ana", "vuln_ana"};
  for (const char* n : needed)
    if (!col.count(n)) throw InvalidParameter(std::string("summary csv: missing column ") + n);
  std::vector<SummaryRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    auto get = [&](const char* name) {
      const std::size_t i = col.at(name);
      if (i >= f.size()) throw InvalidParameter("summary csv: short row");
      try {
        return std::stod(f[i]);
      } catch (const std::exception&) {
        throw InvalidParameter("summary csv: bad number '" + f[i] + "'");
      }
    };
    rows.push_back({get("tau"), get("alpha"), get("gin_gcc_sim"), get("gin_gcc_se"), get("gout_gcc_sim"),
                    get("gout_gcc_se"), get("spread_sim"), get("spread_se"), get("vuln_sim"), get("vuln_se"),
                    get("gin_gcc_ana"), get("gout_gcc_ana"), get("spread_ana"), get("vuln_ana")});
  }
  if (rows.empty()) throw NoData("summary csv: no data rows");
  return rows;
}

}  // namespace immunet
