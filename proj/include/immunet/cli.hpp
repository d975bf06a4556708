#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "immunet/immunet.hpp"

namespace immunet::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3, kIo = 4 };

/// Parses "2.1,2.3,2.5" or an inclusive range "2.1:3.0:0.1".
inline std::vector<double> parse_value_list(const std::string& text) {
  std::vector<double> out;
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw InvalidParameter("bad number '" + s + "' in list '" + text + "'");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw InvalidParameter("range must be start:stop:step");
    const double lo = num(parts[0]), hi = num(parts[1]), step = num(parts[2]);
    if (!(step > 0.0) || hi < lo) throw InvalidParameter("range needs step > 0 and stop >= start");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(std::round((lo + step * i) * 1e9) / 1e9);
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');)
    if (!p.empty()) out.push_back(num(p));
  if (out.empty()) throw InvalidParameter("empty value list");
  return out;
}

namespace detail {

inline std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Run manifest: resolved flags as key=value lines (loadable again with
/// --config), provenance as comments.
class Manifest {
 public:
  explicit Manifest(std::string subcommand) : subcommand_(std::move(subcommand)), started_(utc_now()) {}

  template <class T>
  void set(const std::string& key, const T& value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    params_.emplace_back(key, os.str());
  }
  void set_text(const std::string& key, const std::string& value) { params_.emplace_back(key, "\"" + value + "\""); }
  void add_output(const std::string& path) { outputs_.push_back(path); }

  void write(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write manifest " + path);
    os << "# immunet run manifest\n";
    os << "# subcommand=" << subcommand_ << "\n";
    os << "# version=" << kVersion << "\n";
    os << "# started=" << started_ << "\n";
    os << "# finished=" << utc_now() << "\n";
    for (const auto& o : outputs_) os << "# output=" << o << "\n";
    for (const auto& [k, v] : params_) os << k << "=" << v << "\n";
  }

 private:
  std::string subcommand_;
  std::string started_;
  std::vector<std::pair<std::string, std::string>> params_;
  std::vector<std::string> outputs_;
};

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  return os;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return is;
}

inline DegreePmf load_pmf(const std::string& path) {
  auto is = open_in(path);
  return read_pmf(is);
}

struct DistSource {
  std::optional<double> tau;
  std::string pmf_file;
  long dmax = 9999;

  DegreePmf resolve() const {
    if (!pmf_file.empty()) return load_pmf(pmf_file);
    if (!tau) throw InvalidParameter("one of --tau or --pmf is required");
    if (dmax < 2) throw InvalidParameter("--dmax must be >= 2");
    return power_law_pmf(*tau, static_cast<Degree>(dmax));
  }

  void record(Manifest& m) const {
    if (!pmf_file.empty()) m.set_text("pmf", pmf_file);
    if (tau) m.set("tau", *tau);
    m.set("dmax", dmax);
  }
};

/// Flat key=value config whose keys belong to one subcommand, so manifests
/// need no section header.
class ScopedConfig : public CLI::ConfigTOML {
 public:
  explicit ScopedConfig(std::string subcommand) : subcommand_(std::move(subcommand)) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& is) const override {
    auto items = CLI::ConfigTOML::from_config(is);
    for (auto& item : items)
      if (item.parents.empty()) item.parents = {subcommand_};
    return items;
  }

 private:
  std::string subcommand_;
};

inline void add_dist_source(CLI::App* cmd, DistSource& src) {
  auto* tau = cmd->add_option("--tau", src.tau, "power-law exponent");
  auto* pmf = cmd->add_option("--pmf", src.pmf_file, "degree pmf file ('# pmf dmax=<d>' + 'degree probability' lines)");
  tau->excludes(pmf);
  cmd->add_option("--dmax", src.dmax, "largest degree of the power law")->capture_default_str();
}

}  // namespace detail

/// Entry point behind the immunet executable. `args` excludes the program
/// name. Returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Immunization by heuristic flooding on scale-free configuration-model graphs"};
  app.name("immunet");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  detail::DistSource dist_src;
  std::string dist_out;
  auto* dist = app.add_subcommand("dist", "degree statistics and phase verdict");
  detail::add_dist_source(dist, dist_src);
  dist->add_option("--out", dist_out, "also write the pmf to this file");

  detail::DistSource gen_src;
  long gen_n = 0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate a configuration-model multigraph as an edge list");
  detail::add_dist_source(gen, gen_src);
  gen->add_option("--n", gen_n, "node count")->required();
  gen->add_option("--seed", gen_seed, "seed")->envname("IMMUNET_SEED")->capture_default_str();
  gen->add_option("--out", gen_out, "edge-list file (default: stdout)");

  detail::DistSource ana_src;
  double ana_alpha = 1.0;
  double ana_tol = 1e-12;
  long ana_max_iter = 100000;
  double ana_damping = 1.0;
  bool ana_full = false;
  std::string ana_out;
  auto* ana = app.add_subcommand("analyze", "solve the fixed-point equations and print a JSON report");
  detail::add_dist_source(ana, ana_src);
  ana->add_option("--alpha", ana_alpha, "heuristic exponent")->capture_default_str();
  ana->add_option("--tol", ana_tol, "fixed-point tolerance (max-norm)")->capture_default_str();
  ana->add_option("--max-iter", ana_max_iter, "iteration cap per solve")->capture_default_str();
  ana->add_option("--damping", ana_damping, "Picard damping in (0,1]")->capture_default_str();
  ana->add_flag("--full", ana_full, "include per-degree vectors");
  ana->add_option("--out", ana_out, "JSON file (default: stdout)");

  std::string sim_tau = "2.1", sim_alpha = "1.0";
  ExperimentConfig sim_cfg;
  std::string sim_out;
  bool sim_no_analytic = false;
  long sim_dmax = 0;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo sweep with paired analytic predictions");
  // CLI11 only reads config files at the top level; the simulate command
  // falls through to it.
  app.set_config("--config", "", "simulate: key=value file with flag names as keys; flags override it");
  app.config_formatter(std::make_shared<detail::ScopedConfig>("simulate"));
  sim->fallthrough();
  sim->add_option("--tau-list", sim_tau, "taus: comma list or start:stop:step")->capture_default_str();
  sim->add_option("--alpha-list", sim_alpha, "alphas: comma list or start:stop:step")->capture_default_str();
  sim->add_option("--n", sim_cfg.n, "nodes per graph")->capture_default_str();
  sim->add_option("--dmax", sim_dmax, "degree cutoff (0 = n-1)")->capture_default_str();
  sim->add_option("--graphs", sim_cfg.num_graphs, "graphs per cell")->capture_default_str();
  sim->add_option("--trials", sim_cfg.trials_per_graph, "disseminations per graph")->capture_default_str();
  sim->add_option("--overlay-samples", sim_cfg.overlay_samples_per_graph, "overlays per graph")
      ->capture_default_str();
  sim->add_option("--seed", sim_cfg.master_seed, "master seed")->envname("IMMUNET_SEED")->capture_default_str();
  sim->add_option("--tol", sim_cfg.solver.tolerance, "solver tolerance")->capture_default_str();
  sim->add_option("--max-iter", sim_cfg.solver.max_iterations, "solver iteration cap")->capture_default_str();
  sim->add_option("--threads", sim_cfg.threads, "worker threads (does not change results)")->capture_default_str();
  sim->add_flag("--no-analytic", sim_no_analytic, "skip the analytic predictions");
  sim->add_option("--out", sim_out, "output prefix: writes <out>.csv, <out>.json, <out>.manifest")->required();

  std::string plot_csv, plot_dir;
  PlotAxes axes;
  auto* plot = app.add_subcommand("plot", "render the four comparison panels as SVG");
  plot->add_option("--csv", plot_csv, "summary CSV from simulate")->required();
  plot->add_option("--out", plot_dir, "output directory")->required();
  plot->add_option("--x-min", axes.x_min)->capture_default_str();
  plot->add_option("--x-max", axes.x_max)->capture_default_str();
  plot->add_option("--y-min", axes.y_min)->capture_default_str();
  plot->add_option("--y-max", axes.y_max)->capture_default_str();

  std::vector<std::string> owned{"immunet"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : owned) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::FileError& e) {
    app.exit(e, out, err);
    return kIo;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (dist->parsed()) {
      const auto pmf = dist_src.resolve();
      const auto phase = phase_criterion(pmf);
      out.precision(12);
      out << "dmax " << pmf.dmax() << "\n";
      out << "mean_degree " << mean_degree(pmf) << "\n";
      out << "branching_factor " << phase.branching_factor << "\n";
      out << "above_transition " << (phase.above_transition ? "true" : "false") << "\n";
      if (!dist_out.empty()) {
        detail::Manifest m("dist");
        dist_src.record(m);
        m.set_text("out", dist_out);
        {
          auto os = detail::open_out(dist_out);
          write_pmf(os, pmf);
        }
        m.add_output(dist_out);
        m.write(dist_out + ".manifest");
      }
    } else if (gen->parsed()) {
      if (gen_n < 2) throw InvalidParameter("--n must be >= 2");
      if (gen_src.pmf_file.empty() && !gen->get_option("--dmax")->count()) gen_src.dmax = gen_n - 1;
      const auto pmf = gen_src.resolve();
      Rng rng(gen_seed);
      const auto seq = sample_degree_sequence(pmf, static_cast<std::size_t>(gen_n), rng);
      const auto g = configuration_model(seq, rng);
      if (gen_out.empty()) {
        write_edge_list(out, g);
      } else {
        detail::Manifest m("gen");
        gen_src.record(m);
        m.set("n", gen_n);
        m.set("seed", gen_seed);
        m.set_text("out", gen_out);
        {
          auto os = detail::open_out(gen_out);
          write_edge_list(os, g);
        }
        m.add_output(gen_out);
        m.write(gen_out + ".manifest");
      }
    } else if (ana->parsed()) {
      FixedPointConfig fp;
      fp.tolerance = ana_tol;
      fp.max_iterations = ana_max_iter;
      fp.damping = ana_damping;
      fp.validate();
      const auto pmf = ana_src.resolve();
      const auto report = analyze(pmf, TanhHeuristic(ana_alpha), fp);
      auto j = to_json(report, ana_full);
      j["alpha"] = ana_alpha;
      if (ana_out.empty()) {
        out << j.dump(2) << "\n";
      } else {
        detail::Manifest m("analyze");
        ana_src.record(m);
        m.set("alpha", ana_alpha);
        m.set("tol", ana_tol);
        m.set("max-iter", ana_max_iter);
        m.set("damping", ana_damping);
        if (ana_full) m.set("full", "true");
        m.set_text("out", ana_out);
        {
          auto os = detail::open_out(ana_out);
          os << j.dump(2) << "\n";
        }
        m.add_output(ana_out);
        m.write(ana_out + ".manifest");
      }
    } else if (sim->parsed()) {
      sim_cfg.tau_values = parse_value_list(sim_tau);
      sim_cfg.alpha_values = parse_value_list(sim_alpha);
      if (sim_dmax < 0) throw InvalidParameter("--dmax must be >= 0");
      sim_cfg.dmax = static_cast<Degree>(sim_dmax);
      sim_cfg.with_analytic = !sim_no_analytic;
      sim_cfg.validate();
      sim_cfg.solver.validate();
      detail::Manifest m("simulate");
      m.set_text("tau-list", sim_tau);
      m.set_text("alpha-list", sim_alpha);
      m.set("n", sim_cfg.n);
      m.set("dmax", sim_dmax);
      m.set("graphs", sim_cfg.num_graphs);
      m.set("trials", sim_cfg.trials_per_graph);
      m.set("overlay-samples", sim_cfg.overlay_samples_per_graph);
      m.set("seed", sim_cfg.master_seed);
      m.set("tol", sim_cfg.solver.tolerance);
      m.set("max-iter", sim_cfg.solver.max_iterations);
      m.set("threads", sim_cfg.threads);
      if (sim_no_analytic) m.set("no-analytic", "true");
      m.set_text("out", sim_out);
      const auto summary = run_experiment(sim_cfg);
      {
        auto os = detail::open_out(sim_out + ".csv");
        write_summary_csv(os, summary);
      }
      {
        auto os = detail::open_out(sim_out + ".json");
        os << to_json(summary).dump(2) << "\n";
      }
      m.add_output(sim_out + ".csv");
      m.add_output(sim_out + ".json");
      m.write(sim_out + ".manifest");
      std::size_t failed = 0;
      for (const auto& c : summary.cells) failed += c.ok() ? 0 : 1;
      out << "cells " << summary.cells.size() << " failed " << failed << "\n";
      if (failed == summary.cells.size()) return kNumerical;
    } else if (plot->parsed()) {
      std::vector<SummaryRow> rows;
      {
        auto is = detail::open_in(plot_csv);
        rows = read_summary_csv(is);
      }
      std::error_code ec;
      std::filesystem::create_directories(plot_dir, ec);
      if (ec) throw IoError("cannot create " + plot_dir + ": " + ec.message());
      for (const auto& panel : figure_panels()) {
        const auto path = (std::filesystem::path(plot_dir) / panel.file_name).string();
        auto os = detail::open_out(path);
        os << render_panel_svg(rows, panel, axes);
        out << path << "\n";
      }
    }
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const NoData& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}

}  // namespace immunet::cli
