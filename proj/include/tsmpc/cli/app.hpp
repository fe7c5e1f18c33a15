#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsmpc/certify/report_io.hpp"
#include "tsmpc/config/run_config.hpp"
#include "tsmpc/sim/csv.hpp"

namespace tsmpc::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigError = 1, kCertificationFail = 2, kDivergence = 3 };

struct Options {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::string> deltas, seed, strategy, delta;
};

namespace detail {

namespace fs = std::filesystem;

inline std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  return f;
}

/// Config file plus command-line overrides, resolved.
inline config::RunConfig resolve(const Options& o) {
  config::Document doc = o.config_path.empty() ? config::Document{} : config::parse_file(o.config_path);
  if (o.delta) doc.mutable_section("sim").set("delta", *o.delta);
  if (o.deltas) doc.mutable_section("sim").set("deltas", *o.deltas);
  if (o.strategy) doc.mutable_section("sim").set("strategy", *o.strategy);
  if (o.seed) {
    doc.mutable_section("sim").set("seed", *o.seed);
    doc.mutable_section("certify").set("seed", *o.seed);
  }
  return config::from_document(doc);
}

inline void write_manifest(const fs::path& dir, const Options& o, const config::RunConfig& c) {
  fs::create_directories(dir);
  auto f = open_out(dir / "manifest.cfg");
  f << "# tsmpc run manifest\n"
    << "# tool_version = " << kVersion << "\n"
    << "# config = " << (o.config_path.empty() ? "(defaults)" : o.config_path) << "\n"
    << "# output = " << dir.string() << "\n"
    << "# seed = " << c.seed << "\n";
  config::write_config(f, c);
}

inline std::string cell_name(const ComparisonRow& r) {
  return "trace_delta" + csv::num(r.delta) + "_" + r.strategy.cli_name() + ".csv";
}

inline std::vector<ComparisonRun> sweep(const config::RunConfig& c) {
  const auto model = c.make_model();
  std::vector<ComparisonRun> runs;
  for (double d : c.deltas) {
    const OcpSpec spec = c.make_spec(d);
    for (const Strategy& st : Strategy::benchmark_set()) {
      runs.push_back(run_cell(*model, spec, c.solver, c.make_sim(), st, c.skip_fraction));
    }
  }
  return runs;
}

inline std::vector<ComparisonRow> rows_of(const std::vector<ComparisonRun>& runs) {
  std::vector<ComparisonRow> rows;
  for (const auto& r : runs) rows.push_back(r.row);
  return rows;
}

/// Per delta: time-averaged angle error of each strategy and which one is smallest.
inline void write_ordering(std::ostream& out, const std::vector<ComparisonRun>& runs) {
  std::map<double, std::vector<const ComparisonRow*>> by_delta;
  for (const auto& r : runs) by_delta[r.row.delta].push_back(&r.row);
  for (const auto& [d, rows] : by_delta) {
    out << "delta " << csv::num(d) << ":";
    const ComparisonRow* best = nullptr;
    std::map<std::string, double> mean;
    for (const auto* r : rows) {
      out << " " << r->strategy.cli_name() << " mean|theta| " << csv::num(r->mean_abs_err_theta)
          << (r->diverged ? " (diverged)" : "") << ";";
      mean[r->strategy.cli_name()] = r->mean_abs_err_theta;
      if (!r->diverged && (!best || r->mean_abs_err_theta < best->mean_abs_err_theta)) best = r;
    }
    out << " smallest " << (best ? best->strategy.cli_name() : "none");
    if (mean.count("proposed") && mean.count("subopt-full")) {
      out << "; proposed - subopt-full " << csv::num(mean["proposed"] - mean["subopt-full"]);
    }
    out << "\n";
  }
}

inline int cmd_simulate(const Options& o, std::ostream& log) {
  const config::RunConfig c = resolve(o);
  const fs::path dir(o.out_dir);
  write_manifest(dir, o, c);
  const auto model = c.make_model();
  const OcpSpec spec = c.make_spec(c.delta);
  const SimTrace trace = simulate(*model, spec, c.solver, c.make_sim());
  {
    auto f = open_out(dir / "trace.csv");
    csv::write_trace(f, trace);
  }
  {
    auto f = open_out(dir / "plot.gp");
    csv::write_trace_plot(f, {"trace.csv"}, {c.strategy.cli_name() + ", delta = " + csv::num(c.delta)});
  }
  std::ostringstream line;
  line << "strategy=" << c.strategy.cli_name() << " delta=" << csv::num(c.delta)
       << " final_err_theta=" << csv::num(trace.final_err_theta);
  if (auto fit = try_fit_rate(trace, c.skip_fraction)) {
    line << " rate_per_s=" << csv::num(fit->rate_per_second) << " r2=" << csv::num(fit->r2);
  } else {
    line << " rate_per_s=none";
  }
  line << " diverged=" << (trace.diverged ? 1 : 0);
  {
    auto f = open_out(dir / "summary.txt");
    f << line.str() << "\n";
  }
  log << line.str() << "\n";
  if (trace.diverged) {
    log << "diverged: " << trace.divergence_reason << "\n";
    return kDivergence;
  }
  return kOk;
}

inline int cmd_sweep(const Options& o, std::ostream& log, bool with_traces) {
  const config::RunConfig c = resolve(o);
  const fs::path dir(o.out_dir);
  write_manifest(dir, o, c);
  const std::vector<ComparisonRun> runs = sweep(c);
  {
    auto f = open_out(dir / "comparison.csv");
    csv::write_comparison(f, rows_of(runs));
  }
  if (with_traces) {
    std::vector<std::string> files, titles;
    for (const auto& r : runs) {
      files.push_back(cell_name(r.row));
      titles.push_back(r.row.strategy.cli_name() + ", delta = " + csv::num(r.row.delta));
      auto f = open_out(dir / files.back());
      csv::write_trace(f, r.trace);
    }
    {
      auto f = open_out(dir / "plot.gp");
      csv::write_trace_plot(f, files, titles);
    }
    auto f = open_out(dir / "summary.txt");
    write_ordering(f, runs);
    write_ordering(log, runs);
  }
  log << runs.size() << " runs written to " << (dir / "comparison.csv").string() << "\n";
  return kOk;
}

inline int cmd_certify(const Options& o, std::ostream& log) {
  const config::RunConfig c = resolve(o);
  const fs::path dir(o.out_dir);
  write_manifest(dir, o, c);
  const auto model = c.make_model();
  const OcpSpec spec = c.make_spec(c.delta);
  const certify::CertificateReport rep = certify::full_certificate(*model, spec, c.solver, c.plan);
  {
    auto f = open_out(dir / "certificate.txt");
    certify::write_text(f, rep);
  }
  {
    auto f = open_out(dir / "certificate.json");
    certify::write_json(f, rep);
  }
  for (const auto& v : rep.verdicts) {
    if (!(v.evaluated && v.passed)) log << "FAIL " << v.name << ": " << v.detail << "\n";
  }
  log << "certificate " << (rep.passed() ? "PASS" : "FAIL") << ", delta_bar = "
      << (rep.delta_bar.value ? csv::num(*rep.delta_bar.value) : std::string("none")) << "\n";
  return rep.passed() ? kOk : kCertificationFail;
}

}  // namespace detail

/// Runs the tool on `argv`; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Two-timescale suboptimal MPC experiments and stability certificates", "tsmpc"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "config file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "random seed (sim and certify)");
    sub->add_option("--delta", o.delta, "timescale delta");
  };
  auto* simulate = app.add_subcommand("simulate", "closed-loop run, writes trace.csv, summary.txt, plot.gp");
  common(simulate);
  simulate->add_option("--strategy", o.strategy, "proposed|subopt-full|opt-full");
  auto* sweep = app.add_subcommand("sweep", "all strategies over a delta list, writes comparison.csv");
  common(sweep);
  sweep->add_option("--deltas", o.deltas, "comma-separated delta list");
  auto* compare = app.add_subcommand("compare", "sweep plus per-run traces, plot.gp and an ordering summary");
  common(compare);
  compare->add_option("--deltas", o.deltas, "comma-separated delta list");
  auto* certify = app.add_subcommand("certify", "sampled stability certificate, writes certificate.txt/.json");
  common(certify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, log, err);
    return code == 0 ? kOk : kConfigError;
  }
  try {
    if (simulate->parsed()) return detail::cmd_simulate(o, log);
    if (sweep->parsed()) return detail::cmd_sweep(o, log, false);
    if (compare->parsed()) return detail::cmd_sweep(o, log, true);
    return detail::cmd_certify(o, log);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DimensionError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NonFiniteError& e) {
    err << "diverged: " << e.what() << "\n";
    return kDivergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace tsmpc::cli
