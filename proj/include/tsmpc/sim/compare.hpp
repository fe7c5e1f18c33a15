#pragma once

#include <vector>

#include "tsmpc/sim/rate_fit.hpp"

namespace tsmpc {

struct ComparisonRow {
  double delta = 0.0;
  Strategy strategy;
  double final_err_theta = 0.0;
  double rate_per_s = 0.0;  // 0 when the fit was refused
  double r2 = 0.0;
  double mean_iters = 0.0;
  bool diverged = false;
  double mean_abs_err_theta = 0.0;  // not part of the CSV schema
  bool fit_available = false;
};

struct ComparisonRun {
  ComparisonRow row;
  SimTrace trace;
};

/// Copy of `tmpl` re-targeted at `delta` with the horizon covering `horizon_seconds`.
inline OcpSpec spec_for_delta(const OcpSpec& tmpl, Timescale delta, double horizon_seconds) {
  OcpSpec s = tmpl;
  s.delta = delta;
  s.horizon_N = horizon_steps(horizon_seconds, delta);
  return s;
}

inline ComparisonRun run_cell(const PlantModel& model, const OcpSpec& spec, const SolverConfig& solver,
                              SimConfig cfg, Strategy strategy, double skip_fraction) {
  cfg.strategy = strategy;
  cfg.delta = spec.delta;
  cfg.z0 = Vector();
  ComparisonRun run;
  run.trace = simulate(model, spec, solver, cfg);
  ComparisonRow& row = run.row;
  row.delta = spec.delta.seconds();
  row.strategy = strategy;
  row.final_err_theta = run.trace.final_err_theta;
  row.mean_iters = run.trace.mean_solver_iters();
  row.diverged = run.trace.diverged;
  row.mean_abs_err_theta = run.trace.mean_abs_err_theta();
  if (auto fit = try_fit_rate(run.trace, skip_fraction)) {
    row.rate_per_s = fit->rate_per_second;
    row.r2 = fit->r2;
    row.fit_available = true;
  }
  return run;
}

/// Every delta crossed with the three benchmark strategies, in that order.
inline std::vector<ComparisonRun> compare_strategies(const PlantModel& model, const OcpSpec& spec_template,
                                                     double horizon_seconds, const SolverConfig& solver,
                                                     const SimConfig& base, const std::vector<double>& deltas,
                                                     double skip_fraction = 0.2) {
  if (deltas.empty()) throw ConfigError("deltas must be nonempty");
  std::vector<ComparisonRun> out;
  for (double d : deltas) {
    const Timescale delta(d);
    const OcpSpec spec = spec_for_delta(spec_template, delta, horizon_seconds);
    for (const Strategy& s : Strategy::benchmark_set()) {
      out.push_back(run_cell(model, spec, solver, base, s, skip_fraction));
    }
  }
  return out;
}

}  // namespace tsmpc
