#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "tsmpc/mpc/solver.hpp"

namespace tsmpc {

enum class PlantKind { full_order, reduced_order };
enum class SolverKind { suboptimal, optimal };

struct Strategy {
  PlantKind plant = PlantKind::full_order;
  SolverKind solver = SolverKind::suboptimal;

  bool operator==(const Strategy&) const = default;

  /// Full-order plant driven by the suboptimal reduced-model optimizer.
  static Strategy proposed() { return {PlantKind::full_order, SolverKind::suboptimal}; }
  /// Benchmark: the plant is the reduced model itself, suboptimal optimizer.
  static Strategy subopt_full() { return {PlantKind::reduced_order, SolverKind::suboptimal}; }
  /// Benchmark: the plant is the reduced model itself, optimizer solved to tolerance.
  static Strategy opt_full() { return {PlantKind::reduced_order, SolverKind::optimal}; }

  static const std::vector<Strategy>& benchmark_set() {
    static const std::vector<Strategy> all{proposed(), subopt_full(), opt_full()};
    return all;
  }

  std::string cli_name() const {
    if (*this == proposed()) return "proposed";
    if (*this == subopt_full()) return "subopt-full";
    if (*this == opt_full()) return "opt-full";
    return "full-optimal";
  }
  static Strategy from_cli_name(const std::string& s) {
    if (s == "proposed") return proposed();
    if (s == "subopt-full") return subopt_full();
    if (s == "opt-full") return opt_full();
    throw ConfigError("strategy: invalid value '" + s + "'; allowed values: proposed|subopt-full|opt-full");
  }
};

inline const char* to_string(PlantKind k) { return k == PlantKind::full_order ? "full_order" : "reduced_order"; }
inline const char* to_string(SolverKind k) { return k == SolverKind::suboptimal ? "suboptimal" : "optimal"; }

struct SimConfig {
  Timescale delta{0.01};
  double duration_s = 10.0;
  TargetState x0{1.0, 0.0};
  ExtraState xi0{0.0};
  Vector z0;  // empty means zeros
  Strategy strategy = Strategy::proposed();
  long long seed = 0;

  int step_count() const { return static_cast<int>(std::lround(duration_s / delta.seconds())); }
};

struct SimRecord {
  int step = 0;
  double time_s = 0.0;
  Vector x, xi, u;
  double err_norm = 0.0;
  double err_theta = 0.0;
  double stage_cost = 0.0;
  int solver_iters = 0;
  double pg_norm = 0.0;
};

/// One row per simulated step t = 0..steps-1; the row holds the state at t, the applied input
/// and the diagnostics of the optimizer update performed during that step.
struct SimTrace {
  std::vector<SimRecord> records;
  Vector final_x, final_xi, final_z;
  double final_err_norm = 0.0;
  double final_err_theta = 0.0;
  bool diverged = false;
  std::string divergence_reason;
  Timescale delta{0.01};

  double mean_abs_err_theta() const {
    if (records.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : records) s += r.err_theta;
    return s / static_cast<double>(records.size());
  }
  double mean_solver_iters() const {
    if (records.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : records) s += r.solver_iters;
    return s / static_cast<double>(records.size());
  }
};

/// Closed loop of plant and optimizer. Per step t:
///   u_t = Pi(z_t);  x_{t+1} from f (full) or f_R (reduced);  xi_{t+1} = g(...) (full only);
///   z_{t+1} = T(shift(z_t), x_{t+1})  or the tolerance solve from the same warm start.
/// The prediction model is always the reduced map. For the reduced plant the recorded extra state
/// is xi_eq(x_t, u_t).
inline SimTrace simulate(const PlantModel& model, const OcpSpec& spec, const SolverConfig& solver,
                         const SimConfig& cfg) {
  const PlantDims dims = model.dims();
  spec.validate(dims);
  solver.validate();
  if (!(cfg.duration_s > 0.0)) throw ConfigError("duration_s must be positive");
  if (!(cfg.delta == spec.delta)) throw ConfigError("simulation delta differs from the OCP delta");
  detail::check_delta(model, cfg.delta);
  require_dim(cfg.x0.values, dims.n, "x0");
  require_dim(cfg.xi0.values, dims.p, "xi0");

  const double d = cfg.delta.seconds();
  const int steps = cfg.step_count();
  const Vector x_star = model.target_equilibrium();

  SimTrace trace;
  trace.delta = cfg.delta;
  trace.records.reserve(static_cast<std::size_t>(steps));

  Vector x = cfg.x0.values;
  Vector z = cfg.z0.size() == 0 ? Vector::Zero(spec.decision_size()) : cfg.z0;
  require_dim(z, spec.decision_size(), "z0");
  Vector xi(dims.p);
  const bool full = cfg.strategy.plant == PlantKind::full_order;
  if (full) {
    xi = cfg.xi0.values;
  } else {
    model.equilibrium_map(x, z.head(dims.m), xi);
  }
  Vector x_next(dims.n), xi_next(dims.p);

  for (int t = 0; t < steps; ++t) {
    SimRecord rec;
    rec.step = t;
    rec.time_s = t * d;
    rec.u = z.head(dims.m);
    if (!full) model.equilibrium_map(x, rec.u, xi);
    rec.x = x;
    rec.xi = xi;
    rec.err_norm = (x - x_star).norm();
    rec.err_theta = std::abs(x[0] - x_star[0]);
    rec.stage_cost = x.dot(spec.Q * x) + rec.u.dot(spec.Rw * rec.u);

    if (full) {
      model.target_map(x, xi, rec.u, d, x_next);
      model.extra_map(xi, x, rec.u, d, xi_next);
    } else {
      reduced_map(model, x, rec.u, d, xi_next, x_next);
    }
    if (!x_next.allFinite() || !xi_next.allFinite()) {
      trace.records.push_back(std::move(rec));
      trace.diverged = true;
      trace.divergence_reason = "non-finite plant state at step " + std::to_string(t + 1);
      break;
    }
    x.swap(x_next);
    if (full) xi.swap(xi_next);

    try {
      OcpObjective obj(spec, model, x);
      const Vector warm = warm_start_shift(z, dims.m);
      OptimizerState st = cfg.strategy.solver == SolverKind::suboptimal ? solver_map(obj, solver, warm)
                                                                        : solve_optimal(obj, solver, warm);
      z = std::move(st.z);
      rec.solver_iters = st.iterations_used;
      rec.pg_norm = st.projected_gradient_norm;
    } catch (const NonFiniteError& e) {
      trace.records.push_back(std::move(rec));
      trace.diverged = true;
      trace.divergence_reason = e.what();
      break;
    }
    trace.records.push_back(std::move(rec));
  }

  trace.final_x = x;
  if (!full && !trace.diverged) model.equilibrium_map(x, z.head(dims.m), xi);
  trace.final_xi = xi;
  trace.final_z = z;
  trace.final_err_norm = (x - x_star).norm();
  trace.final_err_theta = std::abs(x[0] - x_star[0]);
  return trace;
}

}  // namespace tsmpc
