#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>

#include "tsmpc/mpc/ocp.hpp"

namespace tsmpc {

/// `spectral` starts each Armijo search from the Barzilai-Borwein step s's / s'y of the previous
/// iteration (alpha0 on the first one); it only differs from `backtracking` inside solve_optimal.
enum class StepRule { fixed, backtracking, spectral };

inline const char* to_string(StepRule r) {
  switch (r) {
    case StepRule::fixed: return "fixed";
    case StepRule::backtracking: return "backtracking";
    case StepRule::spectral: return "spectral";
  }
  return "?";
}

inline StepRule step_rule_from_string(const std::string& s) {
  if (s == "fixed") return StepRule::fixed;
  if (s == "backtracking") return StepRule::backtracking;
  if (s == "spectral") return StepRule::spectral;
  throw ConfigError("step_rule: invalid value '" + s + "'; allowed values: fixed|backtracking|spectral");
}

struct SolverConfig {
  int iters_per_sample = 1;
  StepRule step_rule = StepRule::backtracking;
  double alpha0 = 1.0;   // fixed step, or first trial step when backtracking
  double shrink = 0.5;
  double armijo_c = 1e-4;
  int max_backtracks = 60;
  double optimal_tolerance = 1e-8;
  int max_optimal_iters = 100000;
  StepRule optimal_step_rule = StepRule::spectral;  // used by solve_optimal

  void validate() const {
    if (iters_per_sample < 1) throw ConfigError("iters_per_sample must be >= 1");
    if (!(alpha0 > 0.0)) throw ConfigError("alpha0 must be positive");
    if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError("shrink must lie in (0, 1)");
    if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("armijo_c must lie in (0, 1)");
    if (max_backtracks < 1) throw ConfigError("max_backtracks must be >= 1");
    if (!(optimal_tolerance > 0.0)) throw ConfigError("optimal_tol must be positive");
    if (max_optimal_iters < 0) throw ConfigError("max_optimal_iters must be >= 0");
  }
};

/// Stacked input sequence plus what the last solver call did with it.
struct OptimizerState {
  Vector z;
  int iterations_used = 0;
  double projected_gradient_norm = 0.0;
  bool converged = false;      // solve_optimal only
  bool step_rejected = false;  // a backtracking search ran out of trials

  static OptimizerState zeros(Eigen::Index size) {
    OptimizerState s;
    s.z = Vector::Zero(size);
    return s;
  }
};

/// Anything the projected-gradient iteration can minimize over a box.
template <class T>
concept BoxObjective = requires(T& obj, const Vector& z, Vector& g, Vector& zm) {
  { obj.value(z) } -> std::convertible_to<double>;
  { obj.value_and_gradient(z, g) } -> std::convertible_to<double>;
  obj.project(zm);
};

namespace detail {

/// Relative size of cost changes the Armijo test treats as rounding noise. Without it the
/// backtracking search stalls once the predicted decrease drops below ulp(J).
inline constexpr double kCostNoiseRel = 1e-13;

enum class StepOutcome { moved, stationary, rejected };

/// One projected-gradient step from `z` given its cost `J` and gradient `g`. A rejected step
/// (backtracking ran out of trials) and a stationary one both leave `z` untouched.
template <BoxObjective Objective>
StepOutcome projected_step(Objective& obj, const SolverConfig& cfg, StepRule rule, double alpha, Vector& z,
                           double J, const Vector& g, Vector& trial) {
  trial = z - alpha * g;
  obj.project(trial);
  if (trial == z) return StepOutcome::stationary;
  if (rule == StepRule::fixed) {
    z.swap(trial);
    return StepOutcome::moved;
  }
  const double noise = kCostNoiseRel * std::abs(J);
  for (int k = 0; k < cfg.max_backtracks; ++k) {
    if (k > 0) {
      trial = z - alpha * g;
      obj.project(trial);
    }
    if (obj.value(trial) <= J + cfg.armijo_c * g.dot(trial - z) + noise) {
      z.swap(trial);
      return StepOutcome::moved;
    }
    alpha *= cfg.shrink;
  }
  return StepOutcome::rejected;
}

template <BoxObjective Objective>
double projected_gradient_norm(Objective& obj, const Vector& z, const Vector& g, Vector& scratch) {
  scratch = z - g;
  obj.project(scratch);
  return (z - scratch).norm();
}

}  // namespace detail

/// Suboptimal update: `iters_per_sample` projected-gradient iterations, stopping early only at an
/// exactly stationary point where further iterations would be the identity.
template <BoxObjective Objective>
OptimizerState solver_map(Objective& obj, const SolverConfig& cfg, const Vector& z_in) {
  OptimizerState out;
  out.z = z_in;
  Vector g, trial;
  for (int k = 0; k < cfg.iters_per_sample; ++k) {
    const double J = obj.value_and_gradient(out.z, g);
    const auto step = detail::projected_step(obj, cfg, cfg.step_rule, cfg.alpha0, out.z, J, g, trial);
    if (step == detail::StepOutcome::stationary) break;
    if (step == detail::StepOutcome::rejected) {
      out.step_rejected = true;
      break;
    }
    ++out.iterations_used;
  }
  obj.value_and_gradient(out.z, g);
  out.projected_gradient_norm = detail::projected_gradient_norm(obj, out.z, g, trial);
  return out;
}

/// Iterates until the projected-gradient norm reaches `optimal_tolerance`. The `converged` flag
/// is false when the iteration budget ran out first.
template <BoxObjective Objective>
OptimizerState solve_optimal(Objective& obj, const SolverConfig& cfg, const Vector& z_init) {
  OptimizerState out;
  out.z = z_init;
  Vector g, g_prev, z_prev, trial;
  double alpha = cfg.alpha0;
  while (true) {
    const double J = obj.value_and_gradient(out.z, g);
    out.projected_gradient_norm = detail::projected_gradient_norm(obj, out.z, g, trial);
    if (out.projected_gradient_norm <= cfg.optimal_tolerance) {
      out.converged = true;
      break;
    }
    if (out.iterations_used >= cfg.max_optimal_iters) break;
    if (cfg.optimal_step_rule == StepRule::spectral && out.iterations_used > 0) {
      const double sy = (out.z - z_prev).dot(g - g_prev);
      const double ss = (out.z - z_prev).squaredNorm();
      alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-10, 1e10) : cfg.alpha0;
    }
    z_prev = out.z;
    g_prev = g;
    const auto step = detail::projected_step(obj, cfg, cfg.optimal_step_rule, alpha, out.z, J, g, trial);
    if (step == detail::StepOutcome::stationary) break;
    if (step == detail::StepOutcome::rejected) {
      out.step_rejected = true;
      break;
    }
    ++out.iterations_used;
  }
  return out;
}

inline OptimizerState solver_map(const OcpSpec& spec, const PlantModel& model, const SolverConfig& cfg,
                                 const TargetState& x0, const Vector& z) {
  OcpObjective obj(spec, model, x0.values);
  return solver_map(obj, cfg, z);
}

inline OptimizerState solve_optimal(const OcpSpec& spec, const PlantModel& model, const SolverConfig& cfg,
                                    const TargetState& x0, const Vector& z_init) {
  OcpObjective obj(spec, model, x0.values);
  return solve_optimal(obj, cfg, z_init);
}

/// First input block of the stacked sequence.
inline ControlInput apply_pi(const Vector& z, Eigen::Index m) {
  if (m < 1 || z.size() < m) throw DimensionError("apply_pi: decision vector shorter than one input block");
  return ControlInput(Vector(z.head(m)));
}

/// Receding-horizon warm start: drop the first block and repeat the last one.
inline Vector warm_start_shift(const Vector& z, Eigen::Index m) {
  if (m < 1 || z.size() < m || z.size() % m != 0) throw DimensionError("warm_start_shift: bad block size");
  const Eigen::Index len = z.size();
  Vector out(len);
  out.head(len - m) = z.tail(len - m);
  out.tail(m) = z.tail(m);
  return out;
}

}  // namespace tsmpc
