#pragma once

#include <cstdio>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "tsmpc/certify/sampling.hpp"
#include "tsmpc/config/keyvalue.hpp"
#include "tsmpc/core/linear_test_model.hpp"
#include "tsmpc/core/pendulum.hpp"
#include "tsmpc/sim/compare.hpp"

namespace tsmpc::config {

enum class PlantChoice { pendulum, linear };

inline const char* to_string(PlantChoice p) { return p == PlantChoice::pendulum ? "pendulum" : "linear"; }

inline LinearTestParams linear_from_section(const Section& s) {
  s.require_known({"a", "b", "c", "rho"});
  LinearTestParams p;
  p.a = s.get_double("a", p.a);
  p.b = s.get_double("b", p.b);
  p.c = s.get_double("c", p.c);
  p.rho = s.get_double("rho", p.rho);
  return p;
}

/// Fully resolved run configuration. Every field has a default; a config file only overrides.
struct RunConfig {
  PlantChoice plant = PlantChoice::pendulum;
  PendulumParams pendulum;
  LinearTestParams linear;

  double horizon_s = 0.5;
  int horizon_N = 0;  // 0: derive from horizon_s and delta
  std::vector<double> Q, Qf, Rw;
  double u_max = 24.0;

  SolverConfig solver;

  double delta = 0.01;
  double duration_s = 10.0;
  std::vector<double> x0, xi0;
  Strategy strategy = Strategy::proposed();
  long long seed = 0;
  double skip_fraction = 0.2;
  std::vector<double> deltas{0.01, 0.1, 0.2};

  certify::SamplingPlan plan;

  std::unique_ptr<PlantModel> make_model() const {
    if (plant == PlantChoice::pendulum) return std::make_unique<PendulumModel>(pendulum);
    return std::make_unique<LinearTestModel>(linear);
  }

  int horizon_for(double d) const {
    return horizon_N > 0 ? horizon_N : horizon_steps(horizon_s, Timescale(d));
  }

  OcpSpec make_spec(double d) const {
    OcpSpec s;
    s.delta = Timescale(d);
    s.horizon_N = horizon_for(d);
    auto diag = [](const std::vector<double>& v) {
      return Matrix(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())).asDiagonal());
    };
    s.Q = diag(Q);
    s.Qf = diag(Qf);
    s.Rw = diag(Rw);
    s.input_box = Box::symmetric(s.Rw.rows(), u_max);
    return s;
  }

  SimConfig make_sim() const {
    SimConfig c;
    c.delta = Timescale(delta);
    c.duration_s = duration_s;
    c.x0 = TargetState(Eigen::Map<const Vector>(x0.data(), static_cast<Eigen::Index>(x0.size())));
    c.xi0 = ExtraState(Eigen::Map<const Vector>(xi0.data(), static_cast<Eigen::Index>(xi0.size())));
    c.strategy = strategy;
    c.seed = seed;
    return c;
  }
};

namespace detail {

inline const std::set<std::string>& ocp_keys() {
  static const std::set<std::string> k{"horizon_s", "horizon_N", "Q", "Qf", "Rw", "u_max"};
  return k;
}
inline const std::set<std::string>& solver_keys() {
  static const std::set<std::string> k{"iters_per_sample", "step_rule",  "alpha0",      "shrink",
                                       "armijo_c",         "max_backtracks", "optimal_tol", "max_optimal_iters",
                                       "optimal_step_rule"};
  return k;
}
inline const std::set<std::string>& sim_keys() {
  static const std::set<std::string> k{"plant", "delta", "duration_s", "x0",           "xi0",
                                       "strategy", "seed", "skip_fraction", "deltas"};
  return k;
}

inline void positive_list(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw ConfigError(std::string(what) + " must be nonempty");
  for (double d : v) {
    if (!(d > 0.0) || !std::isfinite(d)) throw ConfigError(std::string(what) + ": delta must be positive");
  }
}

}  // namespace detail

inline RunConfig from_document(const Document& doc) {
  doc.require_known_sections({"", "pendulum", "linear", "ocp", "solver", "sim", "certify"});
  if (!doc.section("").entries().empty()) {
    throw ConfigError("key '" + doc.section("").entries().begin()->first + "' appears before any section header");
  }
  RunConfig c;
  const Section& sim = doc.section("sim");
  sim.require_known(detail::sim_keys());
  c.plant = sim.get_choice("plant", "pendulum", {"pendulum", "linear"}) == "pendulum" ? PlantChoice::pendulum
                                                                                      : PlantChoice::linear;
  const bool pend = c.plant == PlantChoice::pendulum;
  c.pendulum = PendulumParams::from_section(doc.section("pendulum"));
  c.linear = linear_from_section(doc.section("linear"));
  const std::unique_ptr<PlantModel> model = c.make_model();
  const PlantDims dims = model->dims();

  const Section& ocp = doc.section("ocp");
  ocp.require_known(detail::ocp_keys());
  c.horizon_s = ocp.get_double("horizon_s", c.horizon_s);
  if (!(c.horizon_s > 0.0)) throw ConfigError("ocp.horizon_s must be positive");
  c.horizon_N = static_cast<int>(ocp.get_int("horizon_N", pend ? 0 : 1));
  if (c.horizon_N < 0) throw ConfigError("ocp.horizon_N must be >= 0 (0 derives it from horizon_s)");
  c.Q = ocp.get_list("Q", pend ? std::vector<double>{100.0, 0.1} : std::vector<double>{1.0});
  c.Qf = ocp.get_list("Qf", c.Q);
  c.Rw = ocp.get_list("Rw", pend ? std::vector<double>{0.01} : std::vector<double>{1.0});
  c.u_max = ocp.get_double("u_max", pend ? 24.0 : 10.0);
  if (!(c.u_max > 0.0)) throw ConfigError("ocp.u_max must be positive");
  if (static_cast<Eigen::Index>(c.Q.size()) != dims.n || static_cast<Eigen::Index>(c.Qf.size()) != dims.n) {
    throw ConfigError("ocp.Q and ocp.Qf need " + std::to_string(dims.n) + " diagonal entries");
  }
  if (static_cast<Eigen::Index>(c.Rw.size()) != dims.m) {
    throw ConfigError("ocp.Rw needs " + std::to_string(dims.m) + " diagonal entries");
  }

  const Section& sol = doc.section("solver");
  sol.require_known(detail::solver_keys());
  SolverConfig& s = c.solver;
  s.iters_per_sample = static_cast<int>(sol.get_int("iters_per_sample", s.iters_per_sample));
  s.step_rule = step_rule_from_string(sol.get_string("step_rule", to_string(s.step_rule)));
  s.alpha0 = sol.get_double("alpha0", s.alpha0);
  s.shrink = sol.get_double("shrink", s.shrink);
  s.armijo_c = sol.get_double("armijo_c", s.armijo_c);
  s.max_backtracks = static_cast<int>(sol.get_int("max_backtracks", s.max_backtracks));
  s.optimal_tolerance = sol.get_double("optimal_tol", s.optimal_tolerance);
  s.max_optimal_iters = static_cast<int>(sol.get_int("max_optimal_iters", s.max_optimal_iters));
  s.optimal_step_rule = step_rule_from_string(sol.get_string("optimal_step_rule", to_string(s.optimal_step_rule)));
  s.validate();

  c.delta = sim.get_double("delta", c.delta);
  (void)Timescale(c.delta);
  c.duration_s = sim.get_double("duration_s", c.duration_s);
  if (!(c.duration_s > 0.0)) throw ConfigError("sim.duration_s must be positive");
  c.x0 = sim.get_list("x0", pend ? std::vector<double>{1.0, 0.0} : std::vector<double>{1.0});
  c.xi0 = sim.get_list("xi0", std::vector<double>(static_cast<std::size_t>(dims.p), 0.0));
  if (static_cast<Eigen::Index>(c.x0.size()) != dims.n) {
    throw ConfigError("sim.x0 needs " + std::to_string(dims.n) + " entries");
  }
  if (static_cast<Eigen::Index>(c.xi0.size()) != dims.p) {
    throw ConfigError("sim.xi0 needs " + std::to_string(dims.p) + " entries");
  }
  c.strategy = Strategy::from_cli_name(sim.get_choice("strategy", "proposed", {"proposed", "subopt-full", "opt-full"}));
  c.seed = sim.get_int("seed", c.seed);
  c.skip_fraction = sim.get_double("skip_fraction", c.skip_fraction);
  if (!(c.skip_fraction >= 0.0 && c.skip_fraction < 1.0)) throw ConfigError("sim.skip_fraction must lie in [0, 1)");
  c.deltas = sim.get_list("deltas", c.deltas);
  detail::positive_list(c.deltas, "sim.deltas");

  c.plan = certify::SamplingPlan::from_section(
      doc.section("certify"), pend ? certify::SamplingPlan::pendulum() : certify::SamplingPlan::unit(dims));
  c.plan.validate(dims);
  return c;
}

inline RunConfig load(const std::string& path) { return from_document(parse_file(path)); }

namespace detail {

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string list(const std::vector<double>& v) {
  std::string s;
  for (double d : v) s += (s.empty() ? "" : ", ") + g17(d);
  return s;
}

inline std::string list(const Vector& v) { return list(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace detail

/// Writes `c` back as a config file with every default materialized; loading it yields the same
/// configuration bit for bit.
inline void write_config(std::ostream& out, const RunConfig& c) {
  using detail::g17;
  using detail::list;
  out << "[sim]\n"
      << "plant = " << to_string(c.plant) << "\n"
      << "delta = " << g17(c.delta) << "\n"
      << "duration_s = " << g17(c.duration_s) << "\n"
      << "x0 = " << list(c.x0) << "\n"
      << "xi0 = " << list(c.xi0) << "\n"
      << "strategy = " << c.strategy.cli_name() << "\n"
      << "seed = " << c.seed << "\n"
      << "skip_fraction = " << g17(c.skip_fraction) << "\n"
      << "deltas = " << list(c.deltas) << "\n\n";
  const PendulumParams& p = c.pendulum;
  out << "[pendulum]\n"
      << "l = " << g17(p.l) << "\nmass = " << g17(p.mass) << "\nbeta = " << g17(p.beta) << "\nJ = " << g17(p.J)
      << "\nK_t = " << g17(p.K_t) << "\nK_e = " << g17(p.K_e) << "\nR_ohm = " << g17(p.R_ohm)
      << "\nL_tilde = " << g17(p.L_tilde) << "\ngrav = " << g17(p.grav) << "\n\n";
  out << "[linear]\n"
      << "a = " << g17(c.linear.a) << "\nb = " << g17(c.linear.b) << "\nc = " << g17(c.linear.c)
      << "\nrho = " << g17(c.linear.rho) << "\n\n";
  out << "[ocp]\n"
      << "horizon_s = " << g17(c.horizon_s) << "\n"
      << "horizon_N = " << c.horizon_N << "\n"
      << "Q = " << list(c.Q) << "\nQf = " << list(c.Qf) << "\nRw = " << list(c.Rw) << "\n"
      << "u_max = " << g17(c.u_max) << "\n\n";
  const SolverConfig& s = c.solver;
  out << "[solver]\n"
      << "iters_per_sample = " << s.iters_per_sample << "\n"
      << "step_rule = " << to_string(s.step_rule) << "\n"
      << "alpha0 = " << g17(s.alpha0) << "\nshrink = " << g17(s.shrink) << "\narmijo_c = " << g17(s.armijo_c)
      << "\nmax_backtracks = " << s.max_backtracks << "\noptimal_tol = " << g17(s.optimal_tolerance)
      << "\nmax_optimal_iters = " << s.max_optimal_iters
      << "\noptimal_step_rule = " << to_string(s.optimal_step_rule) << "\n\n";
  const certify::SamplingPlan& pl = c.plan;
  out << "[certify]\n"
      << "x_lo = " << list(pl.x_lo) << "\nx_hi = " << list(pl.x_hi) << "\nxi_lo = " << list(pl.xi_lo)
      << "\nxi_hi = " << list(pl.xi_hi) << "\nu_lo = " << list(pl.u_lo) << "\nu_hi = " << list(pl.u_hi)
      << "\nregion_radius = " << g17(pl.region_radius) << "\nbl_radius = " << g17(pl.bl_radius)
      << "\nnear_radius = " << g17(pl.near_radius) << "\nlipschitz_samples = " << pl.lipschitz_samples
      << "\nbound_samples = " << pl.bound_samples << "\nbl_samples = " << pl.bl_samples
      << "\nstate_pool = " << pl.state_pool << "\nvdecrease_samples = " << pl.vdecrease_samples
      << "\nmultistart_states = " << pl.multistart_states << "\nmultistart = " << pl.multistart
      << "\ndecrease_fractions = " << list(pl.decrease_fractions) << "\nsafety_factor = " << g17(pl.safety_factor)
      << "\nseed = " << pl.seed << "\n";
}

}  // namespace tsmpc::config
