#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "tsmpc/config/keyvalue.hpp"
#include "tsmpc/core/plant_model.hpp"

namespace tsmpc {

/// Physical parameters of the DC-motor actuated pendulum. Defaults are the benchmark values;
/// the armature inductance is L = L_tilde * delta.
struct PendulumParams {
  double l = 1.0;        // m
  double mass = 0.5;     // kg
  double beta = 0.5;     // N m s / rad
  double J = 0.5;        // kg m^2
  double K_t = 0.4;      // N m / A
  double K_e = 0.4;      // V s / rad
  double R_ohm = 0.6;    // Ohm
  double L_tilde = 1.0;  // H
  double grav = 9.81;    // m / s^2

  /// Throws ConfigError unless every parameter is finite and strictly positive.
  void validate() const {
    const std::pair<const char*, double> all[] = {{"l", l},     {"mass", mass}, {"beta", beta},
                                                  {"J", J},     {"K_t", K_t},   {"K_e", K_e},
                                                  {"R_ohm", R_ohm}, {"L_tilde", L_tilde}, {"grav", grav}};
    for (const auto& [name, v] : all) {
      if (!std::isfinite(v) || v <= 0.0) {
        throw ConfigError(std::string("pendulum.") + name + " must be strictly positive");
      }
    }
  }

  /// Per-step factor of the current error, 1 - R / L_tilde.
  double fast_factor() const { return 1.0 - R_ohm / L_tilde; }

  /// True when the current loop contracts (L_tilde > R / 2).
  bool fast_contracting() const { return std::abs(fast_factor()) < 1.0; }

  static const std::set<std::string>& keys() {
    static const std::set<std::string> k{"l", "mass", "beta", "J", "K_t", "K_e", "R_ohm", "L_tilde", "grav"};
    return k;
  }

  static PendulumParams from_section(const config::Section& s) {
    s.require_known(keys());
    PendulumParams p;
    p.l = s.get_double("l", p.l);
    p.mass = s.get_double("mass", p.mass);
    p.beta = s.get_double("beta", p.beta);
    p.J = s.get_double("J", p.J);
    p.K_t = s.get_double("K_t", p.K_t);
    p.K_e = s.get_double("K_e", p.K_e);
    p.R_ohm = s.get_double("R_ohm", p.R_ohm);
    p.L_tilde = s.get_double("L_tilde", p.L_tilde);
    p.grav = s.get_double("grav", p.grav);
    p.validate();
    return p;
  }
};

/// Forward-Euler pendulum with state x = (angle, rate), extra state xi = armature current and
/// input u = armature voltage. The current loop is delta-independent because L scales with delta.
class PendulumModel final : public PlantModel {
 public:
  explicit PendulumModel(PendulumParams params = {}) : p_(params) { p_.validate(); }

  const PendulumParams& params() const { return p_; }

  PlantDims dims() const override { return {2, 1, 1}; }
  std::string name() const override { return "pendulum"; }

  void target_map(ConstVectorRef x, ConstVectorRef xi, ConstVectorRef /*u*/, double delta,
                  VectorRef out) const override {
    const double th = x[0];
    const double om = x[1];
    out[0] = th + delta * om;
    out[1] = om + delta * (-(p_.beta / p_.J) * om - gravity_coeff() * std::sin(th) + (p_.K_t / p_.J) * xi[0]);
  }

  void extra_map(ConstVectorRef xi, ConstVectorRef x, ConstVectorRef u, double /*delta*/,
                 VectorRef out) const override {
    out[0] = p_.fast_factor() * xi[0] - (p_.K_e / p_.L_tilde) * x[1] + u[0] / p_.L_tilde;
  }

  void equilibrium_map(ConstVectorRef x, ConstVectorRef u, VectorRef out) const override {
    out[0] = (-p_.K_e * x[1] + u[0]) / p_.R_ohm;
  }

  void target_jacobians(ConstVectorRef x, ConstVectorRef /*xi*/, ConstVectorRef /*u*/, double delta,
                        MatrixRef fx, MatrixRef fxi, MatrixRef fu) const override {
    fx(0, 0) = 1.0;
    fx(0, 1) = delta;
    fx(1, 0) = -delta * gravity_coeff() * std::cos(x[0]);
    fx(1, 1) = 1.0 - delta * p_.beta / p_.J;
    fxi(0, 0) = 0.0;
    fxi(1, 0) = delta * p_.K_t / p_.J;
    fu.setZero();
  }

  void equilibrium_jacobians(ConstVectorRef /*x*/, ConstVectorRef /*u*/, MatrixRef ex,
                             MatrixRef eu) const override {
    ex(0, 0) = 0.0;
    ex(0, 1) = -p_.K_e / p_.R_ohm;
    eu(0, 0) = 1.0 / p_.R_ohm;
  }

  AnalyticConstants analytic_constants() const override {
    AnalyticConstants c;
    c.L_f = p_.K_t / p_.J;
    c.L_g = std::max({std::abs(p_.fast_factor()), p_.K_e / p_.L_tilde, 1.0 / p_.L_tilde});
    c.L_xi = std::max(1.0, p_.K_e) / p_.R_ohm;
    return c;
  }

 private:
  double gravity_coeff() const { return p_.mass * p_.grav * p_.l / p_.J; }

  PendulumParams p_;
};

}  // namespace tsmpc
