#pragma once

#include "tsmpc/core/plant_model.hpp"

namespace tsmpc {

namespace detail {

inline void check_delta(const PlantModel& model, Timescale delta) {
  if (!(delta.seconds() < model.delta_max())) {
    throw ConfigError("delta must be below delta_max = " + std::to_string(model.delta_max()));
  }
}

inline void check_target(const PlantModel& model, const TargetState& x) {
  require_dim(x.values, model.dims().n, "target state");
  require_finite(x.values, "target state");
}
inline void check_extra(const PlantModel& model, const ExtraState& xi) {
  require_dim(xi.values, model.dims().p, "extra state");
  require_finite(xi.values, "extra state");
}
inline void check_input(const PlantModel& model, const ControlInput& u) {
  require_dim(u.values, model.dims().m, "control input");
  require_finite(u.values, "control input");
}

}  // namespace detail

inline TargetState step_target(const PlantModel& model, const TargetState& x, const ExtraState& xi,
                               const ControlInput& u, Timescale delta) {
  detail::check_target(model, x);
  detail::check_extra(model, xi);
  detail::check_input(model, u);
  detail::check_delta(model, delta);
  Vector out(model.dims().n);
  model.target_map(x.values, xi.values, u.values, delta.seconds(), out);
  return TargetState(std::move(out));
}

inline ExtraState step_extra(const PlantModel& model, const ExtraState& xi, const TargetState& x,
                             const ControlInput& u, Timescale delta) {
  detail::check_target(model, x);
  detail::check_extra(model, xi);
  detail::check_input(model, u);
  detail::check_delta(model, delta);
  Vector out(model.dims().p);
  model.extra_map(xi.values, x.values, u.values, delta.seconds(), out);
  return ExtraState(std::move(out));
}

inline ExtraState equilibrium_extra(const PlantModel& model, const TargetState& x, const ControlInput& u) {
  detail::check_target(model, x);
  detail::check_input(model, u);
  Vector out(model.dims().p);
  model.equilibrium_map(x.values, u.values, out);
  return ExtraState(std::move(out));
}

/// f_R(x, u, delta) = f(x, xi_eq(x, u), u, delta), evaluated by composition.
inline TargetState reduced_step(const PlantModel& model, const TargetState& x, const ControlInput& u,
                                Timescale delta) {
  return step_target(model, x, equilibrium_extra(model, x, u), u, delta);
}

/// Raw composition used by the optimizer hot path; `xi_buf` must have size p.
inline void reduced_map(const PlantModel& model, ConstVectorRef x, ConstVectorRef u, double delta,
                        VectorRef xi_buf, VectorRef out) {
  model.equilibrium_map(x, u, xi_buf);
  model.target_map(x, xi_buf, u, delta, out);
}

/// Workspace for Jacobians of the reduced map, A = df_R/dx and B = df_R/du.
struct ReducedJacobians {
  Matrix fx, fxi, fu, ex, eu, A, B;
  Vector xi;

  explicit ReducedJacobians(const PlantDims& d)
      : fx(d.n, d.n), fxi(d.n, d.p), fu(d.n, d.m), ex(d.p, d.n), eu(d.p, d.m), A(d.n, d.n),
        B(d.n, d.m), xi(d.p) {}

  void evaluate(const PlantModel& model, ConstVectorRef x, ConstVectorRef u, double delta) {
    model.equilibrium_map(x, u, xi);
    model.target_jacobians(x, xi, u, delta, fx, fxi, fu);
    model.equilibrium_jacobians(x, u, ex, eu);
    A.noalias() = fx;
    A.noalias() += fxi * ex;
    B.noalias() = fu;
    B.noalias() += fxi * eu;
  }
};

}  // namespace tsmpc
