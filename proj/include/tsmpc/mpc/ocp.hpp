#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "tsmpc/core/plant_ops.hpp"

namespace tsmpc {

struct Box {
  Vector lo;
  Vector hi;

  static Box symmetric(Eigen::Index dim, double bound) {
    return {Vector::Constant(dim, -bound), Vector::Constant(dim, bound)};
  }
  bool contains(ConstVectorRef v) const {
    return (v.array() >= lo.array()).all() && (v.array() <= hi.array()).all();
  }
};

/// Finite-horizon problem over the reduced model:
///
///   min_z  sum_{tau<N} x_tau' Q x_tau + u_tau' Rw u_tau + x_N' Qf x_N,   x_{tau+1} = f_R(x_tau, u_tau)
///
/// with u_tau in `input_box`. `state_box` and `terminal_box` are carried for reporting only; the
/// benchmark runs without them.
struct OcpSpec {
  int horizon_N = 1;
  Matrix Q;
  Matrix Rw;
  Matrix Qf;
  Box input_box;
  std::optional<Box> state_box;
  std::optional<Box> terminal_box;
  Timescale delta{0.01};

  Eigen::Index n() const { return Q.rows(); }
  Eigen::Index m() const { return Rw.rows(); }
  Eigen::Index decision_size() const { return static_cast<Eigen::Index>(horizon_N) * m(); }

  void validate(const PlantDims& dims) const {
    if (horizon_N < 1) throw ConfigError("horizon_N must be >= 1");
    auto square = [](const Matrix& M, Eigen::Index k, const char* what) {
      if (M.rows() != k || M.cols() != k) {
        throw DimensionError(std::string(what) + ": expected " + std::to_string(k) + "x" + std::to_string(k));
      }
      if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ConfigError(std::string(what) + " must be symmetric");
      }
    };
    square(Q, dims.n, "state weight Q");
    square(Qf, dims.n, "terminal weight Qf");
    square(Rw, dims.m, "input weight Rw");
    require_dim(input_box.lo, dims.m, "input box lower bound");
    require_dim(input_box.hi, dims.m, "input box upper bound");
    if ((input_box.lo.array() > input_box.hi.array()).any()) {
      throw ConfigError("input box: lo must be <= hi");
    }
    for (const auto* b : {&state_box, &terminal_box}) {
      if (!*b) continue;
      require_dim((*b)->lo, dims.n, "state box");
      require_dim((*b)->hi, dims.n, "state box");
      if (((*b)->lo.array() > (*b)->hi.array()).any()) throw ConfigError("state box: lo must be <= hi");
    }
  }
};

/// Number of prediction steps covering `horizon_seconds` at sampling `delta`, at least 2.
inline int horizon_steps(double horizon_seconds, Timescale delta) {
  return std::max(2, static_cast<int>(std::lround(horizon_seconds / delta.seconds())));
}

/// Benchmark problem for the actuated pendulum: Q = Qf = diag(100, 0.1), Rw = 0.01, |u| <= 24,
/// horizon of 0.5 s.
inline OcpSpec pendulum_benchmark_spec(Timescale delta, double horizon_seconds = 0.5) {
  OcpSpec s;
  s.delta = delta;
  s.horizon_N = horizon_steps(horizon_seconds, delta);
  s.Q = Eigen::Vector2d(100.0, 0.1).asDiagonal();
  s.Qf = s.Q;
  s.Rw = Matrix::Constant(1, 1, 0.01);
  s.input_box = Box::symmetric(1, 24.0);
  return s;
}

/// Clamp every input block of `z` into the input box.
inline Vector project_box(const OcpSpec& spec, const Vector& z) {
  const Eigen::Index m = spec.m();
  if (z.size() % m != 0) throw DimensionError("project_box: size is not a multiple of m");
  Vector out = z;
  for (Eigen::Index k = 0; k < z.size(); k += m) {
    out.segment(k, m) = out.segment(k, m).cwiseMax(spec.input_box.lo).cwiseMin(spec.input_box.hi);
  }
  return out;
}

/// Cost and adjoint gradient of the problem at a fixed initial state. Holds scratch buffers, so
/// an instance must not be shared between threads; the referenced spec and model must outlive it.
class OcpObjective {
 public:
  OcpObjective(const OcpSpec& spec, const PlantModel& model, const Vector& x0)
      : spec_(spec), model_(model), x0_(x0), dims_(model.dims()), states_(dims_.n, spec.horizon_N + 1),
        xi_(dims_.p), jac_(dims_), lambda_(dims_.n), lambda_next_(dims_.n) {
    require_dim(x0, dims_.n, "initial state");
    require_finite(x0, "initial state");
    if (spec.n() != dims_.n || spec.m() != dims_.m) throw DimensionError("OCP weights do not match model");
  }

  const OcpSpec& spec() const { return spec_; }
  const PlantModel& model() const { return model_; }
  const Vector& x0() const { return x0_; }
  Eigen::Index size() const { return spec_.decision_size(); }

  /// Predicted states x_0..x_N as columns of the returned matrix.
  const Matrix& rollout(const Vector& z) {
    check(z);
    const double d = spec_.delta.seconds();
    const Eigen::Index m = dims_.m;
    states_.col(0) = x0_;
    for (int t = 0; t < spec_.horizon_N; ++t) {
      reduced_map(model_, states_.col(t), z.segment(t * m, m), d, xi_, states_.col(t + 1));
      if (!states_.col(t + 1).allFinite()) {
        throw NonFiniteError("rollout overflow: non-finite predicted state at step " + std::to_string(t + 1));
      }
    }
    return states_;
  }

  double value(const Vector& z) {
    rollout(z);
    return cost_along(z);
  }

  /// Returns the cost and writes the gradient d cost / d z into `grad`.
  double value_and_gradient(const Vector& z, Vector& grad) {
    rollout(z);
    const double J = cost_along(z);
    const double d = spec_.delta.seconds();
    const Eigen::Index m = dims_.m;
    const int N = spec_.horizon_N;
    grad.resize(size());
    lambda_next_.noalias() = 2.0 * spec_.Qf * states_.col(N);
    for (int t = N - 1; t >= 0; --t) {
      const auto u = z.segment(t * m, m);
      jac_.evaluate(model_, states_.col(t), u, d);
      grad.segment(t * m, m).noalias() = 2.0 * spec_.Rw * u;
      grad.segment(t * m, m).noalias() += jac_.B.transpose() * lambda_next_;
      lambda_.noalias() = 2.0 * spec_.Q * states_.col(t);
      lambda_.noalias() += jac_.A.transpose() * lambda_next_;
      std::swap(lambda_, lambda_next_);
    }
    return J;
  }

  void project(Vector& z) const {
    const Eigen::Index m = dims_.m;
    for (Eigen::Index k = 0; k < z.size(); k += m) {
      z.segment(k, m) = z.segment(k, m).cwiseMax(spec_.input_box.lo).cwiseMin(spec_.input_box.hi);
    }
  }

 private:
  void check(const Vector& z) const {
    if (z.size() != size()) {
      throw DimensionError("decision vector: expected " + std::to_string(size()) + ", got " +
                           std::to_string(z.size()));
    }
  }

  double cost_along(const Vector& z) const {
    const Eigen::Index m = dims_.m;
    double J = 0.0;
    for (int t = 0; t < spec_.horizon_N; ++t) {
      const auto x = states_.col(t);
      const auto u = z.segment(t * m, m);
      J += x.dot(spec_.Q * x) + u.dot(spec_.Rw * u);
    }
    const auto xN = states_.col(spec_.horizon_N);
    J += xN.dot(spec_.Qf * xN);
    return J;
  }

  const OcpSpec& spec_;
  const PlantModel& model_;
  Vector x0_;
  PlantDims dims_;
  Matrix states_;
  Vector xi_;
  ReducedJacobians jac_;
  Vector lambda_, lambda_next_;
};

/// Predicted state sequence x_0..x_N.
inline std::vector<TargetState> rollout(const OcpSpec& spec, const PlantModel& model, const TargetState& x0,
                                        const Vector& z) {
  OcpObjective obj(spec, model, x0.values);
  const Matrix& X = obj.rollout(z);
  std::vector<TargetState> out;
  out.reserve(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index k = 0; k < X.cols(); ++k) out.emplace_back(Vector(X.col(k)));
  return out;
}

inline double cost(const OcpSpec& spec, const PlantModel& model, const TargetState& x0, const Vector& z) {
  OcpObjective obj(spec, model, x0.values);
  return obj.value(z);
}

inline Vector gradient(const OcpSpec& spec, const PlantModel& model, const TargetState& x0, const Vector& z) {
  OcpObjective obj(spec, model, x0.values);
  Vector g;
  obj.value_and_gradient(z, g);
  return g;
}

/// Checks the optional state and terminal boxes along a predicted trajectory.
inline bool state_constraints_satisfied(const OcpSpec& spec, const std::vector<TargetState>& traj) {
  for (std::size_t t = 1; t < traj.size(); ++t) {
    if (spec.state_box && !spec.state_box->contains(traj[t].values)) return false;
  }
  if (spec.terminal_box && !traj.empty() && !spec.terminal_box->contains(traj.back().values)) return false;
  return true;
}

}  // namespace tsmpc
