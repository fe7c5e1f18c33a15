#pragma once

#include <optional>

#include "tsmpc/core/types.hpp"

namespace tsmpc {

struct PlantDims {
  Eigen::Index n = 0;  // target state
  Eigen::Index p = 0;  // extra state
  Eigen::Index m = 0;  // input
};

/// Lipschitz constants a model can state in closed form.
struct AnalyticConstants {
  std::optional<double> L_f;   // slow coupling: |f(x,xi,u) - f(x,xi',u')| <= delta L_f (|dxi| + |du|)
  std::optional<double> L_g;   // fast map, jointly in (xi, x, u)
  std::optional<double> L_xi;  // equilibrium map, jointly in (x, u)
};

/// Two-timescale plant
///
///   x+  = f(x, xi, u, delta)
///   xi+ = g(xi, x, u, delta)
///
/// with an extra-state equilibrium map xi_eq(x, u) satisfying g(xi_eq, x, u, delta) = xi_eq.
/// All maps are pure. The Ref-based methods are the allocation-free hot path used by the
/// optimizer; validated value-returning wrappers live in plant_ops.hpp.
class PlantModel {
 public:
  virtual ~PlantModel() = default;

  virtual PlantDims dims() const = 0;

  virtual void target_map(ConstVectorRef x, ConstVectorRef xi, ConstVectorRef u, double delta,
                          VectorRef out) const = 0;
  virtual void extra_map(ConstVectorRef xi, ConstVectorRef x, ConstVectorRef u, double delta,
                         VectorRef out) const = 0;
  virtual void equilibrium_map(ConstVectorRef x, ConstVectorRef u, VectorRef out) const = 0;

  /// Partial derivatives of f with respect to x (n x n), xi (n x p) and u (n x m).
  virtual void target_jacobians(ConstVectorRef x, ConstVectorRef xi, ConstVectorRef u, double delta,
                                MatrixRef fx, MatrixRef fxi, MatrixRef fu) const = 0;
  /// Partial derivatives of xi_eq with respect to x (p x n) and u (p x m).
  virtual void equilibrium_jacobians(ConstVectorRef x, ConstVectorRef u, MatrixRef ex,
                                     MatrixRef eu) const = 0;

  virtual AnalyticConstants analytic_constants() const { return {}; }

  /// Target equilibrium x* and the input u* that holds it.
  virtual Vector target_equilibrium() const { return Vector::Zero(dims().n); }
  virtual Vector input_equilibrium() const { return Vector::Zero(dims().m); }

  /// Upper bound on admissible timescales.
  virtual double delta_max() const { return 1.0; }

  virtual std::string name() const = 0;
};

}  // namespace tsmpc
