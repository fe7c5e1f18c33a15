#pragma once

#include <algorithm>
#include <cmath>

#include "tsmpc/core/plant_model.hpp"

namespace tsmpc {

/// Scalar linear two-timescale plant used to cross-check the certification pipeline:
///
///   x+  = x + delta (-a x + b xi)
///   xi+ = rho xi + (1 - rho)(u - c x),     xi_eq(x, u) = u - c x
struct LinearTestParams {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  double rho = 0.5;
};

class LinearTestModel final : public PlantModel {
 public:
  explicit LinearTestModel(LinearTestParams params = {}) : p_(params) {
    if (!(std::abs(p_.rho) < 1.0)) throw ConfigError("linear test model: |rho| must be < 1");
  }

  const LinearTestParams& params() const { return p_; }

  PlantDims dims() const override { return {1, 1, 1}; }
  std::string name() const override { return "linear"; }

  void target_map(ConstVectorRef x, ConstVectorRef xi, ConstVectorRef, double delta,
                  VectorRef out) const override {
    out[0] = x[0] + delta * (-p_.a * x[0] + p_.b * xi[0]);
  }
  void extra_map(ConstVectorRef xi, ConstVectorRef x, ConstVectorRef u, double,
                 VectorRef out) const override {
    out[0] = p_.rho * xi[0] + (1.0 - p_.rho) * (u[0] - p_.c * x[0]);
  }
  void equilibrium_map(ConstVectorRef x, ConstVectorRef u, VectorRef out) const override {
    out[0] = u[0] - p_.c * x[0];
  }
  void target_jacobians(ConstVectorRef, ConstVectorRef, ConstVectorRef, double delta, MatrixRef fx,
                        MatrixRef fxi, MatrixRef fu) const override {
    fx(0, 0) = 1.0 - delta * p_.a;
    fxi(0, 0) = delta * p_.b;
    fu(0, 0) = 0.0;
  }
  void equilibrium_jacobians(ConstVectorRef, ConstVectorRef, MatrixRef ex, MatrixRef eu) const override {
    ex(0, 0) = -p_.c;
    eu(0, 0) = 1.0;
  }

  AnalyticConstants analytic_constants() const override {
    AnalyticConstants k;
    k.L_f = std::abs(p_.b);
    k.L_g = std::max({std::abs(p_.rho), (1.0 - p_.rho) * std::abs(p_.c), 1.0 - p_.rho});
    k.L_xi = std::max(1.0, std::abs(p_.c));
    return k;
  }

 private:
  LinearTestParams p_;
};

}  // namespace tsmpc
