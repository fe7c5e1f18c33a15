#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "tsmpc/core/types.hpp"

namespace tsmpc::certify {

/// Sampled coefficients of a quadratic-type Lyapunov candidate V around v*:
///
///   lower |v - v*|^2 <= V(v) <= upper |v - v*|^2
///   V(step(v)) - V(v) <= -decrease * scale * |v - v*|^2
///   V(v) - V(v') <= increment |v - v'| (|v - v*| + |v' - v*|)
///
/// `lower`, `decrease` are minima and `upper`, `increment` maxima over the samples seen.
struct QuadraticBounds {
  double lower = std::numeric_limits<double>::infinity();
  double upper = 0.0;
  double decrease = std::numeric_limits<double>::infinity();
  double increment = 0.0;
  int samples = 0;
  int pairs = 0;
  Vector decrease_witness;

  bool has_decrease() const { return std::isfinite(decrease); }

  void merge(const QuadraticBounds& o) {
    lower = std::min(lower, o.lower);
    upper = std::max(upper, o.upper);
    if (o.decrease < decrease) {
      decrease = o.decrease;
      decrease_witness = o.decrease_witness;
    }
    increment = std::max(increment, o.increment);
    samples += o.samples;
    pairs += o.pairs;
  }
};

/// Evaluates the bounds over `points`. The increment ratio uses consecutive pairs of points. A
/// null `step` skips the decrease coefficient; points at v* itself are skipped.
inline QuadraticBounds quadratic_bounds(const std::function<double(const Vector&)>& fn,
                                        const std::function<Vector(const Vector&)>& step, const Vector& eq,
                                        const std::vector<Vector>& points, double scale = 1.0) {
  QuadraticBounds b;
  const Vector* prev = nullptr;
  double prev_value = 0.0;
  for (const Vector& v : points) {
    const double dist = (v - eq).norm();
    if (dist == 0.0) continue;
    const double value = fn(v);
    const double d2 = dist * dist;
    b.lower = std::min(b.lower, value / d2);
    b.upper = std::max(b.upper, value / d2);
    if (step) {
      const double ratio = -(fn(step(v)) - value) / (scale * d2);
      if (ratio < b.decrease) {
        b.decrease = ratio;
        b.decrease_witness = v;
      }
    }
    if (prev) {
      const double den = (v - *prev).norm() * (dist + (*prev - eq).norm());
      if (den > 0.0) {
        b.increment = std::max(b.increment, std::abs(value - prev_value) / den);
        ++b.pairs;
      }
    }
    prev = &v;
    prev_value = value;
    ++b.samples;
  }
  return b;
}

}  // namespace tsmpc::certify
