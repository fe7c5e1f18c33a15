#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tsmpc/config/keyvalue.hpp"
#include "tsmpc/mpc/ocp.hpp"

namespace tsmpc::certify {

enum class Method { analytic, sampled_lower_bound, sampled_upper_bound, derived };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::analytic: return "analytic";
    case Method::sampled_lower_bound: return "sampled-lower-bound";
    case Method::sampled_upper_bound: return "sampled-upper-bound";
    case Method::derived: return "derived";
  }
  return "?";
}

/// Where and how densely the certificate samples. Plant-level constants use the boxes; anything
/// that needs z*(x) samples x from the ball of radius `region_radius` around x*.
struct SamplingPlan {
  Vector x_lo, x_hi;
  Vector xi_lo, xi_hi;
  Vector u_lo, u_hi;
  double region_radius = 1.0;  // x samples for W, z*, T
  double bl_radius = 1.0;      // boundary-layer errors |xi~|, |z~|
  double near_radius = 0.1;    // closed-loop V-decrease samples
  int lipschitz_samples = 1000;
  int bound_samples = 1000;
  int bl_samples = 10000;
  int state_pool = 100;
  int vdecrease_samples = 1000;
  int multistart_states = 10;
  int multistart = 8;
  std::vector<double> decrease_fractions{1.0, 0.5, 0.1};
  double safety_factor = 1.5;
  std::uint64_t seed = 1;

  /// Ranges for the actuated pendulum: angle [-pi, pi], rate [-10, 10], current [-40, 40],
  /// voltage [-24, 24].
  static SamplingPlan pendulum() {
    SamplingPlan p;
    p.x_lo = Eigen::Vector2d(-M_PI, -10.0);
    p.x_hi = Eigen::Vector2d(M_PI, 10.0);
    p.xi_lo = Vector::Constant(1, -40.0);
    p.xi_hi = Vector::Constant(1, 40.0);
    p.u_lo = Vector::Constant(1, -24.0);
    p.u_hi = Vector::Constant(1, 24.0);
    return p;
  }

  /// Unit boxes of the model's dimensions.
  static SamplingPlan unit(const PlantDims& d) {
    SamplingPlan p;
    p.x_lo = Vector::Constant(d.n, -1.0);
    p.x_hi = Vector::Constant(d.n, 1.0);
    p.xi_lo = Vector::Constant(d.p, -1.0);
    p.xi_hi = Vector::Constant(d.p, 1.0);
    p.u_lo = Vector::Constant(d.m, -1.0);
    p.u_hi = Vector::Constant(d.m, 1.0);
    return p;
  }

  void validate(const PlantDims& d) const {
    auto box = [](const Vector& lo, const Vector& hi, Eigen::Index k, const char* what) {
      require_dim(lo, k, what);
      require_dim(hi, k, what);
      if (!(lo.array() < hi.array()).all()) {
        throw ConfigError(std::string("degenerate sampling range for ") + what + ": need lo < hi in every coordinate");
      }
    };
    box(x_lo, x_hi, d.n, "x");
    box(xi_lo, xi_hi, d.p, "xi");
    box(u_lo, u_hi, d.m, "u");
    for (double r : {region_radius, bl_radius, near_radius}) {
      if (!(r > 0.0)) throw ConfigError("degenerate sampling range: radii must be positive");
    }
    if (lipschitz_samples < 1000) throw ConfigError("lipschitz_samples must be >= 1000");
    if (bound_samples < 10 || bl_samples < 10 || vdecrease_samples < 10) {
      throw ConfigError("bound_samples, bl_samples and vdecrease_samples must be >= 10");
    }
    if (state_pool < 2) throw ConfigError("state_pool must be >= 2");
    if (multistart_states < 0 || multistart < 0) throw ConfigError("multistart counts must be >= 0");
    if (decrease_fractions.empty()) throw ConfigError("decrease_fractions must be nonempty");
    for (double f : decrease_fractions) {
      if (!(f > 0.0 && f <= 1.0)) throw ConfigError("decrease_fractions must lie in (0, 1]");
    }
    if (!(safety_factor >= 1.0)) throw ConfigError("safety_factor must be >= 1");
  }

  static const std::set<std::string>& keys() {
    static const std::set<std::string> k{
        "x_lo", "x_hi", "xi_lo", "xi_hi", "u_lo", "u_hi", "region_radius", "bl_radius", "near_radius",
        "lipschitz_samples", "bound_samples", "bl_samples", "state_pool", "vdecrease_samples",
        "multistart_states", "multistart", "decrease_fractions", "safety_factor", "seed"};
    return k;
  }

  /// Overrides the fields present in `s`, starting from `base`.
  static SamplingPlan from_section(const config::Section& s, SamplingPlan base) {
    s.require_known(keys());
    auto vec = [&](const char* key, Vector& v) {
      if (!s.has(key)) return;
      const auto l = s.get_list(key, {});
      v = Eigen::Map<const Vector>(l.data(), static_cast<Eigen::Index>(l.size()));
    };
    vec("x_lo", base.x_lo);
    vec("x_hi", base.x_hi);
    vec("xi_lo", base.xi_lo);
    vec("xi_hi", base.xi_hi);
    vec("u_lo", base.u_lo);
    vec("u_hi", base.u_hi);
    base.region_radius = s.get_double("region_radius", base.region_radius);
    base.bl_radius = s.get_double("bl_radius", base.bl_radius);
    base.near_radius = s.get_double("near_radius", base.near_radius);
    base.lipschitz_samples = static_cast<int>(s.get_int("lipschitz_samples", base.lipschitz_samples));
    base.bound_samples = static_cast<int>(s.get_int("bound_samples", base.bound_samples));
    base.bl_samples = static_cast<int>(s.get_int("bl_samples", base.bl_samples));
    base.state_pool = static_cast<int>(s.get_int("state_pool", base.state_pool));
    base.vdecrease_samples = static_cast<int>(s.get_int("vdecrease_samples", base.vdecrease_samples));
    base.multistart_states = static_cast<int>(s.get_int("multistart_states", base.multistart_states));
    base.multistart = static_cast<int>(s.get_int("multistart", base.multistart));
    base.decrease_fractions = s.get_list("decrease_fractions", base.decrease_fractions);
    base.safety_factor = s.get_double("safety_factor", base.safety_factor);
    const long long seed = s.get_int("seed", static_cast<long long>(base.seed));
    if (seed < 0) throw ConfigError("certify.seed must be >= 0");
    base.seed = static_cast<std::uint64_t>(seed);
    return base;
  }
};

using Rng = std::mt19937_64;

/// Independent deterministic stream per estimation task, so that one sample count never shifts
/// another task's draws.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline Vector sample_box(Rng& rng, const Vector& lo, const Vector& hi) {
  Vector v(lo.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uniform(rng, lo[i], hi[i]);
  return v;
}

/// Uniform in the Euclidean ball of the given radius.
inline Vector sample_ball(Rng& rng, Eigen::Index dim, double radius) {
  std::normal_distribution<double> nd;
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = nd(rng);
  const double norm = v.norm();
  if (norm == 0.0) return Vector::Zero(dim);
  const double r = radius * std::pow(uniform(rng, 0.0, 1.0), 1.0 / static_cast<double>(dim));
  return v * (r / norm);
}

/// Second point of a sampling pair: a fresh draw from the box on even indices, a local
/// perturbation of `a` at a log-uniform scale in [1e-3, 1] of the box width on odd ones.
inline Vector sample_partner(Rng& rng, const Vector& a, const Vector& lo, const Vector& hi, int index) {
  if (index % 2 == 0) return sample_box(rng, lo, hi);
  const double scale = std::pow(10.0, uniform(rng, -3.0, 0.0));
  Vector b = a;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    b[i] = std::clamp(a[i] + scale * (hi[i] - lo[i]) * uniform(rng, -0.5, 0.5), lo[i], hi[i]);
  }
  return b;
}

/// Sum of the Euclidean norms of consecutive blocks of `v`.
inline double block_norm(const Vector& v, const std::vector<Eigen::Index>& blocks) {
  if (blocks.empty()) return v.norm();
  double s = 0.0;
  Eigen::Index k = 0;
  for (Eigen::Index len : blocks) {
    s += v.segment(k, len).norm();
    k += len;
  }
  return s;
}

struct LipschitzEstimate {
  double value = 0.0;
  double sampled = 0.0;
  Method method = Method::sampled_lower_bound;
  int samples = 0;
};

/// max ||map(a) - map(b)|| / ||a - b|| over `count` pairs drawn in the box [lo, hi], where the
/// denominator is the sum of block norms over `blocks` (one Euclidean block when empty). Pairs
/// come from a single sequential stream, so a larger count extends rather than replaces the
/// sample set. Returns the analytic constant instead when one is supplied; the sampled value is
/// always reported alongside.
inline LipschitzEstimate estimate_lipschitz(const std::function<Vector(const Vector&)>& map, const Vector& lo,
                                            const Vector& hi, int count, Rng& rng,
                                            std::optional<double> analytic = std::nullopt,
                                            const std::vector<Eigen::Index>& blocks = {}) {
  if (lo.size() != hi.size() || lo.size() == 0) throw DimensionError("estimate_lipschitz: bad sampling box");
  if (!(lo.array() < hi.array()).all()) {
    throw ConfigError("estimate_lipschitz: degenerate sampling range (zero volume)");
  }
  if (count < 1) throw ConfigError("estimate_lipschitz: count must be positive");
  LipschitzEstimate est;
  for (int k = 0; k < count; ++k) {
    const Vector a = sample_box(rng, lo, hi);
    const Vector b = sample_partner(rng, a, lo, hi, k);
    const double den = block_norm(a - b, blocks);
    if (den == 0.0) continue;
    est.sampled = std::max(est.sampled, (map(a) - map(b)).norm() / den);
    ++est.samples;
  }
  if (analytic) {
    est.value = *analytic;
    est.method = Method::analytic;
  } else {
    est.value = est.sampled;
  }
  return est;
}

}  // namespace tsmpc::certify
