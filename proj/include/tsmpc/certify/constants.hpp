#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tsmpc/core/types.hpp"

namespace tsmpc::certify {

/// Composite boundary-layer function U + kappa L and its decrease matrix
///
///   H(kappa) = [[a3, -k1], [-k1, kappa b3 - k2]],
///   k1 = a4 L_xi L_g (L_T + 1),  k2 = a4 (2 L_xi (L_T + 1) + (L_xi (L_T + 1))^2).
struct Lemma1Constants {
  double k1 = 0.0;
  double k2 = 0.0;
  double kappa_threshold = 0.0;
  double kappa = 0.0;
  double h_min_eig = 0.0;  // smallest eigenvalue of H(kappa)

  Eigen::Matrix2d H(double kappa_value, double a3, double b3) const {
    Eigen::Matrix2d h;
    h << a3, -k1, -k1, kappa_value * b3 - k2;
    return h;
  }
};

inline constexpr double kKappaMargin = 1.1;

inline Lemma1Constants lemma1_kappa(double a3, double a4, double b3, double L_xi, double L_g, double L_T) {
  if (!(a3 > 0.0)) throw Error("certification impossible: fast decrease constant a3 is not positive");
  if (!(b3 > 0.0)) throw Error("certification impossible: optimizer decrease constant b3 is not positive");
  for (double v : {a4, L_xi, L_g, L_T}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("lemma1_kappa: constants must be finite and nonnegative");
  }
  Lemma1Constants c;
  const double s = L_xi * (L_T + 1.0);
  c.k1 = a4 * L_xi * L_g * (L_T + 1.0);
  c.k2 = a4 * (2.0 * s + s * s);
  c.kappa_threshold = c.k1 * c.k1 / (a3 * b3) + c.k2 / b3;
  c.kappa = kKappaMargin * c.kappa_threshold;
  c.h_min_eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(c.H(c.kappa, a3, b3)).eigenvalues()[0];
  return c;
}

/// Inputs of the two-timescale stability theorem. Optional so that a missing one is reported by
/// name rather than silently read as zero.
struct TheoremTwoInputs {
  std::optional<double> c3, c4, b3, b4, L_f, L_h, L_G;
};

/// Constants of the composite decrease bound
///
///   dV <= -[|x - x*|, |w~|] Q(delta) [|x - x*|, |w~|]',
///   Q(delta) = [[delta c3 - delta^2 k8, q21], [q21, b3 - delta k6 - delta^2 (k3 + k7)]],
///   q21 = -(delta (k1 + k4) + delta^2 (k2 + k5)) / 2.
struct TheoremTwoConstants {
  double k1 = 0, k2 = 0, k3 = 0, k4 = 0, k5 = 0, k6 = 0, k7 = 0, k8 = 0;
  double c3 = 0, b3 = 0;

  double q21(double d) const { return -0.5 * (d * (k1 + k4) + d * d * (k2 + k5)); }

  Eigen::Matrix2d Qmat(double d) const {
    Eigen::Matrix2d q;
    const double off = q21(d);
    q << d * c3 - d * d * k8, off, off, b3 - d * k6 - d * d * (k3 + k7);
    return q;
  }

  double p(double d) const {
    const double q = q21(d);
    return q * q + d * d * c3 * k6 + d * d * (d * c3 * (k3 + k7) + b3 * k8) - d * d * d * k6 * k8 -
           d * d * d * d * k8 * (k3 + k7);
  }

  /// det Q(delta) = delta c3 b3 - p(delta).
  double det_identity(double d) const { return d * c3 * b3 - p(d); }

  bool leading_minors_positive(double d) const {
    const Eigen::Matrix2d q = Qmat(d);
    return q(0, 0) > 0.0 && q.determinant() > 0.0;
  }

  /// The scalar condition c3 b3 > p(delta) in the form it is usually stated.
  bool printed_condition(double d) const { return c3 * b3 > p(d); }

  bool feasible(double d) const { return printed_condition(d) && leading_minors_positive(d); }
};

inline TheoremTwoConstants theorem2_assemble(const TheoremTwoInputs& in) {
  std::vector<std::string> missing;
  auto need = [&](const std::optional<double>& v, const char* name) {
    if (!v) missing.emplace_back(name);
  };
  need(in.c3, "c3");
  need(in.c4, "c4");
  need(in.b3, "b3");
  need(in.b4, "b4");
  need(in.L_f, "L_f");
  need(in.L_h, "L_h");
  need(in.L_G, "L_G");
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error("theorem2_assemble: missing constants: " + list);
  }
  for (double v : {*in.c4, *in.b4, *in.L_f, *in.L_h, *in.L_G}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("theorem2_assemble: constants must be finite and nonnegative");
  }
  const double c4 = *in.c4, b4 = *in.b4, Lf = *in.L_f, Lh = *in.L_h, LG = *in.L_G;
  TheoremTwoConstants t;
  t.c3 = *in.c3;
  t.b3 = *in.b3;
  t.k1 = 2.0 * c4 * Lf;
  t.k2 = 2.0 * c4 * Lf * Lf;
  t.k3 = c4 * Lf * Lf;
  t.k4 = 2.0 * b4 * Lh * LG * Lf;
  t.k5 = 2.0 * b4 * Lh * Lh * Lf * Lf;
  t.k6 = 2.0 * b4 * Lh * LG * Lf;
  t.k7 = b4 * Lh * Lh * Lf * Lf;
  t.k8 = b4 * Lh * Lh * Lf * Lf;
  return t;
}

struct DeltaBar {
  std::optional<double> value;
  std::string diagnostic;
};

inline constexpr double kBisectRelTol = 1e-6;

/// Largest delta <= min(caps) at which Q(delta) is positive definite and c3 b3 > p(delta). When the
/// cap itself fails, halves downward to the first feasible point and bisects the bracket.
inline DeltaBar bisect_delta_bar(const TheoremTwoConstants& t, const std::vector<double>& delta_caps) {
  if (delta_caps.empty()) throw ConfigError("bisect_delta_bar: delta_caps must be nonempty");
  const double cap = *std::min_element(delta_caps.begin(), delta_caps.end());
  if (!(cap > 0.0)) throw ConfigError("bisect_delta_bar: caps must be positive");
  if (!(t.c3 > 0.0)) return {std::nullopt, "reduced-system decrease constant nonpositive"};
  if (!(t.b3 > 0.0)) return {std::nullopt, "boundary-layer decrease constant nonpositive"};
  if (t.feasible(cap)) return {cap, "cap-limited"};
  double hi = cap;
  double lo = cap;
  bool found = false;
  for (int k = 0; k < 1100 && lo > 0.0; ++k) {
    hi = lo;
    lo *= 0.5;
    if (t.feasible(lo)) {
      found = true;
      break;
    }
  }
  if (!found) return {std::nullopt, "no feasible delta in (0, cap)"};
  while (hi - lo > kBisectRelTol * lo) {
    const double mid = 0.5 * (lo + hi);
    (t.feasible(mid) ? lo : hi) = mid;
  }
  return {lo, "bisection"};
}

}  // namespace tsmpc::certify
