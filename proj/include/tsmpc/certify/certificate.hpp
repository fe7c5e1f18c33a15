#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tsmpc/certify/constants.hpp"
#include "tsmpc/certify/quadratic.hpp"
#include "tsmpc/certify/sampling.hpp"
#include "tsmpc/core/plant_ops.hpp"
#include "tsmpc/mpc/solver.hpp"

namespace tsmpc::certify {

/// Constants below this are treated as zero when a verdict requires strict positivity.
inline constexpr double kPositiveFloor = 1e-9;

struct Estimate {
  double value = 0.0;    // what the formulas use (inflated when sampled)
  double sampled = 0.0;  // raw sampled extremum, NaN when not sampled
  Method method = Method::derived;
  int samples = 0;
};

struct ConstantEstimates {
  Estimate L_f, L_g, L_xi, L_T, L_zstar, L_h, L_G;
  Estimate L_f_slow;  // joint slow constant of the two-timescale theorem
  Estimate a1, a2, a3, a4;
  Estimate b1, b2, b3, b4;
  Estimate c1, c2, c3, c4;
  Estimate c4_centered;  // increment bound with |x - x*| in place of |x|
  double f_x_lipschitz = 0.0;
  double single_integrator_ratio = 0.0;
};

struct Verdict {
  std::string name;
  std::string inequality;
  bool evaluated = false;
  bool passed = false;
  std::string detail;
  std::string witness;
};

/// A frozen slow state with its optimizer fixed point.
struct StatePoint {
  Vector x;
  Vector zstar;
  double W = 0.0;
  bool converged = false;
  int iterations = 0;
};

struct BoundaryLayerResult {
  double d3 = std::numeric_limits<double>::infinity();  // min of -dU / (|xi~|^2 + |z~|^2)
  int samples = 0;
  int violations = 0;
  std::string witness;
};

struct VDecreaseResult {
  double worst = -std::numeric_limits<double>::infinity();  // max of dV / |(x - x*, xi~, z~)|^2
  int samples = 0;
  int violations = 0;
  double delta = 0.0;
  std::string witness;
};

struct SylvesterCheck {
  double delta = 0.0;
  double min_eig = 0.0;
  double det = 0.0;
  double det_identity = 0.0;
  bool printed_condition = false;
  bool minors_positive = false;
};

struct CertificateReport {
  std::string model;
  double delta_nominal = 0.0;
  int horizon_N = 0;
  SamplingPlan plan;
  SolverConfig solver;
  ConstantEstimates est;
  std::optional<Lemma1Constants> lem1;
  double d1 = 0, d2 = 0, d3_measured = 0, d4 = 0;
  std::optional<TheoremTwoConstants> thm2;
  std::vector<double> delta_caps;
  DeltaBar delta_bar;
  std::optional<SylvesterCheck> sylvester;
  std::optional<BoundaryLayerResult> boundary_layer;
  std::optional<VDecreaseResult> v_decrease;
  std::vector<Verdict> verdicts;

  bool passed() const {
    return !verdicts.empty() &&
           std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.evaluated && v.passed; });
  }
  const Verdict* find(const std::string& name) const {
    for (const auto& v : verdicts) {
      if (v.name == name) return &v;
    }
    return nullptr;
  }
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

inline std::string fmt(const Vector& v) {
  std::ostringstream os;
  os.precision(10);
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

/// Closed-form expressions the pipeline evaluates on one model and one problem.
class Evaluator {
 public:
  Evaluator(const PlantModel& model, const OcpSpec& spec, const SolverConfig& solver)
      : model_(model), spec_(spec), solver_(solver), dims_(model.dims()), x_star_(model.target_equilibrium()) {}

  const PlantModel& model() const { return model_; }
  const OcpSpec& spec() const { return spec_; }
  const PlantDims& dims() const { return dims_; }
  const Vector& x_star() const { return x_star_; }
  double delta() const { return spec_.delta.seconds(); }

  OptimizerState zstar(const Vector& x, const Vector& warm) const {
    OcpObjective obj(spec_, model_, x);
    return solve_optimal(obj, solver_, warm);
  }
  Vector T(const Vector& z, const Vector& x) const {
    OcpObjective obj(spec_, model_, x);
    return solver_map(obj, solver_, z).z;
  }
  double W(const Vector& x, const Vector& z) const {
    OcpObjective obj(spec_, model_, x);
    return obj.value(z);
  }
  Vector project(Vector z) const {
    for (Eigen::Index k = 0; k < z.size(); k += dims_.m) {
      z.segment(k, dims_.m) = z.segment(k, dims_.m).cwiseMax(spec_.input_box.lo).cwiseMin(spec_.input_box.hi);
    }
    return z;
  }
  Vector xi_eq(const Vector& x, const Vector& u) const {
    Vector out(dims_.p);
    model_.equilibrium_map(x, u, out);
    return out;
  }
  Vector f(const Vector& x, const Vector& xi, const Vector& u, double d) const {
    Vector out(dims_.n);
    model_.target_map(x, xi, u, d, out);
    return out;
  }
  Vector g(const Vector& xi, const Vector& x, const Vector& u, double d) const {
    Vector out(dims_.p);
    model_.extra_map(xi, x, u, d, out);
    return out;
  }
  Vector f_R(const Vector& x, const Vector& u, double d) const { return f(x, xi_eq(x, u), u, d); }

  StatePoint point(const Vector& x) const {
    StatePoint s;
    s.x = x;
    const OptimizerState st = zstar(x, Vector::Zero(spec_.decision_size()));
    s.zstar = st.z;
    s.converged = st.converged;
    s.iterations = st.iterations_used;
    s.W = W(x, s.zstar);
    return s;
  }

  std::vector<StatePoint> pool(Rng& rng, int count, double radius) const {
    std::vector<StatePoint> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) out.push_back(point(x_star_ + sample_ball(rng, dims_.n, radius)));
    return out;
  }

 private:
  const PlantModel& model_;
  const OcpSpec& spec_;
  const SolverConfig& solver_;
  PlantDims dims_;
  Vector x_star_;
};

/// Change of the composite function U + kappa L over one boundary-layer step at frozen x, from
/// the errors (xi~, z~) with xi~ = xi - xi_eq(x, Pi z) and z~ = z - z*(x):
///
///   xi+ = g(xi, x, Pi z),  z+ = T(z, x),  xi~+ = xi+ - xi_eq(x, Pi z+),  z~+ = z+ - z*(x).
///
/// `z_err` is projected so that z stays in the input box; the returned pair holds the change
/// and the squared norm of the (projected) error.
inline std::pair<double, double> boundary_layer_increment(const Evaluator& ev, const StatePoint& pt,
                                                          const Vector& xi_err, const Vector& z_err, double kappa) {
  const Eigen::Index m = ev.dims().m;
  const Vector z = ev.project(pt.zstar + z_err);
  const Vector zt = z - pt.zstar;
  const Vector u = z.head(m);
  const Vector xi = xi_err + ev.xi_eq(pt.x, u);
  const Vector xi_next = ev.g(xi, pt.x, u, ev.delta());
  const Vector z_next = ev.T(z, pt.x);
  const Vector xi_err_next = xi_next - ev.xi_eq(pt.x, z_next.head(m));
  const Vector zt_next = z_next - pt.zstar;
  const double before = xi_err.squaredNorm() + kappa * zt.squaredNorm();
  const double after = xi_err_next.squaredNorm() + kappa * zt_next.squaredNorm();
  return {after - before, xi_err.squaredNorm() + zt.squaredNorm()};
}

/// Samples |xi~|, |z~| <= plan.bl_radius over the frozen states of `pool` and measures d3.
inline BoundaryLayerResult boundary_layer_check(const Evaluator& ev, const std::vector<StatePoint>& pool,
                                                double kappa, const SamplingPlan& plan, Rng& rng) {
  if (pool.empty()) throw ConfigError("boundary_layer_check: empty state pool");
  BoundaryLayerResult r;
  const Eigen::Index nz = ev.spec().decision_size();
  for (int k = 0; k < plan.bl_samples; ++k) {
    const StatePoint& pt = pool[static_cast<std::size_t>(k) % pool.size()];
    const Vector xi_err = sample_ball(rng, ev.dims().p, plan.bl_radius);
    const Vector z_err = sample_ball(rng, nz, plan.bl_radius);
    const auto [dU, norm2] = boundary_layer_increment(ev, pt, xi_err, z_err, kappa);
    if (norm2 == 0.0) continue;
    ++r.samples;
    const double ratio = -dU / norm2;
    if (!(ratio > 0.0)) ++r.violations;
    if (ratio < r.d3) {
      r.d3 = ratio;
      r.witness = "x=" + fmt(pt.x) + " |xi~|=" + fmt(xi_err.norm()) + " |z~|=" + fmt(z_err.norm()) +
                  " dU=" + fmt(dU);
    }
  }
  return r;
}

/// One closed-loop step of plant and optimizer at plant timescale `delta` (optimizer problem fixed)
/// from states near the equilibrium, checking that
///
///   V(x, xi, z) = W(x) + |xi - xi_eq(x, Pi z)|^2 + kappa |z - z*(x)|^2
///
/// decreases.
inline VDecreaseResult closed_loop_v_decrease(const Evaluator& ev, double kappa, double delta,
                                              const SamplingPlan& plan, Rng& rng) {
  VDecreaseResult r;
  r.delta = delta;
  const Eigen::Index m = ev.dims().m;
  const Eigen::Index nz = ev.spec().decision_size();
  const int pool_size = std::max(2, std::min(plan.state_pool, plan.vdecrease_samples));
  const std::vector<StatePoint> near = ev.pool(rng, pool_size, plan.near_radius);
  auto V = [&](const Vector& x, const Vector& xi, const Vector& z, const Vector& zs, double W) {
    return W + (xi - ev.xi_eq(x, z.head(m))).squaredNorm() + kappa * (z - zs).squaredNorm();
  };
  for (int k = 0; k < plan.vdecrease_samples; ++k) {
    const StatePoint& pt = near[static_cast<std::size_t>(k) % near.size()];
    const Vector z = ev.project(pt.zstar + sample_ball(rng, nz, plan.near_radius));
    const Vector u = z.head(m);
    const Vector xi = ev.xi_eq(pt.x, u) + sample_ball(rng, ev.dims().p, plan.near_radius);
    const double before = V(pt.x, xi, z, pt.zstar, pt.W);

    const Vector x_next = ev.f(pt.x, xi, u, delta);
    const Vector xi_next = ev.g(xi, pt.x, u, delta);
    const Vector z_next = ev.T(z, pt.x);
    const Vector zs_next = ev.zstar(x_next, pt.zstar).z;
    const double after = V(x_next, xi_next, z_next, zs_next, ev.W(x_next, zs_next));

    const double scale = (pt.x - ev.x_star()).squaredNorm() + (xi - ev.xi_eq(pt.x, u)).squaredNorm() +
                         (z - pt.zstar).squaredNorm();
    if (scale == 0.0) continue;
    ++r.samples;
    const double ratio = (after - before) / scale;
    if (!(after < before)) ++r.violations;
    if (ratio > r.worst) {
      r.worst = ratio;
      r.witness = "x=" + fmt(pt.x) + " dV=" + fmt(after - before);
    }
  }
  return r;
}

namespace detail {

inline Estimate inflated(double sampled, int samples, double factor) {
  return {factor * sampled, sampled, Method::sampled_lower_bound, samples};
}

inline Estimate from_lipschitz(const LipschitzEstimate& e, double factor) {
  if (e.method == Method::analytic) return {e.value, e.sampled, Method::analytic, e.samples};
  return inflated(e.sampled, e.samples, factor);
}

inline Estimate sampled_min(double v, int samples) { return {v, v, Method::sampled_upper_bound, samples}; }
inline Estimate sampled_max(double v, int samples) { return {v, v, Method::sampled_lower_bound, samples}; }
inline Estimate derived(double v) { return {v, std::numeric_limits<double>::quiet_NaN(), Method::derived, 0}; }

inline Verdict verdict(std::string name, std::string inequality, bool passed, std::string detail,
                       std::string witness = {}) {
  return {std::move(name), std::move(inequality), true, passed, std::move(detail), std::move(witness)};
}

inline Verdict not_evaluated(std::string name, std::string inequality, std::string why) {
  return {std::move(name), std::move(inequality), false, false, std::move(why), {}};
}

inline bool within(double sampled, double bound) { return sampled <= bound * (1.0 + 1e-9) + 1e-12; }

}  // namespace detail

/// Estimates every constant of the stability argument on sampled ranges and assembles the
/// certified timescale bound. Verdicts that cannot be evaluated because an upstream constant is
/// missing are recorded as failed, never dropped.
inline CertificateReport full_certificate(const PlantModel& model, const OcpSpec& spec, const SolverConfig& solver,
                                          const SamplingPlan& plan) {
  const PlantDims dims = model.dims();
  spec.validate(dims);
  solver.validate();
  plan.validate(dims);
  ::tsmpc::detail::check_delta(model, spec.delta);

  CertificateReport rep;
  rep.model = model.name();
  rep.delta_nominal = spec.delta.seconds();
  rep.horizon_N = spec.horizon_N;
  rep.plan = plan;
  rep.solver = solver;
  ConstantEstimates& E = rep.est;
  const double sf = plan.safety_factor;
  const double d = spec.delta.seconds();
  const Evaluator ev(model, spec, solver);
  const AnalyticConstants ac = model.analytic_constants();
  const Eigen::Index n = dims.n, p = dims.p, m = dims.m;
  const int NL = plan.lipschitz_samples;
  using detail::verdict;

  // Plant constants on the sampling boxes.
  {
    Rng rng = make_rng(plan.seed, 1);
    Vector lo(n + p + m), hi(n + p + m);
    lo << plan.x_lo, plan.xi_lo, plan.u_lo;
    hi << plan.x_hi, plan.xi_hi, plan.u_hi;
    double sup = 0.0;
    int used = 0;
    for (int k = 0; k < NL; ++k) {
      const Vector a = sample_box(rng, lo, hi);
      const Vector b = sample_partner(rng, a, lo, hi, k);
      const Vector x = a.head(n);
      const double den = d * ((a.segment(n, p) - b.segment(n, p)).norm() + (a.tail(m) - b.tail(m)).norm());
      if (den == 0.0) continue;
      const Vector fa = ev.f(x, a.segment(n, p), a.tail(m), d);
      const Vector fb = ev.f(x, b.segment(n, p), b.tail(m), d);
      sup = std::max(sup, (fa - fb).norm() / den);
      ++used;
    }
    E.L_f = ac.L_f ? Estimate{*ac.L_f, sup, Method::analytic, used} : detail::inflated(sup, used, sf);
    rep.verdicts.push_back(verdict("assumption1.slow_coupling",
                                   "|f(x,xi,u) - f(x,xi',u')| <= delta L_f (|xi - xi'| + |u - u'|)",
                                   detail::within(sup, E.L_f.value),
                                   "sampled sup " + fmt(sup) + " vs L_f " + fmt(E.L_f.value)));
  }
  {
    Rng rng = make_rng(plan.seed, 2);
    Vector lo(p + n + m), hi(p + n + m);
    lo << plan.xi_lo, plan.x_lo, plan.u_lo;
    hi << plan.xi_hi, plan.x_hi, plan.u_hi;
    auto gmap = [&](const Vector& v) { return ev.g(v.head(p), v.segment(p, n), v.tail(m), d); };
    const auto est = estimate_lipschitz(gmap, lo, hi, NL, rng, ac.L_g, {p, n, m});
    E.L_g = detail::from_lipschitz(est, sf);
    rep.verdicts.push_back(verdict("assumption1.fast_lipschitz",
                                   "|g(xi,x,u) - g(xi',x',u')| <= L_g (|xi - xi'| + |x - x'| + |u - u'|)",
                                   detail::within(est.sampled, E.L_g.value),
                                   "sampled sup " + fmt(est.sampled) + " vs L_g " + fmt(E.L_g.value)));
  }
  {
    Rng rng = make_rng(plan.seed, 3);
    Vector lo(n + m), hi(n + m);
    lo << plan.x_lo, plan.u_lo;
    hi << plan.x_hi, plan.u_hi;
    auto emap = [&](const Vector& v) { return ev.xi_eq(v.head(n), v.tail(m)); };
    const auto est = estimate_lipschitz(emap, lo, hi, NL, rng, ac.L_xi, {n, m});
    E.L_xi = detail::from_lipschitz(est, sf);
    rep.verdicts.push_back(verdict("assumption2.equilibrium_lipschitz",
                                   "|xi_eq(x,u) - xi_eq(x',u')| <= L_xi (|x - x'| + |u - u'|)",
                                   detail::within(est.sampled, E.L_xi.value),
                                   "sampled sup " + fmt(est.sampled) + " vs L_xi " + fmt(E.L_xi.value)));

    double worst = 0.0;
    for (int k = 0; k < NL; ++k) {
      const Vector v = sample_box(rng, lo, hi);
      const double dk = uniform(rng, 0.0, d);
      const Vector e = emap(v);
      worst = std::max(worst, (ev.g(e, v.head(n), v.tail(m), dk > 0.0 ? dk : d) - e).norm());
    }
    rep.verdicts.push_back(verdict("assumption2.equilibrium_identity", "|g(xi_eq(x,u), x, u) - xi_eq(x,u)| <= 1e-12",
                                   worst <= 1e-12, "max residual " + fmt(worst)));
  }
  {
    Rng rng = make_rng(plan.seed, 4);
    Vector lo(n + p + m), hi(n + p + m);
    lo << plan.x_lo, plan.xi_lo, plan.u_lo;
    hi << plan.x_hi, plan.xi_hi, plan.u_hi;
    double sup = 0.0;
    for (int k = 0; k < NL; ++k) {
      const Vector a = sample_box(rng, lo, hi);
      const Vector b = sample_partner(rng, a, lo, hi, k);
      const double den = (a.head(n) - b.head(n)).norm();
      if (den == 0.0) continue;
      const Vector fa = ev.f(a.head(n), a.segment(n, p), a.tail(m), d);
      const Vector fb = ev.f(b.head(n), a.segment(n, p), a.tail(m), d);
      sup = std::max(sup, (fa - fb).norm() / den);
    }
    E.f_x_lipschitz = sup;
  }

  // Fast error function U = |xi~|^2.
  {
    Rng rng = make_rng(plan.seed, 5);
    const Vector half = 0.5 * (plan.xi_hi - plan.xi_lo);
    QuadraticBounds qb;
    for (int k = 0; k < plan.bound_samples; ++k) {
      const Vector x = sample_box(rng, plan.x_lo, plan.x_hi);
      const Vector u = sample_box(rng, plan.u_lo, plan.u_hi);
      const Vector e = ev.xi_eq(x, u);
      std::vector<Vector> pts{sample_box(rng, -half, half), sample_box(rng, -half, half)};
      auto fn = [](const Vector& v) { return v.squaredNorm(); };
      auto step = [&](const Vector& v) { return Vector(ev.g(v + e, x, u, d) - e); };
      qb.merge(quadratic_bounds(fn, step, Vector::Zero(p), pts));
    }
    E.a1 = detail::sampled_min(qb.lower, qb.samples);
    E.a2 = detail::sampled_max(qb.upper, qb.samples);
    E.a3 = detail::sampled_min(qb.decrease, qb.samples);
    E.a4 = detail::sampled_max(qb.increment, qb.pairs);
    rep.verdicts.push_back(verdict("assumption2.bounds", "a1 |xi~|^2 <= U(xi~) <= a2 |xi~|^2, 0 < a1 <= a2",
                                   E.a1.value > kPositiveFloor && E.a1.value <= E.a2.value,
                                   "a1 " + fmt(E.a1.value) + ", a2 " + fmt(E.a2.value)));
    rep.verdicts.push_back(verdict("assumption2.decrease", "U(g~(xi~)) - U(xi~) <= -a3 |xi~|^2, a3 > 0",
                                   E.a3.value > kPositiveFloor, "a3 " + fmt(E.a3.value),
                                   E.a3.value > kPositiveFloor ? "" : "xi~=" + fmt(qb.decrease_witness)));
  }

  // Frozen states with their optimizer fixed points.
  Rng pool_rng = make_rng(plan.seed, 6);
  const std::vector<StatePoint> pool = ev.pool(pool_rng, plan.state_pool, plan.region_radius);
  const Eigen::Index nz = spec.decision_size();
  {
    int bad = 0;
    for (const auto& s : pool) bad += s.converged ? 0 : 1;
    rep.verdicts.push_back(verdict("assumption3.zstar_converged", "projected-gradient norm of z*(x) <= optimal_tol",
                                   bad == 0, std::to_string(pool.size() - bad) + "/" + std::to_string(pool.size()) +
                                                 " solves converged"));
    double worst = 0.0;
    for (const auto& s : pool) worst = std::max(worst, (ev.T(s.zstar, s.x) - s.zstar).norm());
    rep.verdicts.push_back(verdict("assumption3.fixed_point", "|T(z*(x), x) - z*(x)| <= 10 optimal_tol",
                                   worst <= 10.0 * solver.optimal_tolerance, "max " + fmt(worst)));
  }
  {
    Rng rng = make_rng(plan.seed, 7);
    double worst = 0.0;
    std::string witness;
    const int states = std::min<int>(plan.multistart_states, static_cast<int>(pool.size()));
    for (int i = 0; i < states; ++i) {
      const StatePoint& s = pool[static_cast<std::size_t>(i)];
      for (int k = 0; k < plan.multistart; ++k) {
        Vector z0(nz);
        for (Eigen::Index j = 0; j < nz; j += m) z0.segment(j, m) = sample_box(rng, spec.input_box.lo, spec.input_box.hi);
        const OptimizerState st = ev.zstar(s.x, z0);
        if (!st.converged) continue;
        const double gap = (st.z - s.zstar).norm() / std::max(1.0, s.zstar.norm());
        if (gap > worst) {
          worst = gap;
          witness = "x=" + fmt(s.x) + " cost " + fmt(ev.W(s.x, st.z)) + " vs " + fmt(s.W);
        }
      }
    }
    const bool ok = worst <= 1e-4;
    rep.verdicts.push_back(verdict("assumption3.uniqueness_multistart",
                                   "all converged multistart solutions agree with z*(x) within 1e-4 (relative)", ok,
                                   std::to_string(states) + " states x " + std::to_string(plan.multistart) +
                                       " starts, max relative gap " + fmt(worst),
                                   ok ? "" : witness));
  }

  // Lipschitz constants of T (jointly in z, x) and of z*.
  {
    Rng rng = make_rng(plan.seed, 8);
    double sup = 0.0;
    int used = 0;
    for (int k = 0; k < NL; ++k) {
      const StatePoint& s = pool[static_cast<std::size_t>(k) % pool.size()];
      const Vector za = ev.project(s.zstar + sample_ball(rng, nz, plan.bl_radius));
      Vector xb, zb;
      if (k % 2 == 0) {
        const StatePoint& o = pool[static_cast<std::size_t>(k + 1) % pool.size()];
        xb = o.x;
        zb = ev.project(o.zstar + sample_ball(rng, nz, plan.bl_radius));
      } else {
        const double scale = std::pow(10.0, uniform(rng, -3.0, 0.0)) * plan.bl_radius;
        xb = s.x + sample_ball(rng, n, scale);
        zb = ev.project(za + sample_ball(rng, nz, scale));
      }
      const double den = (za - zb).norm() + (s.x - xb).norm();
      if (den == 0.0) continue;
      sup = std::max(sup, (ev.T(za, s.x) - ev.T(zb, xb)).norm() / den);
      ++used;
    }
    E.L_T = detail::inflated(sup, used, sf);
  }
  {
    Rng rng = make_rng(plan.seed, 9);
    double sup = 0.0;
    int used = 0;
    const double h = 1e-3 * plan.region_radius;
    for (const auto& s : pool) {
      Vector dir = sample_ball(rng, n, 1.0);
      if (dir.norm() == 0.0) continue;
      dir /= dir.norm();
      const Vector zs = ev.zstar(s.x + h * dir, s.zstar).z;
      sup = std::max(sup, (zs - s.zstar).norm() / h);
      ++used;
    }
    for (std::size_t i = 0; i + 1 < pool.size(); ++i) {
      const double den = (pool[i].x - pool[i + 1].x).norm();
      if (den == 0.0) continue;
      sup = std::max(sup, (pool[i].zstar - pool[i + 1].zstar).norm() / den);
      ++used;
    }
    E.L_zstar = detail::inflated(sup, used, sf);
  }

  // Optimizer error function L = |z - z*(x)|^2 at frozen x.
  {
    Rng rng = make_rng(plan.seed, 10);
    QuadraticBounds qb;
    for (int k = 0; k < plan.bound_samples; k += 2) {
      const StatePoint& s = pool[static_cast<std::size_t>(k / 2) % pool.size()];
      std::vector<Vector> pts{ev.project(s.zstar + sample_ball(rng, nz, plan.bl_radius)),
                              ev.project(s.zstar + sample_ball(rng, nz, plan.bl_radius))};
      auto fn = [&](const Vector& z) { return (z - s.zstar).squaredNorm(); };
      auto step = [&](const Vector& z) { return ev.T(z, s.x); };
      qb.merge(quadratic_bounds(fn, step, s.zstar, pts));
    }
    E.b1 = detail::sampled_min(qb.lower, qb.samples);
    E.b2 = detail::sampled_max(qb.upper, qb.samples);
    E.b3 = detail::sampled_min(qb.decrease, qb.samples);
    E.b4 = detail::sampled_max(qb.increment, qb.pairs);
    rep.verdicts.push_back(verdict("assumption3.decrease", "L(T(z,x)) - L(z) <= -b3 |z - z*(x)|^2, b3 > 0",
                                   E.b3.value > kPositiveFloor, "b3 " + fmt(E.b3.value) + " over |z~| <= " + fmt(plan.bl_radius)));
  }

  // Reduced closed-loop function W = optimal value.
  {
    double lower = std::numeric_limits<double>::infinity(), upper = 0.0;
    double c3 = std::numeric_limits<double>::infinity();
    double si = 0.0;
    std::string c3_witness;
    int samples = 0;
    for (const auto& s : pool) {
      const double dist2 = (s.x - ev.x_star()).squaredNorm();
      if (dist2 == 0.0) continue;
      lower = std::min(lower, s.W / dist2);
      upper = std::max(upper, s.W / dist2);
      const Vector u = s.zstar.head(m);
      for (double frac : plan.decrease_fractions) {
        const double dp = frac * d;
        const Vector x_next = ev.f_R(s.x, u, dp);
        const Vector zs = ev.zstar(x_next, s.zstar).z;
        const double ratio = -(ev.W(x_next, zs) - s.W) / (dp * dist2);
        if (ratio < c3) {
          c3 = ratio;
          c3_witness = "x=" + fmt(s.x) + " delta=" + fmt(dp);
        }
        si = std::max(si, (x_next - s.x).norm() / (dp * std::sqrt(dist2)));
        ++samples;
      }
    }
    double c4 = 0.0, c4c = 0.0;
    int pairs = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        const double dx = (pool[i].x - pool[j].x).norm();
        if (dx == 0.0) continue;
        const double dW = std::abs(pool[i].W - pool[j].W);
        c4 = std::max(c4, dW / (dx * (pool[i].x.norm() + pool[j].x.norm())));
        c4c = std::max(c4c, dW / (dx * ((pool[i].x - ev.x_star()).norm() + (pool[j].x - ev.x_star()).norm())));
        ++pairs;
      }
    }
    E.c1 = detail::sampled_min(lower, static_cast<int>(pool.size()));
    E.c2 = detail::sampled_max(upper, static_cast<int>(pool.size()));
    E.c3 = detail::sampled_min(c3, samples);
    E.c4 = detail::sampled_max(c4, pairs);
    E.c4_centered = detail::sampled_max(c4c, pairs);
    E.single_integrator_ratio = si;
    rep.verdicts.push_back(verdict("assumption4.bounds", "c1 |x - x*|^2 <= W(x) <= c2 |x - x*|^2, 0 < c1 <= c2",
                                   E.c1.value > kPositiveFloor && E.c1.value <= E.c2.value,
                                   "c1 " + fmt(E.c1.value) + ", c2 " + fmt(E.c2.value)));
    rep.verdicts.push_back(verdict("assumption4.decrease",
                                   "W(f_R(x, Pi z*(x), delta)) - W(x) <= -delta c3 |x - x*|^2, c3 > 0",
                                   E.c3.value > kPositiveFloor, "c3 " + fmt(E.c3.value),
                                   E.c3.value > kPositiveFloor ? "" : c3_witness));
    rep.verdicts.push_back(verdict("assumption4.increment",
                                   "W(x) - W(x') <= c4 |x - x'| (|x| + |x'|), also with |x - x*| + |x' - x*|",
                                   std::isfinite(c4) && std::isfinite(c4c),
                                   "c4 " + fmt(c4) + ", centered " + fmt(c4c)));
  }

  // Derived constants of the stacked fast map w = (xi, z) with equilibrium h(x).
  E.L_h = detail::derived(E.L_xi.value * (1.0 + E.L_zstar.value) + E.L_zstar.value);
  E.L_G = detail::derived(std::sqrt(2.0) * E.L_g.value + E.L_T.value);
  E.L_f_slow = detail::derived(
      std::max({std::sqrt(2.0) * E.L_f.value, sf * E.f_x_lipschitz, sf * E.single_integrator_ratio}));
  {
    Rng rng = make_rng(plan.seed, 11);
    const std::vector<StatePoint> near = ev.pool(rng, std::max(2, plan.state_pool / 4), plan.near_radius);
    double si = 0.0;
    for (const auto& s : near) {
      const double dist = (s.x - ev.x_star()).norm();
      if (dist == 0.0) continue;
      for (double frac : plan.decrease_fractions) {
        const double dp = frac * d;
        si = std::max(si, (ev.f_R(s.x, s.zstar.head(m), dp) - s.x).norm() / (dp * dist));
      }
    }
    rep.verdicts.push_back(verdict("theorem2.single_integrator", "|f(x, h(x), delta) - x| <= delta L_f |x - x*|",
                                   detail::within(si, E.L_f_slow.value),
                                   "ratio " + fmt(E.single_integrator_ratio) + " on the region, " + fmt(si) +
                                       " near x*, L_f " + fmt(E.L_f_slow.value)));
  }

  // Boundary-layer composite function.
  const char* kappa_ineq = "kappa = 1.1 (k1^2 / (a3 b3) + k2 / b3), H(kappa) positive definite";
  const char* bl_ineq = "U(xi~+, z~+) - U(xi~, z~) <= -d3 (|xi~|^2 + |z~|^2), d3 > 0";
  try {
    rep.lem1 = lemma1_kappa(E.a3.value, E.a4.value, E.b3.value, E.L_xi.value, E.L_g.value, E.L_T.value);
  } catch (const Error& e) {
    rep.verdicts.push_back(detail::not_evaluated("lemma1.kappa_rule", kappa_ineq, e.what()));
    rep.verdicts.push_back(detail::not_evaluated("lemma1.boundary_layer_decrease", bl_ineq, e.what()));
  }
  if (rep.lem1) {
    const Lemma1Constants& L = *rep.lem1;
    rep.verdicts.push_back(verdict("lemma1.kappa_rule", kappa_ineq,
                                   L.kappa > L.kappa_threshold && L.h_min_eig > 0.0,
                                   "kappa " + fmt(L.kappa) + ", threshold " + fmt(L.kappa_threshold) +
                                       ", min eig H " + fmt(L.h_min_eig)));
    rep.d1 = std::min(E.a1.value, L.kappa * E.b1.value);
    rep.d2 = std::max(E.a2.value, L.kappa * E.b2.value);
    rep.d4 = std::max(E.a4.value, L.kappa * E.b4.value);
    Rng rng = make_rng(plan.seed, 12);
    rep.boundary_layer = boundary_layer_check(ev, pool, L.kappa, plan, rng);
    rep.d3_measured = rep.boundary_layer->d3;
    const bool ok = rep.boundary_layer->violations == 0 && rep.d3_measured > 0.0;
    rep.verdicts.push_back(verdict("lemma1.boundary_layer_decrease", bl_ineq, ok,
                                   std::to_string(rep.boundary_layer->samples) + " samples, d3 " + fmt(rep.d3_measured) +
                                       ", violations " + std::to_string(rep.boundary_layer->violations),
                                   ok ? "" : rep.boundary_layer->witness));
  }

  // Two-timescale theorem.
  const char* sylv_ineq = "Q(delta) positive definite and c3 b3 > p(delta) for some delta in (0, cap]";
  const char* v_ineq = "V(x+, xi+, z+) < V(x, xi, z) at delta = delta_bar / 2 near the equilibrium";
  rep.delta_caps = {d, model.delta_max()};
  if (rep.lem1) {
    TheoremTwoInputs in;
    in.c3 = E.c3.value;
    in.c4 = E.c4_centered.value;
    in.b3 = std::min(rep.lem1->h_min_eig, rep.d3_measured);
    in.b4 = rep.d4;
    in.L_f = E.L_f_slow.value;
    in.L_h = E.L_h.value;
    in.L_G = E.L_G.value;
    rep.thm2 = theorem2_assemble(in);
    rep.delta_bar = bisect_delta_bar(*rep.thm2, rep.delta_caps);
    if (rep.delta_bar.value) {
      const double db = *rep.delta_bar.value;
      SylvesterCheck sc;
      sc.delta = db;
      const Eigen::Matrix2d Q = rep.thm2->Qmat(db);
      sc.min_eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(Q).eigenvalues()[0];
      sc.det = Q.determinant();
      sc.det_identity = rep.thm2->det_identity(db);
      sc.printed_condition = rep.thm2->printed_condition(db);
      sc.minors_positive = rep.thm2->leading_minors_positive(db);
      rep.sylvester = sc;
      rep.verdicts.push_back(verdict("theorem2.sylvester", sylv_ineq, true,
                                     "delta_bar " + fmt(db) + " (" + rep.delta_bar.diagnostic + "), min eig Q " +
                                         fmt(sc.min_eig)));
      Rng rng = make_rng(plan.seed, 13);
      rep.v_decrease = closed_loop_v_decrease(ev, rep.lem1->kappa, 0.5 * db, plan, rng);
      const bool ok = rep.v_decrease->violations == 0;
      rep.verdicts.push_back(verdict("theorem2.v_decrease", v_ineq, ok,
                                     std::to_string(rep.v_decrease->samples) + " samples at delta " +
                                         fmt(rep.v_decrease->delta) + ", violations " +
                                         std::to_string(rep.v_decrease->violations) + ", worst ratio " +
                                         fmt(rep.v_decrease->worst),
                                     ok ? "" : rep.v_decrease->witness));
    } else {
      rep.verdicts.push_back(verdict("theorem2.sylvester", sylv_ineq, false, rep.delta_bar.diagnostic));
      rep.verdicts.push_back(detail::not_evaluated("theorem2.v_decrease", v_ineq, "no delta_bar"));
    }
  } else {
    rep.delta_bar = {std::nullopt, "boundary-layer constants unavailable"};
    rep.verdicts.push_back(detail::not_evaluated("theorem2.sylvester", sylv_ineq, rep.delta_bar.diagnostic));
    rep.verdicts.push_back(detail::not_evaluated("theorem2.v_decrease", v_ineq, rep.delta_bar.diagnostic));
  }
  return rep;
}

}  // namespace tsmpc::certify
