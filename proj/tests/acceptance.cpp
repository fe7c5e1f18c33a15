// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tsmpc/certify/certificate.hpp"
#include "tsmpc/core/pendulum.hpp"
#include "tsmpc/sim/compare.hpp"

using namespace tsmpc;
using namespace tsmpc::certify;

namespace {

constexpr double kEquilibriumTol = 1e-10;
constexpr double kEquilibriumSeconds = 5.0;
constexpr double kRateMax = -0.1;
constexpr double kR2Min = 0.9;
constexpr double kFinalThetaMax = 1e-2;
constexpr double kConvergenceSeconds = 10.0;
constexpr double kBoundedTheta = 100.0;
constexpr double kGradRelTol = 1e-6;
constexpr double kGradAbsFloor = 1e-9;
constexpr double kGradSeconds = 5.0;
constexpr double kFixedPointTol = 1e-7;
constexpr double kIdentityTol = 1e-12;
constexpr double kSylvesterTol = 1e-10;
constexpr double kArithmeticTol = 1e-6;

int failures = 0;

void report(int id, bool pass, const std::string& what) {
  std::printf("criterion %2d %s: %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

std::string f(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const PendulumModel kPend;

SimConfig scenario(double delta) {
  SimConfig c;
  c.delta = Timescale(delta);
  c.duration_s = 10.0;
  c.x0 = TargetState{1.0, 0.0};
  c.xi0 = ExtraState{0.0};
  return c;
}

ComparisonRun cell(double delta, Strategy s) {
  return run_cell(kPend, pendulum_benchmark_spec(Timescale(delta)), SolverConfig{}, scenario(delta), s, 0.2);
}

double max_abs_theta(const SimTrace& t) {
  double m = 0.0;
  for (const auto& r : t.records) m = std::max(m, r.err_theta);
  return t.diverged ? INFINITY : m;
}

void equilibrium() {
  const auto t0 = std::chrono::steady_clock::now();
  const OcpSpec spec = pendulum_benchmark_spec(Timescale(0.01));
  const SolverConfig sc;
  const Vector x_star = kPend.target_equilibrium();
  const auto opt = solve_optimal(spec, kPend, sc, TargetState(x_star), Vector::Zero(spec.decision_size()));
  Vector xi(1);
  kPend.equilibrium_map(x_star, opt.z.head(1), xi);
  SimConfig c = scenario(0.01);
  c.x0 = TargetState(x_star);
  c.xi0 = ExtraState(xi);
  c.z0 = opt.z;
  const SimTrace t = simulate(kPend, spec, sc, c);
  double dev = 0.0;
  for (const auto& r : t.records) {
    dev = std::max({dev, (r.x - x_star).norm(), (r.xi - xi).norm(), (r.u - opt.z.head(1)).norm()});
  }
  dev = std::max(dev, (t.final_z - opt.z).norm());
  const double secs = seconds_since(t0);
  report(1, t.records.size() == 1000 && dev <= kEquilibriumTol && secs < kEquilibriumSeconds,
         "equilibrium held for " + std::to_string(t.records.size()) + " steps, max deviation " + f(dev) + " (tol " +
             f(kEquilibriumTol) + "), " + f(secs) + " s");
}

double proposed_rate(double delta, const ComparisonRun& run) {
  (void)delta;
  return run.row.fit_available ? run.row.rate_per_s : NAN;
}

void experiments() {
  const auto t0 = std::chrono::steady_clock::now();
  const ComparisonRun p01 = cell(0.01, Strategy::proposed());
  const double secs = seconds_since(t0);
  {
    const auto& r = p01.row;
    report(2, r.fit_available && r.rate_per_s < kRateMax && r.r2 > kR2Min && r.final_err_theta < kFinalThetaMax &&
                  secs < kConvergenceSeconds,
           "delta 0.01 proposed: rate " + f(r.rate_per_s) + " 1/s (< " + f(kRateMax) + "), R^2 " + f(r.r2) +
               " (> " + f(kR2Min) + "), final |theta| " + f(r.final_err_theta) + " (< " + f(kFinalThetaMax) +
               "), " + f(secs) + " s");
  }

  const ComparisonRun p1 = cell(0.1, Strategy::proposed());
  const ComparisonRun s1 = cell(0.1, Strategy::subopt_full());
  {
    const double mp = p1.row.mean_abs_err_theta, ms = s1.row.mean_abs_err_theta;
    const bool bounded = max_abs_theta(p1.trace) < kBoundedTheta && max_abs_theta(s1.trace) < kBoundedTheta;
    report(3, mp > ms && bounded,
           "delta 0.1 mean |theta|: proposed " + f(mp) + " vs subopt-full " + f(ms) + ", margin " + f(mp - ms) +
               ", max |theta| " + f(max_abs_theta(p1.trace)) + " / " + f(max_abs_theta(s1.trace)));
  }

  const ComparisonRun p2 = cell(0.2, Strategy::proposed());
  const ComparisonRun s2 = cell(0.2, Strategy::subopt_full());
  const ComparisonRun o2 = cell(0.2, Strategy::opt_full());
  {
    const double mp = p2.row.mean_abs_err_theta, ms = s2.row.mean_abs_err_theta, mo = o2.row.mean_abs_err_theta;
    const double ro = o2.row.rate_per_s;
    const bool smallest = mo < mp && mo < ms;
    const bool degraded = o2.row.fit_available && ((p2.row.fit_available && p2.row.rate_per_s >= 0.5 * ro) ||
                                                   (s2.row.fit_available && s2.row.rate_per_s >= 0.5 * ro));
    report(4, smallest && degraded,
           "delta 0.2 mean |theta|: opt-full " + f(mo) + ", proposed " + f(mp) + ", subopt-full " + f(ms) +
               "; rates opt-full " + f(ro) + ", proposed " + f(p2.row.rate_per_s) + ", subopt-full " +
               f(s2.row.rate_per_s) + " (need one >= " + f(0.5 * ro) + ")");
  }

  {
    const double r01 = proposed_rate(0.01, p01), r1 = proposed_rate(0.1, p1), r2 = proposed_rate(0.2, p2);
    report(5, r01 < r1 && r1 < r2,
           "proposed rates 1/s: delta 0.01 " + f(r01) + " (R^2 " + f(p01.row.r2) + "), 0.1 " + f(r1) + " (R^2 " +
               f(p1.row.r2) + "), 0.2 " + f(r2) + " (R^2 " + f(p2.row.r2) + "); need strictly increasing");
  }
}

void gradient_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const OcpSpec spec = pendulum_benchmark_spec(Timescale(0.01));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> xs(-1.0, 1.0), us(-24.0, 24.0);
  double worst = 0.0;
  const double h = 1e-3;
  for (int k = 0; k < 100; ++k) {
    const Vector x0 = Eigen::Vector2d(xs(rng), xs(rng));
    Vector z(spec.decision_size());
    for (auto& v : z) v = us(rng);
    OcpObjective obj(spec, kPend, x0);
    Vector g;
    obj.value_and_gradient(z, g);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      auto J = [&](double dz) {
        Vector zz = z;
        zz[i] += dz;
        return obj.value(zz);
      };
      // Fourth-order central stencil.
      const double fd = (-J(2 * h) + 8 * J(h) - 8 * J(-h) + J(-2 * h)) / (12 * h);
      worst = std::max(worst, std::abs(g[i] - fd) / (kGradRelTol * std::abs(fd) + kGradAbsFloor));
    }
  }
  const double secs = seconds_since(t0);
  report(6, worst <= 1.0 && secs < kGradSeconds,
         "100 pairs, worst |g - fd| / (" + f(kGradRelTol) + " |fd| + " + f(kGradAbsFloor) + ") = " + f(worst) +
             ", " + f(secs) + " s");
}

void fixed_point() {
  const OcpSpec spec = pendulum_benchmark_spec(Timescale(0.01));
  const SolverConfig sc;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xs(-1.0, 1.0);
  double worst = 0.0;
  bool converged = true;
  for (int k = 0; k < 20; ++k) {
    OcpObjective obj(spec, kPend, Eigen::Vector2d(xs(rng), xs(rng)));
    const auto opt = solve_optimal(obj, sc, Vector::Zero(spec.decision_size()));
    converged = converged && opt.converged;
    worst = std::max(worst, (solver_map(obj, sc, opt.z).z - opt.z).norm());
  }
  report(7, converged && worst <= kFixedPointTol,
         "20 states, all converged: " + std::string(converged ? "yes" : "no") + ", max |T(z*) - z*| " + f(worst) +
             " (tol " + f(kFixedPointTol) + ")");
}

void identity() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> th(-M_PI, M_PI), om(-10, 10), u(-24, 24), d(1e-4, 0.5);
  double worst = 0.0;
  Vector e(1), g(1);
  for (int k = 0; k < 10000; ++k) {
    const Vector x = Eigen::Vector2d(th(rng), om(rng));
    const Vector uu = Vector::Constant(1, u(rng));
    kPend.equilibrium_map(x, uu, e);
    kPend.extra_map(e, x, uu, d(rng), g);
    worst = std::max(worst, (g - e).norm());
  }
  report(8, worst <= kIdentityTol, "10000 samples, max residual " + f(worst) + " (tol " + f(kIdentityTol) + ")");
}

void certificate_criteria() {
  const auto t0 = std::chrono::steady_clock::now();
  const CertificateReport r =
      full_certificate(kPend, pendulum_benchmark_spec(Timescale(0.01)), SolverConfig{}, SamplingPlan::pendulum());
  const double secs = seconds_since(t0);
  {
    const bool ok = r.lem1 && r.boundary_layer && r.boundary_layer->samples == 10000 &&
                    r.boundary_layer->violations == 0 && r.d3_measured > 0.0 && r.plan.bl_radius == 1.0;
    report(9, ok,
           r.lem1 ? "kappa " + f(r.lem1->kappa) + " = 1.1 x " + f(r.lem1->kappa_threshold) + ", " +
                        std::to_string(r.boundary_layer->samples) + " samples, violations " +
                        std::to_string(r.boundary_layer->violations) + ", d3 " + f(r.d3_measured)
                  : "kappa unavailable");
  }
  {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 2.0), ld(-4.0, 0.0);
    bool p0 = true;
    int disagree = 0, printed_mismatch = 0;
    double det_err = 0.0;
    for (int k = 0; k < 1000; ++k) {
      TheoremTwoInputs in;
      in.c3 = u(rng);
      in.c4 = u(rng);
      in.b3 = u(rng);
      in.b4 = u(rng);
      in.L_f = u(rng);
      in.L_h = u(rng);
      in.L_G = u(rng);
      const TheoremTwoConstants t = theorem2_assemble(in);
      p0 = p0 && t.p(0.0) == 0.0;
      const double d = std::pow(10.0, ld(rng));
      const Eigen::Matrix2d Q = t.Qmat(d);
      const bool eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(Q).eigenvalues()[0] > 0.0;
      disagree += eig != t.leading_minors_positive(d);
      printed_mismatch += eig != t.printed_condition(d);
      det_err = std::max(det_err, std::abs(Q.determinant() - t.det_identity(d)) / std::max(1.0, std::abs(Q.determinant())));
    }
    const bool db = r.delta_bar.value && *r.delta_bar.value > 0.0;
    const bool vd = r.v_decrease && r.v_decrease->samples == 1000 && r.v_decrease->violations == 0;
    report(10, p0 && disagree == 0 && det_err <= kSylvesterTol && db && vd,
           "p(0) = 0: " + std::string(p0 ? "yes" : "no") + "; eigenvalue vs minors disagreements " +
               std::to_string(disagree) + "/1000, max |det Q - (delta c3 b3 - p)| " + f(det_err) +
               ", scalar condition c3 b3 > p disagrees on " + std::to_string(printed_mismatch) +
               "/1000; delta_bar " + (db ? f(*r.delta_bar.value) : std::string("none")) + "; V decrease " +
               (r.v_decrease ? std::to_string(r.v_decrease->samples - r.v_decrease->violations) + "/" +
                                   std::to_string(r.v_decrease->samples) + " at delta " +
                                   f(r.v_decrease->delta)
                             : std::string("not run")) +
               "; certificate " + f(secs) + " s");
  }
}

void arithmetic() {
  const Lemma1Constants L = lemma1_kappa(0.84, 1.0, 0.5, 5.0 / 3.0, 1.0, 0.5);
  TheoremTwoInputs in;
  in.c3 = 1.0;
  in.c4 = 1.0;
  in.b3 = 0.5;
  in.b4 = 1.0;
  in.L_f = 0.8;
  in.L_h = 1.0;
  in.L_G = 1.0;
  const TheoremTwoConstants t = theorem2_assemble(in);
  const bool ok = std::abs(L.k1 - 2.5) <= kArithmeticTol && std::abs(L.k2 - 11.25) <= kArithmeticTol &&
                  std::abs(L.kappa_threshold - 37.380952) <= kArithmeticTol && std::abs(t.k1 - 1.6) <= kArithmeticTol &&
                  std::abs(t.k2 - 1.28) <= kArithmeticTol && std::abs(t.k3 - 0.64) <= kArithmeticTol;
  report(11, ok,
         "lem1.k1 " + f(L.k1) + ", lem1.k2 " + f(L.k2) + ", kappa_threshold " + std::to_string(L.kappa_threshold) +
             "; thm2.k1 " + f(t.k1) + ", thm2.k2 " + f(t.k2) + ", thm2.k3 " + f(t.k3));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> steps{equilibrium,  experiments, gradient_oracle, fixed_point,
                                                 identity, certificate_criteria, arithmetic};
  for (const auto& s : steps) {
    try {
      s();
    } catch (const std::exception& e) {
      std::printf("error: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
