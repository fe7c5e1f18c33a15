#include <cmath>

#include <gtest/gtest.h>

#include "tsmpc/certify/quadratic.hpp"
#include "tsmpc/certify/sampling.hpp"
#include "tsmpc/core/pendulum.hpp"

using namespace tsmpc;
using namespace tsmpc::certify;

namespace {

const PendulumModel kPend;

TEST(Lipschitz, IdentityIsOne) {
  Rng rng = make_rng(1, 0);
  const auto e = estimate_lipschitz([](const Vector& v) { return v; }, Vector::Constant(3, -1), Vector::Constant(3, 1),
                                    1000, rng);
  EXPECT_NEAR(e.value, 1.0, 1e-12);
  EXPECT_EQ(e.method, Method::sampled_lower_bound);
  EXPECT_EQ(e.samples, 1000);
}

TEST(Lipschitz, AnalyticPreferredAndSampledBelow) {
  const SamplingPlan plan = SamplingPlan::pendulum();
  Rng rng = make_rng(1, 1);
  Vector lo(2), hi(2);
  lo << plan.x_lo[1], plan.u_lo[0];
  hi << plan.x_hi[1], plan.u_hi[0];
  auto eq = [](const Vector& v) {
    Vector out(1);
    kPend.equilibrium_map(Eigen::Vector2d(0.0, v[0]), v.tail(1), out);
    return out;
  };
  const auto e = estimate_lipschitz(eq, lo, hi, 1000, rng, kPend.analytic_constants().L_xi, {1, 1});
  EXPECT_EQ(e.method, Method::analytic);
  EXPECT_NEAR(e.value, 1.666667, 1e-6);
  EXPECT_LE(e.sampled, e.value * (1 + 1e-12));
  EXPECT_GT(e.sampled, 0.9 * e.value);
}

TEST(Lipschitz, SlowCouplingAnalytic) {
  EXPECT_NEAR(*kPend.analytic_constants().L_f, 0.8, 1e-15);
}

TEST(Lipschitz, DegenerateBoxRejected) {
  Rng rng = make_rng(1, 0);
  auto id = [](const Vector& v) { return v; };
  EXPECT_THROW(estimate_lipschitz(id, Vector::Zero(2), Eigen::Vector2d(1.0, 0.0), 1000, rng), ConfigError);
}

TEST(Lipschitz, MonotoneInSampleCount) {
  auto f = [](const Vector& v) {
    Vector out(1);
    out[0] = std::sin(3 * v[0]) * v[1] + v[1] * v[1];
    return out;
  };
  double last = 0.0;
  for (int n : {1000, 2000, 4000, 8000}) {
    Rng rng = make_rng(5, 2);
    const double e = estimate_lipschitz(f, Vector::Constant(2, -2), Vector::Constant(2, 2), n, rng).value;
    EXPECT_GE(e, last);
    last = e;
  }
}

TEST(Plan, Validation) {
  SamplingPlan p = SamplingPlan::pendulum();
  EXPECT_NO_THROW(p.validate(kPend.dims()));
  p.lipschitz_samples = 999;
  EXPECT_THROW(p.validate(kPend.dims()), ConfigError);
  p = SamplingPlan::pendulum();
  p.xi_hi = p.xi_lo;
  EXPECT_THROW(p.validate(kPend.dims()), ConfigError);
  p = SamplingPlan::pendulum();
  p.bl_radius = 0.0;
  EXPECT_THROW(p.validate(kPend.dims()), ConfigError);
  EXPECT_THROW(SamplingPlan::unit({1, 1, 1}).validate(kPend.dims()), DimensionError);
}

TEST(Sampling, BallAndBox) {
  Rng rng = make_rng(3, 0);
  for (int k = 0; k < 1000; ++k) {
    EXPECT_LE(sample_ball(rng, 4, 0.5).norm(), 0.5 + 1e-15);
    const Vector b = sample_box(rng, Eigen::Vector2d(-1, 2), Eigen::Vector2d(0, 3));
    EXPECT_TRUE(b[0] >= -1 && b[0] <= 0 && b[1] >= 2 && b[1] <= 3);
  }
  Rng a = make_rng(3, 7), b = make_rng(3, 7), c = make_rng(3, 8);
  EXPECT_EQ(a(), b());
  EXPECT_NE(make_rng(3, 7)(), c());
}

TEST(QuadraticBounds, PendulumFastError) {
  const double rho = kPend.params().fast_factor();
  Rng rng = make_rng(1, 4);
  std::vector<Vector> pts;
  for (int k = 0; k < 1000; ++k) pts.push_back(sample_box(rng, Vector::Constant(1, -40), Vector::Constant(1, 40)));
  const Vector x = Eigen::Vector2d(0.3, -2.0);
  const Vector u = Vector::Constant(1, 5.0);
  Vector e(1);
  kPend.equilibrium_map(x, u, e);
  auto step = [&](const Vector& v) {
    Vector out(1);
    kPend.extra_map(v + e, x, u, 0.01, out);
    return Vector(out - e);
  };
  const QuadraticBounds b = quadratic_bounds([](const Vector& v) { return v.squaredNorm(); }, step, Vector::Zero(1), pts);
  EXPECT_EQ(b.lower, 1.0);
  EXPECT_EQ(b.upper, 1.0);
  EXPECT_NEAR(b.decrease, 1 - rho * rho, 1e-9);
  EXPECT_NEAR(b.decrease, 0.84, 1e-9);
  EXPECT_NEAR(b.increment, 1.0, 1e-9);
  EXPECT_EQ(b.samples, 1000);
}

TEST(QuadraticBounds, IdentityStepHasNoDecrease) {
  std::vector<Vector> pts{Eigen::Vector2d(1, 0), Eigen::Vector2d(0.3, -2), Eigen::Vector2d(-1, 1)};
  const QuadraticBounds b = quadratic_bounds([](const Vector& v) { return v.squaredNorm(); },
                                             [](const Vector& v) { return v; }, Vector::Zero(2), pts);
  EXPECT_EQ(b.decrease, 0.0);
  EXPECT_FALSE(b.decrease > 0.0);
  EXPECT_EQ(b.decrease_witness.size(), 2);
}

TEST(QuadraticBounds, SkipsEquilibriumAndMerges) {
  std::vector<Vector> pts{Vector::Zero(1), Vector::Constant(1, 2.0)};
  auto fn = [](const Vector& v) { return 3 * v.squaredNorm(); };
  QuadraticBounds b = quadratic_bounds(fn, nullptr, Vector::Zero(1), pts);
  EXPECT_EQ(b.samples, 1);
  EXPECT_FALSE(b.has_decrease());
  EXPECT_EQ(b.lower, 3.0);
  QuadraticBounds c = quadratic_bounds([](const Vector& v) { return v.squaredNorm(); }, nullptr, Vector::Zero(1), pts);
  b.merge(c);
  EXPECT_EQ(b.lower, 1.0);
  EXPECT_EQ(b.upper, 3.0);
  EXPECT_EQ(b.samples, 2);
}

}  // namespace
