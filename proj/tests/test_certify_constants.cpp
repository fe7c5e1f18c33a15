#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "tsmpc/certify/constants.hpp"

using namespace tsmpc;
using namespace tsmpc::certify;

namespace {

TEST(Lemma1, HandExample) {
  const Lemma1Constants c = lemma1_kappa(0.84, 1.0, 0.5, 5.0 / 3.0, 1.0, 0.5);
  EXPECT_NEAR(c.k1, 2.5, 1e-12);
  EXPECT_NEAR(c.k2, 11.25, 1e-12);
  EXPECT_NEAR(c.kappa_threshold, 37.380952, 1e-6);
  EXPECT_NEAR(c.kappa, 1.1 * c.kappa_threshold, 1e-12);
  EXPECT_GT(c.h_min_eig, 0.0);
}

TEST(Lemma1, MatchesIndependentFormula) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int k = 0; k < 200; ++k) {
    const double a3 = u(rng), a4 = u(rng), b3 = u(rng), Lxi = u(rng), Lg = u(rng), LT = u(rng);
    const Lemma1Constants c = lemma1_kappa(a3, a4, b3, Lxi, Lg, LT);
    const double k1 = a4 * Lxi * Lg * (LT + 1);
    const double k2 = a4 * (2 * Lxi * (LT + 1) + std::pow(Lxi * (LT + 1), 2));
    EXPECT_NEAR(c.k1, k1, 1e-12 * k1);
    EXPECT_NEAR(c.k2, k2, 1e-12 * k2);
    EXPECT_NEAR(c.kappa_threshold, k1 * k1 / (a3 * b3) + k2 / b3, 1e-10 * c.kappa_threshold);
    EXPECT_GT(c.h_min_eig, 0.0);
  }
}

TEST(Lemma1, Decoupled) {
  const Lemma1Constants c = lemma1_kappa(0.5, 1.0, 0.5, 0.0, 0.0, 0.0);
  EXPECT_EQ(c.k1, 0.0);
  EXPECT_EQ(c.k2, 0.0);
  EXPECT_EQ(c.kappa_threshold, 0.0);
}

TEST(Lemma1, ImpossibleWithoutDecrease) {
  try {
    lemma1_kappa(0.0, 1.0, 0.5, 1.0, 1.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("certification impossible"), std::string::npos);
  }
  EXPECT_THROW(lemma1_kappa(0.5, 1.0, -1.0, 1.0, 1.0, 1.0), Error);
}

TheoremTwoInputs inputs(double c3, double c4, double b3, double b4, double Lf, double Lh, double LG) {
  TheoremTwoInputs in;
  in.c3 = c3;
  in.c4 = c4;
  in.b3 = b3;
  in.b4 = b4;
  in.L_f = Lf;
  in.L_h = Lh;
  in.L_G = LG;
  return in;
}

TEST(Theorem2, HandExample) {
  const TheoremTwoConstants t = theorem2_assemble(inputs(1.0, 1.0, 0.5, 1.0, 0.8, 1.0, 1.0));
  EXPECT_NEAR(t.k1, 1.6, 1e-15);
  EXPECT_NEAR(t.k2, 1.28, 1e-15);
  EXPECT_NEAR(t.k3, 0.64, 1e-15);
  EXPECT_NEAR(t.k4, 2 * 0.8, 1e-15);
  EXPECT_NEAR(t.k5, 2 * 0.64, 1e-15);
  EXPECT_NEAR(t.k6, 1.6, 1e-15);
  EXPECT_NEAR(t.k7, 0.64, 1e-15);
  EXPECT_NEAR(t.k8, 0.64, 1e-15);
}

TEST(Theorem2, MissingConstantsListed) {
  TheoremTwoInputs in = inputs(1, 1, 1, 1, 1, 1, 1);
  in.b4.reset();
  in.L_G.reset();
  try {
    theorem2_assemble(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("b4, L_G"), std::string::npos) << e.what();
  }
}

TEST(Theorem2, DecoupledLimit) {
  const TheoremTwoConstants t = theorem2_assemble(inputs(1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0));
  for (double d : {0.0, 0.01, 0.5, 3.0}) {
    EXPECT_EQ(t.p(d), 0.0);
    EXPECT_EQ(t.Qmat(d)(0, 1), 0.0);
  }
}

TEST(Theorem2, PAtZeroAndLinearGrowth) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int k = 0; k < 100; ++k) {
    const TheoremTwoConstants t = theorem2_assemble(inputs(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)));
    EXPECT_EQ(t.p(0.0), 0.0);
    double C = 0.0;
    for (double d = 1e-5; d <= 0.01; d *= 1.5) C = std::max(C, std::abs(t.p(d)) / d);
    for (double d = 1e-5; d <= 0.01; d *= 1.3) EXPECT_LE(std::abs(t.p(d)), C * d * (1 + 1e-9) + 1e-300);
    EXPECT_TRUE(t.Qmat(0.37).isApprox(t.Qmat(0.37).transpose()));
  }
}

TEST(Theorem2, SylvesterCrossCheck) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 2.0), ld(-4.0, 0.0);
  int pd_count = 0;
  for (int k = 0; k < 1000; ++k) {
    const TheoremTwoConstants t = theorem2_assemble(inputs(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)));
    const double d = std::pow(10.0, ld(rng));
    const Eigen::Matrix2d Q = t.Qmat(d);
    const bool eig_pd = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(Q).eigenvalues()[0] > 0.0;
    EXPECT_EQ(eig_pd, t.leading_minors_positive(d)) << k;
    EXPECT_NEAR(Q.determinant(), t.det_identity(d), 1e-10 * std::max(1.0, std::abs(Q.determinant())));
    // For delta <= 1 a positive determinant implies the scalar condition as usually stated.
    if (t.leading_minors_positive(d)) {
      EXPECT_TRUE(t.printed_condition(d));
    }
    pd_count += eig_pd;
  }
  EXPECT_GT(pd_count, 0);
}

TEST(Bisect, CapLimitedWhenDecoupled) {
  const TheoremTwoConstants t = theorem2_assemble(inputs(1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0));
  const DeltaBar r = bisect_delta_bar(t, {0.5, 0.2});
  ASSERT_TRUE(r.value);
  EXPECT_EQ(*r.value, 0.2);
  EXPECT_EQ(r.diagnostic, "cap-limited");
}

TEST(Bisect, NoneWithoutReducedDecrease) {
  const TheoremTwoConstants t = theorem2_assemble(inputs(0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0));
  const DeltaBar r = bisect_delta_bar(t, {0.2});
  EXPECT_FALSE(r.value);
  EXPECT_EQ(r.diagnostic, "reduced-system decrease constant nonpositive");
}

TEST(Bisect, HandExampleConstants) {
  const TheoremTwoConstants t = theorem2_assemble(inputs(2.0, 1.0, 0.5, 1.0, 0.8, 1.0, 1.0));
  const DeltaBar r = bisect_delta_bar(t, {1.0});
  ASSERT_TRUE(r.value);
  const double db = *r.value;
  EXPECT_GT(db, 0.0);
  EXPECT_LE(t.p(db), t.c3 * t.b3);
  EXPECT_TRUE(t.feasible(db));
  EXPECT_FALSE(t.feasible(db * (1 + 2 * kBisectRelTol)));
}

TEST(Bisect, RejectsBadCaps) {
  const TheoremTwoConstants t = theorem2_assemble(inputs(1, 1, 1, 1, 1, 1, 1));
  EXPECT_THROW(bisect_delta_bar(t, {}), ConfigError);
  EXPECT_THROW(bisect_delta_bar(t, {0.0}), ConfigError);
}

}  // namespace
