#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ddestab/criteria.hpp"
#include "oracles.hpp"

using namespace ddestab;

namespace {

const double pi = std::numbers::pi;
// 50-digit references
const double kC = 0.72461135377670848;
const double kThetaC = 2.3311223704144226;
const double kOmegaS = 0.83078617007024209;
const double kCriticalMean = 1.2091995761561452;

DelayDistribution two_atoms() { return DelayDistribution(DiscreteAtoms({{0.8, 0.625}, {0.2, 3.5}})); }

DelayDistribution hemato_mixture() {
  return DelayDistribution(GammaMixture({{0.3, GammaKernel(2, 2.0)},
                                         {0.4, GammaKernel(20, 10.0)},
                                         {0.3, GammaKernel(60, 20.0)}}));
}

}  // namespace

TEST(Constants, TangencyValues) {
  const auto tc = constants_c_thetac();
  EXPECT_NEAR(tc.c, 0.7246, 1e-4);
  EXPECT_NEAR(tc.theta_c, 2.3311, 1e-4);
  EXPECT_NEAR(tc.c, kC, 1e-13);
  EXPECT_NEAR(tc.theta_c, kThetaC, 1e-12);
  EXPECT_NEAR(std::cos(tc.theta_c) - (1.0 - tc.c * tc.theta_c), 0.0, 1e-10);
  EXPECT_NEAR(tc.c, std::sin(tc.theta_c), 1e-15);
}

TEST(GEval, EndpointsAndJunction) {
  EXPECT_EQ(g_eval(0.0), 1.0);
  EXPECT_NEAR(g_eval(pi), -1.0, 1e-15);
  const double t = constants_c_thetac().theta_c;
  EXPECT_NEAR(g_eval(t), std::cos(t), 1e-10);
  EXPECT_NEAR(g_eval(t - 1e-12), std::cos(t), 1e-10);
  EXPECT_THROW(g_eval(-0.01), std::invalid_argument);
  EXPECT_THROW(g_eval(3.2), std::invalid_argument);
}

TEST(GEval, MinorantOfCosine) {
  for (int i = 0; i <= 10000; ++i) {
    const double x = pi * i / 10000.0;
    ASSERT_LE(g_eval(x), std::cos(x) + 1e-12) << x;
  }
}

TEST(HayesBound, Values) {
  auto h = hayes_bound(0.0, 1.0);
  EXPECT_EQ(h.kind, BoundKind::finite);
  EXPECT_NEAR(h.value, pi / 2.0, 1e-15);
  h = hayes_bound(-0.5, 1.0);
  EXPECT_NEAR(h.value, 1.2092, 1e-4);
  EXPECT_NEAR(h.value, kCriticalMean, 1e-14);
  EXPECT_EQ(hayes_bound(1.0, 0.95).kind, BoundKind::infinite);
  EXPECT_EQ(hayes_bound(1.0, -0.5).kind, BoundKind::infinite);
  EXPECT_EQ(hayes_bound(1.0, -1.0).kind, BoundKind::none);
  EXPECT_EQ(hayes_bound(-2.0, 1.0).kind, BoundKind::none);
  EXPECT_EQ(hayes_bound(-1.0, 1.0).kind, BoundKind::none);
  EXPECT_EQ(hayes_bound(0.5, -0.5).kind, BoundKind::none);
}

TEST(Classify, DelayIndependentStable) {
  const auto v = classify(CharacteristicProblem(1.0, 0.5, DelayDistribution::single(2.0)));
  EXPECT_EQ(v.region, Region::delay_independent_stable);
  EXPECT_EQ(v.decided_by, DecidedBy::hayes_axioms);
  EXPECT_EQ(v.stable, true);
}

TEST(Classify, MeanBoundForTwoAtoms) {
  const auto v = classify(CharacteristicProblem(-0.5, 1.0, two_atoms()));
  EXPECT_EQ(v.region, Region::mean_bound_stable);
  EXPECT_EQ(v.decided_by, DecidedBy::mean_bound);
  EXPECT_EQ(v.stable, true);
  ASSERT_TRUE(v.critical_mean);
  EXPECT_NEAR(*v.critical_mean, kCriticalMean, 1e-12);
}

TEST(Classify, HematoMixtureIsDistributionDependentStable) {
  const auto v = classify(CharacteristicProblem(0.0, 0.95, hemato_mixture()));
  EXPECT_EQ(v.region, Region::distribution_dependent);
  EXPECT_EQ(v.stable, true);
  EXPECT_NE(v.decided_by, DecidedBy::mean_bound);
}

TEST(Classify, UnstableBranches) {
  auto v = classify(CharacteristicProblem(-2.0, 1.0, DelayDistribution::single(1.0)));
  EXPECT_EQ(v.region, Region::delay_independent_unstable);
  EXPECT_EQ(v.stable, false);
  v = classify(CharacteristicProblem(0.0, 1.5, hemato_mixture()));
  EXPECT_EQ(v.region, Region::distribution_dependent);
  EXPECT_EQ(v.decided_by, DecidedBy::rightmost_root);
  EXPECT_EQ(v.stable, false);
  ASSERT_TRUE(v.rightmost_real);
  EXPECT_NEAR(*v.rightmost_real, 0.095018961884868, 1e-9);
}

TEST(Classify, MarginalLeavesStableEmpty) {
  const auto v = classify(CharacteristicProblem(0.0, 1.0, DelayDistribution::single(pi / 2)));
  EXPECT_EQ(v.region, Region::distribution_dependent);
  EXPECT_FALSE(v.stable.has_value());
}

TEST(Classify, EnumStringsRoundTrip) {
  for (auto r : {Region::delay_independent_stable, Region::mean_bound_stable, Region::distribution_dependent,
                 Region::delay_independent_unstable}) {
    EXPECT_EQ(region_from_string(to_string(r)), r);
  }
  for (auto d : {DecidedBy::hayes_axioms, DecidedBy::mean_bound, DecidedBy::cs_sweep, DecidedBy::rightmost_root}) {
    EXPECT_EQ(decided_by_from_string(to_string(d)), d);
  }
  EXPECT_THROW(region_from_string("nowhere"), std::invalid_argument);
}

TEST(CsSweep, SmallOmegaCertifies) {
  const auto s = cs_sweep(0.99, DelayDistribution::single(1.0));
  EXPECT_EQ(s.outcome, SweepOutcome::certified_stable);
  EXPECT_TRUE(s.crossings.empty());
  EXPECT_NEAR(s.omega_c, std::sqrt(1.0 - 0.99 * 0.99), 1e-15);
}

TEST(CsSweep, TwoAtomsCrossOnce) {
  const auto s = cs_sweep(-0.5, two_atoms());
  EXPECT_EQ(s.outcome, SweepOutcome::certified_stable);
  ASSERT_EQ(s.crossings.size(), 1u);
  EXPECT_NEAR(s.crossings[0].omega, 0.8308, 1e-3);
  EXPECT_NEAR(s.crossings[0].omega, kOmegaS, 1e-10);
  EXPECT_LT(s.crossings[0].s, s.crossings[0].omega);
}

TEST(CsSweep, LongDelayInconclusive) {
  const auto s = cs_sweep(-0.5, DelayDistribution::single(3.0));
  EXPECT_EQ(s.outcome, SweepOutcome::inconclusive);
  ASSERT_FALSE(s.crossings.empty());
  EXPECT_GE(s.crossings[0].s, s.crossings[0].omega);
}

TEST(CsSweep, RejectsOutOfRange) {
  EXPECT_THROW(cs_sweep(1.0, two_atoms()), std::invalid_argument);
  EXPECT_THROW(cs_sweep(-1.2, two_atoms()), std::invalid_argument);
}

TEST(CCrossings, SingleAtomAnalytic) {
  // cos(2 w) = 0.3 on (0, 4]: w = (+-acos(0.3) + 2 pi k) / 2
  const auto w = c_crossings(DelayDistribution::single(2.0), 0.3, 4.0);
  const double r = std::acos(0.3);
  const std::vector<double> expect{r / 2, (2 * pi - r) / 2, (2 * pi + r) / 2};
  ASSERT_EQ(w.size(), expect.size());
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(w[i], expect[i], 1e-10);
}

TEST(CCrossings, FindsTangentialTouch) {
  // cos(w) touches -1 at w = pi without a sign change
  const auto w = c_crossings(DelayDistribution::single(1.0), -1.0, 4.0);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NEAR(w[0], pi, 1e-6);
}

TEST(ExtremalFStar, TwoAtomMeanAndCrossing) {
  const auto f = extremal_f_star(-0.5, 1.2, kOmegaS);
  // 40-digit references
  EXPECT_NEAR(f.tau2_star, 1.3402384378184474, 1e-10);
  EXPECT_NEAR(f.p2_star, 0.89536306834572035, 1e-10);
  EXPECT_NEAR(f.s_value(), 0.80334492488950246, 1e-10);
  EXPECT_NEAR(f.c_value(), 0.5, 1e-9);
  EXPECT_NEAR(f.p2_star * f.tau2_star, 1.2, 1e-12);
  EXPECT_LT(f.s_value(), kOmegaS);
  const auto d = f.distribution();
  EXPECT_NEAR(mean(d), 1.2, 1e-12);
  EXPECT_NEAR(cs_moments(d, kOmegaS).c, 0.5, 1e-9);
  EXPECT_GT(kOmegaS * f.tau2_star, 0.0);
  EXPECT_LE(kOmegaS * f.tau2_star, kThetaC);
}

TEST(ExtremalFStar, NearCriticalMeanDegeneratesToSingleAtom) {
  const double wc = std::sqrt(0.75);
  const auto f = extremal_f_star(-0.5, kCriticalMean - 1e-9, wc);
  EXPECT_NEAR(f.p2_star, 1.0, 1e-6);
  EXPECT_NEAR(f.tau2_star, kCriticalMean, 1e-6);
}

TEST(ExtremalFStar, SingleAtomWhenWeightSaturates) {
  ExtremalDistribution f;
  f.p2_star = 1.0;
  f.tau2_star = 1.5;
  f.omega_s = 0.5;
  EXPECT_EQ(f.distribution(), DelayDistribution::single(1.5));
}

TEST(ExtremalFStar, Infeasible) {
  EXPECT_THROW(extremal_f_star(0.9, 0.1, 0.4), InfeasibleExtremal);
}

TEST(ExtremalFStar, InvalidInputs) {
  EXPECT_THROW(extremal_f_star(1.0, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(extremal_f_star(-0.5, 1.3, 0.5), std::invalid_argument);
  EXPECT_THROW(extremal_f_star(-0.5, 1.0, 0.9), std::invalid_argument);
  EXPECT_THROW(extremal_f_star(-0.5, 1.0, 0.0), std::invalid_argument);
}

TEST(ExtremalGivenU, TwoAtomChord) {
  const auto s = extremal_given_u(-0.5, 0.9969, 0.5192);
  // 40-digit references
  EXPECT_NEAR(s.v1, 1.3058475347618930, 1e-10);
  ASSERT_EQ(s.roots.size(), 2u);
  EXPECT_NEAR(s.roots[1], 2.9075255134445019, 1e-10);
  EXPECT_NEAR(s.s_value, 0.78094244606100381, 1e-10);
  EXPECT_NEAR(s.p1, 0.39273946857966960, 1e-10);
  EXPECT_NEAR(s.p2, 0.60726053142033040, 1e-10);
  EXPECT_NEAR(chord_c(s.t, s.u, s.v1), 0.5, 1e-12);
  const auto d = s.density(kOmegaS);
  ASSERT_EQ(d.atoms().size(), 2u);
  EXPECT_NEAR(d.atoms().atoms()[0].delay, 0.62495022029086280, 1e-10);
  EXPECT_NEAR(d.atoms().atoms()[1].delay, 1.5718214647837542, 1e-10);
}

TEST(ExtremalGivenU, Preconditions) {
  EXPECT_THROW(extremal_given_u(-0.5, 0.9969, 0.9969), std::invalid_argument);
  EXPECT_THROW(extremal_given_u(-0.5, 2.5, 0.5), std::invalid_argument);
  EXPECT_THROW(extremal_given_u(0.5, 2.2, 2.1), std::invalid_argument);
}

TEST(ExtremalGivenU, AnchoredAtZeroMatchesFStar) {
  const double t = kOmegaS * 1.2;
  const auto s = extremal_given_u(-0.5, t, 0.0);
  const auto f = extremal_f_star(-0.5, 1.2, kOmegaS);
  EXPECT_NEAR(s.v1, kOmegaS * f.tau2_star, 1e-9);
  EXPECT_NEAR(s.s_value, f.s_value(), 1e-9);
}

TEST(ChordProperties, SineDecreasesAlongFirstAtom) {
  const double a = -0.5;
  for (double t : {0.8, 0.9969, 1.03}) {
    double prev = INFINITY;
    int checked = 0;
    const double u_max = std::min(t, std::acos(-a));
    for (int i = 0; i < 100; ++i) {
      const double u = u_max * i / 100.0;
      if (!(std::cos(u) + a > 0.0)) continue;
      ChordSolution s;
      try {
        s = extremal_given_u(a, t, u);
      } catch (const std::domain_error&) {
        continue;  // no crossing for this chord
      }
      EXPECT_LT(s.s_value, prev) << "T=" << t << " u=" << u;
      prev = s.s_value;
      ++checked;
    }
    EXPECT_GT(checked, 15);
  }
}

TEST(ChordProperties, FirstChordDominates) {
  // S(u, v1) >= S(u, v_i) for every further solution v_i
  for (double u : {0.0, 0.2, 0.5192, 0.65}) {
    const auto s = extremal_given_u(-0.5, 0.9969, u);
    for (double v : s.roots) EXPECT_GE(s.s_value + 1e-12, chord_s(s.t, s.u, v));
  }
}
