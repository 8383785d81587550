#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ddestab/criteria.hpp"
#include "ddestab/spectrum.hpp"
#include "oracles.hpp"

using namespace ddestab;
using namespace ddestab::oracle;

namespace {

const double pi = std::numbers::pi;

DelayDistribution random_distribution(Rng& rng, double mean_value) {
  if (uniform(rng, 0.0, 1.0) < 0.6) return DelayDistribution(random_atoms(rng, 5, mean_value));
  const auto m = random_mixture(rng, 5);
  return DelayDistribution(m, mean_value / m.mean());
}

}  // namespace

// mean delay below the single-delay critical value is stabilizing for any kernel
TEST(Properties, MeanBelowCriticalIsStable) {
  Rng rng(2024);
  for (int n = 0; n < 200; ++n) {
    const double b = uniform(rng, 0.2, 3.0);
    const double a = uniform(rng, -0.98, 0.98) * b;
    const double estar = hayes_bound(a, b).value;
    const double e = estar * uniform(rng, 0.02, 0.98);
    const auto d = DelayDistribution(random_atoms(rng, 5, e));
    const auto rep = rightmost_root(CharacteristicProblem(a, b, d));
    ASSERT_LT(rep.rightmost_real, 0.0) << "a=" << a << " b=" << b << " E=" << e << " " << n;
  }
}

// a single delay at E is the least stable distribution of mean E
TEST(Properties, SingleDelayIsWorst) {
  Rng rng(77);
  int compared = 0;
  for (int n = 0; n < 200; ++n) {
    const double b = uniform(rng, 0.2, 3.0);
    const double a = uniform(rng, -0.98, 1.5) * b;
    const double e = uniform(rng, 0.05, 4.0);
    const auto single = rightmost_root(CharacteristicProblem(a, b, DelayDistribution::single(e)));
    if (!(single.rightmost_real < -kStabilityMargin)) continue;
    ++compared;
    const auto d = random_distribution(rng, e);
    const auto rep = rightmost_root(CharacteristicProblem(a, b, d));
    ASSERT_LT(rep.rightmost_real, 0.0) << "a=" << a << " b=" << b << " E=" << e;
  }
  EXPECT_GT(compared, 60);
}

// f* maximizes S(omega_s) among two-atom densities of mean E with C(omega_s) = -a
TEST(Properties, ExtremalMaximizesS) {
  Rng rng(5);
  int checked = 0;
  for (int n = 0; n < 20000 && checked < 200; ++n) {
    const double a = uniform(rng, -0.95, 0.95);
    const double estar = hayes_bound(a, 1.0).value;
    const double e = estar * uniform(rng, 0.3, 0.99);
    const double ws = std::sqrt(1.0 - a * a) * uniform(rng, 0.3, 1.0);
    ExtremalDistribution fs;
    try {
      fs = extremal_f_star(a, e, ws);
    } catch (const std::exception&) {
      continue;
    }
    const double sstar = fs.s_value();
    ASSERT_LT(sstar, ws) << "a=" << a << " E=" << e << " w=" << ws;
    const double t = ws * e;
    const double u = uniform(rng, 0.0, 0.999) * t;
    ChordSolution ch;
    try {
      ch = extremal_given_u(a, t, u);
    } catch (const std::exception&) {
      continue;
    }
    for (double v : ch.roots) {
      ASSERT_NEAR(chord_c(t, u, v), -a, 1e-9);
      ASSERT_LE(chord_s(t, u, v), sstar + 1e-9) << "a=" << a << " T=" << t << " u=" << u << " v=" << v;
    }
    ++checked;
  }
  EXPECT_EQ(checked, 200);
}

// Jensen with the convex minorant: C(omega) >= g(omega E)
TEST(Properties, CosineMomentAboveMinorant) {
  Rng rng(11);
  for (int n = 0; n < 500; ++n) {
    const double e = uniform(rng, 0.1, 3.0);
    const auto d = random_distribution(rng, e);
    const double w = uniform(rng, 0.0, pi / e);
    EXPECT_GE(cs_moments(d, w).c, g_eval(w * e) - 1e-12) << "E=" << e << " w=" << w;
  }
}

TEST(Properties, VerdictAgreesWithSpectrum) {
  Rng rng(303);
  for (int n = 0; n < 300; ++n) {
    const double b = uniform(rng, -2.0, 3.0);
    const double a = uniform(rng, -2.0, 2.0);
    const auto d = random_distribution(rng, uniform(rng, 0.1, 3.0));
    const CharacteristicProblem p(a, b, d);
    const auto v = classify(p);
    const double re = rightmost_root(p).rightmost_real;
    if (re > kStabilityMargin) ASSERT_NE(v.stable, std::optional<bool>(true)) << a << " " << b;
    if (re < -kStabilityMargin) ASSERT_NE(v.stable, std::optional<bool>(false)) << a << " " << b;
  }
}

TEST(Properties, RegionInvariants) {
  Rng rng(404);
  for (int n = 0; n < 300; ++n) {
    const double b = uniform(rng, -2.0, 3.0);
    const double a = uniform(rng, -2.0, 2.0);
    const double e = uniform(rng, 0.1, 3.0);
    const auto d = random_distribution(rng, e);
    const auto v = classify(CharacteristicProblem(a, b, d));
    if (a <= -b) {
      EXPECT_EQ(v.region, Region::delay_independent_unstable);
      EXPECT_EQ(v.stable, false);
    } else if (a >= std::abs(b)) {
      EXPECT_EQ(v.region, Region::delay_independent_stable);
      EXPECT_EQ(v.stable, true);
    } else if (e < hayes_bound(a, b).value) {
      EXPECT_EQ(v.region, Region::mean_bound_stable);
      EXPECT_EQ(v.stable, true);
      ASSERT_TRUE(v.critical_mean);
      EXPECT_NEAR(*v.critical_mean, hayes_bound(a, b).value, 1e-12);
    } else {
      EXPECT_EQ(v.region, Region::distribution_dependent);
    }
  }
}

// scaling time by rho maps (a, b, d) to (a / rho, b / rho, d scaled by rho)
TEST(Properties, TimeRescaling) {
  Rng rng(9);
  for (int n = 0; n < 40; ++n) {
    const double rho = uniform(rng, 0.3, 3.0);
    const double a = uniform(rng, -1.0, 1.0);
    const double b = uniform(rng, 0.0, 2.0);
    const auto d = DelayDistribution(random_atoms(rng, 3, uniform(rng, 0.2, 2.0)));
    const double r1 = rightmost_root(CharacteristicProblem(a, b, d)).rightmost_real;
    const double r2 = rightmost_root(CharacteristicProblem(a / rho, b / rho, scale(d, rho))).rightmost_real;
    EXPECT_NEAR(r2, r1 / rho, 1e-7 * std::max(1.0, std::abs(r1)));
  }
}
