#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddestab/distributions.hpp"
#include "ddestab/spectrum.hpp"

namespace ddestab {

// ---------------------------------------------------------------------------
// Tangency constants

struct TangencyConstants {
  double c{0.0};        // slope of the tangent line 1 - c x to cos
  double theta_c{0.0};  // tangency point in (pi/2, pi)
};

/// Solves c = sin(theta), 1 - theta sin(theta) = cos(theta) on (pi/2, pi)
/// by bisection to 1e-12 followed by Newton polish.
TangencyConstants constants_c_thetac();

/// Convex minorant of cos on [0, pi]: 1 - c x below theta_c, cos x above.
double g_eval(double x);

// ---------------------------------------------------------------------------
// Closed-form bound and verdicts

enum class BoundKind { finite, infinite, none };

/// Critical mean delay E* = arccos(-a/b) / sqrt(b^2 - a^2) of the
/// single-delay equation. `infinite` when stable for every delay
/// distribution, `none` when unstable for every distribution.
struct HayesBound {
  BoundKind kind{BoundKind::none};
  double value{0.0};
};

HayesBound hayes_bound(double a, double b);

enum class Region {
  delay_independent_stable,
  mean_bound_stable,
  distribution_dependent,
  delay_independent_unstable
};

enum class DecidedBy { hayes_axioms, mean_bound, cs_sweep, rightmost_root };

struct StabilityVerdict {
  Region region{Region::distribution_dependent};
  DecidedBy decided_by{DecidedBy::hayes_axioms};
  /// Empty when the spectrum is marginal (|rightmost Re| < 1e-7).
  std::optional<bool> stable;
  std::string details;
  std::optional<double> critical_mean;
  std::optional<double> mean_delay;
  std::optional<double> rightmost_real;

  friend bool operator==(const StabilityVerdict&, const StabilityVerdict&) = default;
};

std::string to_string(Region r);
std::string to_string(DecidedBy d);
Region region_from_string(const std::string& s);
DecidedBy decided_by_from_string(const std::string& s);

/// Decision chain: a <= -b unstable; a >= |b|, a > -b stable; b > |a| and
/// E < E* stable; otherwise the C/S sweep on the b-normalized problem, then
/// the rightmost characteristic root.
StabilityVerdict classify(const CharacteristicProblem& p);

// ---------------------------------------------------------------------------
// C/S sweep

enum class SweepOutcome { certified_stable, inconclusive };

struct Crossing {
  double omega{0.0};
  double s{0.0};  // S(omega)
  friend bool operator==(const Crossing&, const Crossing&) = default;
};

struct SweepResult {
  SweepOutcome outcome{SweepOutcome::inconclusive};
  double omega_c{0.0};
  std::vector<Crossing> crossings;
  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

/// All omega in (0, omega_max] where C(omega) = level. Grid at
/// 1e-3 * omega_max; intervals without a sign change are refined until the
/// Lipschitz bound |C'| <= mean excludes a touch, sign changes are bisected
/// to 1e-10 and Newton polished.
std::vector<double> c_crossings(const DelayDistribution& d, double level, double omega_max);

/// Sufficient stability test for the normalized equation (b = 1):
/// stable if every omega in (0, sqrt(1 - a^2)] with C(omega) = -a has
/// S(omega) < omega - 1e-9. Requires a in (-1, 1).
SweepResult cs_sweep(double a, const DelayDistribution& d);

// ---------------------------------------------------------------------------
// Extremal two-delay construction

class InfeasibleExtremal : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// f* = (1 - p2) delta(tau) + p2 delta(tau - tau2), mean E, C*(omega_s) = -a.
struct ExtremalDistribution {
  double p2_star{1.0};
  double tau2_star{0.0};
  double omega_s{0.0};
  /// Further solutions of the defining equation in (omega_s tau2*, pi].
  std::vector<double> other_roots;

  DelayDistribution distribution() const;
  double s_value() const;  // S*(omega_s)
  double c_value() const;  // C*(omega_s)
  friend bool operator==(const ExtremalDistribution&, const ExtremalDistribution&) = default;
};

/// Throws std::invalid_argument when a, E or omega_s violate the
/// preconditions and InfeasibleExtremal when c < (1 + a) / (omega_s E) or
/// tau2* < E (then omega_s E >= theta_c and no density of mean E reaches -a).
ExtremalDistribution extremal_f_star(double a, double mean, double omega_s);

/// Two-atom chord family at fixed first atom u = omega_s tau_1.
struct ChordSolution {
  double u{0.0};
  double t{0.0};
  double v1{0.0};
  double s_value{0.0};          // S(u, v1)
  double p1{0.0};
  double p2{0.0};
  std::vector<double> roots;    // every solution v in (T, pi], ascending

  /// Atoms at u / omega_s and v1 / omega_s with weights p1, p2.
  DelayDistribution density(double omega_s) const;
  friend bool operator==(const ChordSolution&, const ChordSolution&) = default;
};

/// Smallest v > T with C(u, v) = -a, where
/// C(u, v) = (v - T)/(v - u) cos u + (T - u)/(v - u) cos v.
ChordSolution extremal_given_u(double a, double t, double u);

/// C(u, v) and S(u, v) of the chord family.
double chord_c(double t, double u, double v);
double chord_s(double t, double u, double v);

}  // namespace ddestab
