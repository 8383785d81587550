#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddestab/contour.hpp"
#include "ddestab/distributions.hpp"

namespace ddestab {

/// |rightmost Re| below this is reported as marginal.
inline constexpr double kStabilityMargin = 1e-7;

/// x' = -a x - b * integral x(t - tau) d eta(tau)
struct CharacteristicProblem {
  double a{0.0};
  double b{0.0};
  DelayDistribution dist;

  CharacteristicProblem(double a_, double b_, DelayDistribution d);
  double mean_delay() const { return mean(dist); }
};

enum class RootMethod { polynomial, quasi_argument_principle, explicit_formula };
enum class SpectralStability { stable, marginal, unstable };

std::string to_string(RootMethod m);
std::string to_string(SpectralStability s);

struct CharRoot {
  std::complex<double> value;
  /// |D(lambda)| / max(1, |b|)
  double residual{0.0};
  friend bool operator==(const CharRoot&, const CharRoot&) = default;
};

struct RootReport {
  std::vector<CharRoot> roots;  // sorted by decreasing real part
  double rightmost_real{0.0};
  RootMethod method{RootMethod::explicit_formula};
  Rect search_box;
  /// Zeros counted inside search_box; equals roots.size().
  int winding_count{0};

  SpectralStability stability(double margin = kStabilityMargin) const;
  const CharRoot& rightmost() const { return roots.front(); }
  friend bool operator==(const RootReport&, const RootReport&) = default;
};

/// Root finder gave up (subdivision depth, contour failures, no roots).
class RootFindingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// D(lambda) = lambda + a + b * L[eta](lambda)
std::complex<double> char_eval(const CharacteristicProblem& p, std::complex<double> lambda);
std::complex<double> char_derivative(const CharacteristicProblem& p, std::complex<double> lambda);

/// Monic coefficients (descending) of the chain-trick polynomial
/// (l + a) prod_i (l + k_i)^{q_i} + b sum_i p_i k_i^{q_i} prod_{j != i} (l + k_j)^{q_j},
/// k_i = beta_i / rho, whose roots are exactly the characteristic roots of
/// a Gamma-mixture problem. Throws std::invalid_argument for discrete or
/// zero-scale distributions.
std::vector<double> chain_polynomial(const CharacteristicProblem& p);

struct DiscreteSearchOptions {
  /// Initial half-height of the search box; grown when needed to certify
  /// that no root outside the box lies right of the reported rightmost one.
  std::optional<double> box_height;
  int max_depth{48};
};

/// Rightmost characteristic roots of a discrete-delay problem by
/// argument-principle counting on strips swept right to left from the a
/// priori bound Re <= |a| + |b|, recursive isolation and Newton refinement.
RootReport rightmost_root_discrete(const CharacteristicProblem& p,
                                   const DiscreteSearchOptions& opts = {});

/// Dispatches on the distribution: closed form for zero scale (or all
/// delays at zero), chain polynomial for mixtures, argument principle for
/// atoms.
RootReport rightmost_root(const CharacteristicProblem& p);

}  // namespace ddestab
