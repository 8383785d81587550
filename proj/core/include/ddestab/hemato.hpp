#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ddestab/criteria.hpp"
#include "ddestab/distributions.hpp"
#include "ddestab/simulator.hpp"

namespace ddestab {

/// One hematopoietic lineage: weight p_i, chain length q_i, rate beta_i.
struct Lineage {
  double weight{1.0};
  int length{1};
  double rate{1.0};
  friend bool operator==(const Lineage&, const Lineage&) = default;
};

/// x' = k0 x^r / (1 + z^h) - alpha x, z = sum p_i z_i, each z_i the output
/// of a linear chain of q_i compartments with rate beta_i fed by x.
struct HematoModel {
  double alpha{1.0};
  double k0{2.0};
  double r{1.0};
  double h{2.0};
  std::vector<Lineage> lineages;

  /// Throws std::invalid_argument unless alpha, k0 > 0, 0 <= r <= h, h > 1,
  /// 1 to 3 lineages with weights summing to 1.
  void validate() const;
  double production(double x, double z) const;
  GammaMixture mixture() const;
  double mean_delay() const;

  friend bool operator==(const HematoModel&, const HematoModel&) = default;
};

enum class SteadyBranch { zero, unique, smaller, larger, coincident };
std::string to_string(SteadyBranch b);

struct SteadyState {
  double value{0.0};
  SteadyBranch branch{SteadyBranch::zero};
  friend bool operator==(const SteadyState&, const SteadyState&) = default;
};

/// Zero (when it is one) followed by the positive steady states in
/// increasing order. For r = 0 the origin is not an equilibrium, production
/// there being k0 / (1 + z^h) > 0.
std::vector<SteadyState> hemato_steady_states(const HematoModel& m);

/// |P(x, x) - alpha x|
double steady_residual(const HematoModel& m, double x);

struct Linearization {
  double a{0.0};
  double b{0.0};
  friend bool operator==(const Linearization&, const Linearization&) = default;
};

/// a = alpha (1 - r), b = alpha^2 h x^(h - r + 1) / k0 at a positive steady
/// state. Throws std::invalid_argument when the residual exceeds 1e-8.
Linearization hemato_linearize(const HematoModel& m, double xbar);

/// k0 pi / (2 alpha h (k0 - alpha)) for r = 1 and k0 > alpha: the mean
/// delay below which the positive steady state is stable for any kernel.
std::optional<double> hemato_mean_bound(const HematoModel& m);

struct SteadyStateVerdict {
  SteadyState state;
  std::optional<Linearization> linearization;
  std::optional<StabilityVerdict> distributed;       // lineage mixture
  std::optional<StabilityVerdict> discrete_at_mean;  // single delay E_p
  std::optional<bool> stable;                        // distributed model
  std::string basis;
  friend bool operator==(const SteadyStateVerdict&, const SteadyStateVerdict&) = default;
};

std::vector<SteadyStateVerdict> hemato_verdict(const HematoModel& m);

enum class DelayMode { distributed_chain, discrete_at_mean };
std::string to_string(DelayMode m);
DelayMode delay_mode_from_string(const std::string& s);

/// Largest admissible step, 1e-3 min(1 / beta_i, E_p / 20).
double hemato_max_step(const HematoModel& m);

/// Integrates the full chain system (distributed_chain) or the single-delay
/// equation with z(t) = x(t - E_p) (discrete_at_mean). Columns x and z.
/// Negative states are reset to 0 and counted; persistent clipping throws
/// SimulationError.
Trace simulate_hemato(const HematoModel& m, const HistorySpec& hist, double t_end, double dt,
                      DelayMode mode, const SimOptions& opts = {});

}  // namespace ddestab
