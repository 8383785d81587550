#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ddestab/spectrum.hpp"

namespace ddestab {

/// Initial function x(t) = phi(t) for t <= 0.
class HistorySpec {
 public:
  enum class Kind { constant, sampled };

  HistorySpec() = default;
  static HistorySpec constant(double value);
  /// Samples on [times.front(), 0]; times strictly increasing and ending at 0.
  /// Interpolated by cubic Hermite splines, held constant before the first sample.
  static HistorySpec sampled(std::vector<double> times, std::vector<double> values);

  Kind kind() const { return kind_; }
  double value(double t) const;
  double slope(double t) const;
  /// Length of the sampled window, 0 for a constant history.
  double horizon() const;
  bool positive() const;
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

 private:
  Kind kind_{Kind::constant};
  double constant_{1.0};
  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

/// Uniformly sampled solution. values[c][k] is column c at times[k]; column
/// 0 is always x.
struct Trace {
  std::vector<std::string> columns;
  std::vector<double> times;
  std::vector<std::vector<double>> values;
  double dt{0.0};         // integration step
  double sample_dt{0.0};  // spacing of the stored rows
  std::string scheme;
  bool truncated{false};  // stopped early on overflow
  std::string note;
  long clipped_steps{0};  // steps where a negative state was reset to 0

  const std::vector<double>& x() const { return values.front(); }
  std::size_t rows() const { return times.size(); }
};

void write_csv(const Trace& trace, std::ostream& os);

struct SimOptions {
  int stride{1};               // keep every stride-th step
  bool record_chain{false};    // add the z_i columns for mixtures
  double overflow{1e150};
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrates x' = -a x - b * integral x(t - tau) d eta(tau) with the
/// classical fourth-order Runge-Kutta scheme. Discrete atoms go through the
/// method of steps with cubic Hermite interpolation of the stored solution;
/// Gamma mixtures through the equivalent linear chain ODE of dimension
/// 1 + sum q_i. Throws std::invalid_argument when dt exceeds
/// min(0.01, min positive delay / 20) for atoms, or the explicit stability
/// limit 1 / max(beta_i / rho) for mixtures.
Trace simulate_linear(const CharacteristicProblem& p, const HistorySpec& hist, double t_end,
                      double dt, const SimOptions& opts = {});

/// Step size simulate_linear uses when none is supplied.
double default_step(const CharacteristicProblem& p);

struct GrowthEstimate {
  double rate{0.0};  // slope of log max |x| between two late windows
  double t_end{0.0};
  double dt{0.0};
};

/// Exponential growth rate of the solution from `hist`, estimated from the
/// log envelope over [t_end/4, t_end/2] and [3 t_end/4, t_end]. The state is
/// renormalized internally, so neither overflow nor underflow occurs.
GrowthEstimate estimate_growth_rate(const CharacteristicProblem& p, const HistorySpec& hist,
                                    double t_end = 4000.0, double dt = 0.0);

enum class TailBehavior { converged, oscillatory, undecided, diverged };
std::string to_string(TailBehavior b);

struct TailSummary {
  TailBehavior behavior{TailBehavior::undecided};
  double peak_to_peak{0.0};  // over the last quarter
  double final_value{0.0};
  double tail_mean{0.0};
};

/// Peak-to-peak of column `column` over the last 25% of the trace:
/// > 1e-2 oscillatory, < 1e-4 converged, otherwise undecided.
TailSummary classify_tail(const Trace& trace, std::size_t column = 0);

struct SettledRun {
  Trace trace;
  TailSummary tail;
};

/// Runs `simulate(t_end)`, doubling t_end while the tail is undecided and
/// t_end <= t_max.
SettledRun run_until_decided(const std::function<Trace(double)>& simulate, double t_end,
                             double t_max);

}  // namespace ddestab
