#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ddestab/chart.hpp"
#include "ddestab/criteria.hpp"
#include "ddestab/distributions.hpp"
#include "ddestab/hemato.hpp"
#include "ddestab/spectrum.hpp"

namespace ddestab {

/// Malformed or schema-violating JSON input.
class JsonError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::string read_text_file(const std::string& path);

// {"type":"discrete","atoms":[[p,tau],...],"scale":rho}
// {"type":"gamma_mixture","components":[[p,q,beta],...],"scale":rho}
// "scale" defaults to 1.
std::string to_json(const DelayDistribution& d);
DelayDistribution distribution_from_json(const std::string& text);

/// "single:X", inline JSON, or the path of a JSON file.
DelayDistribution parse_distribution_arg(const std::string& arg);

std::string to_json(const RootReport& r);
RootReport root_report_from_json(const std::string& text);

std::string to_json(const StabilityVerdict& v);
StabilityVerdict verdict_from_json(const std::string& text);

std::string to_json(const SweepResult& s);
SweepResult sweep_result_from_json(const std::string& text);

/// Output of the extremal command: f* for (a, E, omega_s) and, when u is
/// given, the chord solution at u.
struct ExtremalReport {
  double a{0.0};
  double mean{0.0};
  double omega_s{0.0};
  std::optional<ExtremalDistribution> f_star;
  std::string f_star_error;
  std::optional<ChordSolution> chord;
  friend bool operator==(const ExtremalReport&, const ExtremalReport&) = default;
};

std::string to_json(const ExtremalReport& r);
ExtremalReport extremal_report_from_json(const std::string& text);

// {"alpha","k0","r","h","lineages":[[p,q,beta],...]}
std::string to_json(const HematoModel& m);
HematoModel hemato_model_from_json(const std::string& text);

/// Model file with optional named (r, h) presets under "points".
struct HematoConfig {
  HematoModel model;
  std::vector<std::pair<std::string, std::pair<double, double>>> points;

  /// The base model with r and h of the named point.
  HematoModel at(const std::string& name) const;
  friend bool operator==(const HematoConfig&, const HematoConfig&) = default;
};

std::string to_json(const HematoConfig& c);
HematoConfig hemato_config_from_json(const std::string& text);

std::string to_json(const std::vector<SteadyStateVerdict>& v);
std::vector<SteadyStateVerdict> steady_verdicts_from_json(const std::string& text);

std::string to_json(const ChartResult& c);
ChartResult chart_from_json(const std::string& text);

}  // namespace ddestab
