#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ddestab/distributions.hpp"

namespace ddestab {

/// Region labels of the (a, b) stability chart:
/// 1 delay-independent stable, 2 stable through the mean bound,
/// 3 distribution-dependent stable, 4 distribution-dependent not stable
/// (including marginal), 5 unstable for every distribution (a <= -b).
int chart_label(double a, double b, const DelayDistribution& d);

struct ChartJob {
  double a_min{-2.0};
  double a_max{2.0};
  double b_min{-1.0};
  double b_max{3.0};
  int na{41};
  int nb{41};
  int threads{0};  // 0: hardware concurrency
};

struct Polyline {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (a, b)
  friend bool operator==(const Polyline&, const Polyline&) = default;
};

struct ChartResult {
  double mean{0.0};
  std::vector<double> a_values;
  std::vector<double> b_values;
  /// labels[j * na + i] at (a_values[i], b_values[j])
  std::vector<int> labels;
  std::vector<Polyline> boundaries;
  std::pair<double, double> intersection{0.0, 0.0};

  int label(std::size_t i, std::size_t j) const { return labels[j * a_values.size() + i]; }
  friend bool operator==(const ChartResult&, const ChartResult&) = default;
};

/// Analytic boundaries for mean E clipped to the job window: b = -a, a = |b|,
/// the single-delay curve b = phi / (E sin phi), a = -phi cos phi / (E sin phi),
/// and the crossing curve b = w / S(w), a = -w C(w) / S(w) of `d`.
std::vector<Polyline> chart_boundaries(const DelayDistribution& d, const ChartJob& job);

/// Labels every grid point (concurrently, stored in row-major order) and
/// attaches the boundaries and the intersection point (-1/E, 1/E).
ChartResult compute_chart(const DelayDistribution& d, const ChartJob& job);

/// a,b,label rows.
std::string chart_csv(const ChartResult& c);

}  // namespace ddestab
