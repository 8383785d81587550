#include "ddestab/chart.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "ddestab/criteria.hpp"

namespace ddestab {

int chart_label(double a, double b, const DelayDistribution& d) {
  const HayesBound hb = hayes_bound(a, b);
  if (hb.kind == BoundKind::none) return 5;
  if (hb.kind == BoundKind::infinite) return 1;
  if (mean(d) < hb.value) return 2;
  const RootReport rep = rightmost_root(CharacteristicProblem(a, b, d));
  return rep.stability() == SpectralStability::stable ? 3 : 4;
}

namespace {

void check_job(const ChartJob& job) {
  for (double v : {job.a_min, job.a_max, job.b_min, job.b_max}) {
    if (!std::isfinite(v)) throw std::invalid_argument("chart: ranges must be finite");
  }
  if (!(job.a_max > job.a_min) || !(job.b_max > job.b_min)) {
    throw std::invalid_argument("chart: empty range");
  }
  if (job.na < 2 || job.nb < 2) throw std::invalid_argument("chart: resolution must be >= 2 per axis");
}

bool inside(const ChartJob& job, double a, double b) {
  return a >= job.a_min && a <= job.a_max && b >= job.b_min && b <= job.b_max;
}

// keeps the longest run of consecutive points inside the window
Polyline clipped(std::string name, const std::vector<std::pair<double, double>>& pts,
                 const ChartJob& job) {
  Polyline best{name, {}};
  Polyline cur{name, {}};
  for (const auto& p : pts) {
    if (inside(job, p.first, p.second)) {
      cur.points.push_back(p);
    } else {
      if (cur.points.size() > best.points.size()) best = cur;
      cur.points.clear();
    }
  }
  if (cur.points.size() > best.points.size()) best = cur;
  return best;
}

}  // namespace

std::vector<Polyline> chart_boundaries(const DelayDistribution& d, const ChartJob& job) {
  check_job(job);
  const double e = mean(d);
  constexpr int n = 800;
  std::vector<Polyline> out;

  // b = -a over the whole window, and b = a for a >= 0
  std::vector<std::pair<double, double>> diag;
  std::vector<std::pair<double, double>> upper;
  for (int k = 0; k <= n; ++k) {
    const double a = job.a_min + (job.a_max - job.a_min) * k / n;
    diag.emplace_back(a, -a);
    if (a >= 0.0) upper.emplace_back(a, a);
  }
  out.push_back(clipped("b_eq_minus_a", diag, job));
  out.push_back(clipped("b_eq_a", upper, job));
  if (!(e > 0.0)) return out;

  // single-delay boundary, phi in (0, pi)
  std::vector<std::pair<double, double>> hayes{{-1.0 / e, 1.0 / e}};
  for (int k = 1; k < 4 * n; ++k) {
    const double phi = std::numbers::pi * k / (4 * n);
    hayes.emplace_back(-phi * std::cos(phi) / (e * std::sin(phi)), phi / (e * std::sin(phi)));
  }
  out.push_back(clipped("single_delay_boundary", hayes, job));

  // D(i w) = 0 with b > 0: b = w / S(w), a = -w C(w) / S(w), from w -> 0
  std::vector<std::pair<double, double>> dist{{-1.0 / e, 1.0 / e}};
  const double w_max = 2.0 * std::max({std::abs(job.a_max), std::abs(job.a_min), job.b_max, 1.0});
  for (int k = 1; k <= 4 * n; ++k) {
    const double w = w_max * k / (4 * n);
    const auto cs = cs_moments(d, w);
    if (!(cs.s > 0.0)) break;
    dist.emplace_back(-w * cs.c / cs.s, w / cs.s);
  }
  out.push_back(clipped("distribution_boundary", dist, job));
  return out;
}

ChartResult compute_chart(const DelayDistribution& d, const ChartJob& job) {
  check_job(job);
  ChartResult res;
  res.mean = mean(d);
  for (int i = 0; i < job.na; ++i) res.a_values.push_back(job.a_min + (job.a_max - job.a_min) * i / (job.na - 1));
  for (int j = 0; j < job.nb; ++j) res.b_values.push_back(job.b_min + (job.b_max - job.b_min) * j / (job.nb - 1));
  const std::size_t total = static_cast<std::size_t>(job.na) * static_cast<std::size_t>(job.nb);
  res.labels.assign(total, 0);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t idx = next++; idx < total && !failed; idx = next++) {
      try {
        const std::size_t i = idx % res.a_values.size();
        const std::size_t j = idx / res.a_values.size();
        res.labels[idx] = chart_label(res.a_values[i], res.b_values[j], d);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  unsigned nthreads = job.threads > 0 ? static_cast<unsigned>(job.threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  nthreads = static_cast<unsigned>(std::min<std::size_t>(nthreads, total));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  res.boundaries = chart_boundaries(d, job);
  if (res.mean > 0.0) res.intersection = {-1.0 / res.mean, 1.0 / res.mean};
  return res;
}

std::string chart_csv(const ChartResult& c) {
  std::string out = "a,b,label\n";
  char buf[96];
  for (std::size_t j = 0; j < c.b_values.size(); ++j) {
    for (std::size_t i = 0; i < c.a_values.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.10g,%.10g,%d\n", c.a_values[i], c.b_values[j], c.label(i, j));
      out += buf;
    }
  }
  return out;
}

}  // namespace ddestab
