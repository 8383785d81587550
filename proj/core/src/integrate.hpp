#pragma once

// Fixed-step RK4 engines shared by the linear and the hematopoiesis models.
// Not installed.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ddestab/distributions.hpp"
#include "ddestab/simulator.hpp"

namespace ddestab::detail {

struct EngineStatus {
  bool truncated{false};
  std::string note;
  long clipped{0};
};

struct EngineConfig {
  double t_end{0.0};
  double dt{0.0};
  bool clip{false};          // reset negative states to 0
  bool renormalize{false};   // linear problems only
  double overflow{1e150};
};

inline long step_count(double t_end, double dt) {
  return static_cast<long>(std::ceil(t_end / dt - 1e-9));
}

// Persistent clipping means the step is too coarse for a positive system.
inline void check_clipping(long clipped, long steps) {
  if (clipped > std::max<long>(1000, steps / 100)) {
    throw SimulationError("positivity clipping on " + std::to_string(clipped) +
                          " steps; reduce dt");
  }
}

// Method of steps for x' = f(x, z), z(t) = sum_i w_i x(t - tau_i).
// Delays must be 0 or at least one step long. observe(n, t, x, z, log_scale)
// sees every grid point, the true solution being x * exp(log_scale).
template <class F, class Observe>
EngineStatus method_of_steps(F&& f, std::span<const Atom> atoms, const HistorySpec& hist,
                             const EngineConfig& cfg, Observe&& observe) {
  const double dt = cfg.dt;
  const long steps = step_count(cfg.t_end, dt);
  double tau_max = 0.0;
  for (const auto& a : atoms) tau_max = std::max(tau_max, a.delay);
  const long cap = static_cast<long>(std::ceil(tau_max / dt)) + 4;
  std::vector<double> xs(static_cast<std::size_t>(cap)), fs(static_cast<std::size_t>(cap));
  std::vector<double> lag(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) lag[i] = atoms[i].delay / dt;

  double hist_scale = 1.0;
  double log_scale = 0.0;
  EngineStatus status;

  auto slot = [cap](long k) { return static_cast<std::size_t>(k % cap); };

  // delayed combination at t_n + c dt for stage value x_stage
  auto delayed = [&](long n, double c, double x_stage) {
    double z = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const double w = atoms[i].weight;
      if (atoms[i].delay == 0.0) {
        z += w * x_stage;
        continue;
      }
      const double u = static_cast<double>(n) + c - lag[i];
      if (u <= 0.0) {
        z += w * hist_scale * hist.value(u * dt);
        continue;
      }
      const long k = static_cast<long>(std::floor(u));
      const double th = u - static_cast<double>(k);
      const double x0 = xs[slot(k)];
      if (th == 0.0) {
        z += w * x0;
        continue;
      }
      const double x1 = xs[slot(k + 1)];
      const double f0 = fs[slot(k)] * dt;
      const double f1 = fs[slot(k + 1)] * dt;
      const double th2 = th * th;
      const double th3 = th2 * th;
      z += w * ((2 * th3 - 3 * th2 + 1) * x0 + (th3 - 2 * th2 + th) * f0 +
                (-2 * th3 + 3 * th2) * x1 + (th3 - th2) * f1);
    }
    return z;
  };

  auto rescale = [&](double factor) {
    for (auto& v : xs) v *= factor;
    for (auto& v : fs) v *= factor;
    hist_scale *= factor;
    log_scale -= std::log(factor);
  };

  double x = hist.value(0.0);
  xs[slot(0)] = x;
  for (long n = 0;; ++n) {
    const double t = static_cast<double>(n) * dt;
    const double zn = delayed(n, 0.0, x);
    const double k1 = f(x, zn);
    fs[slot(n)] = k1;
    observe(n, t, x, zn, log_scale);
    if (n == steps) break;

    const double x2 = x + 0.5 * dt * k1;
    const double k2 = f(x2, delayed(n, 0.5, x2));
    const double x3 = x + 0.5 * dt * k2;
    const double k3 = f(x3, delayed(n, 0.5, x3));
    const double x4 = x + dt * k3;
    const double k4 = f(x4, delayed(n, 1.0, x4));
    double next = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (cfg.clip && next < 0.0) {
      next = 0.0;
      ++status.clipped;
      check_clipping(status.clipped, steps);
    }
    if (!std::isfinite(next) || std::abs(next) > cfg.overflow) {
      status.truncated = true;
      status.note = "overflow at t = " + std::to_string(t + dt);
      break;
    }
    xs[slot(n + 1)] = next;
    x = next;

    if (cfg.renormalize) {
      if (std::abs(x) > 1e100) {
        rescale(1e-100);
        x = xs[slot(n + 1)];
      } else if ((n + 1) % 1024 == 0) {
        double peak = 0.0;
        for (double v : xs) peak = std::max(peak, std::abs(v));
        if (peak < 1e-100 && peak > 0.0) {
          rescale(1e100);
          x = xs[slot(n + 1)];
        }
      }
    }
  }
  return status;
}

// One lineage of the chain: `length` compartments with rate `rate`, the
// last one being z_i.
struct ChainBlock {
  double weight{0.0};
  int length{1};
  double rate{1.0};
};

// x' = f(x, z), z = sum_i w_i z_i, each z_i the end of a linear chain
// fed by x. y0 is the full initial state [x, y_1^(1..q_1), ...].
// observe(n, t, y, z, log_scale).
template <class F, class Observe>
EngineStatus chain_rk4(F&& f, std::span<const ChainBlock> blocks, std::vector<double> y,
                       const EngineConfig& cfg, Observe&& observe) {
  const double dt = cfg.dt;
  const long steps = step_count(cfg.t_end, dt);
  const std::size_t dim = y.size();
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  double log_scale = 0.0;
  EngineStatus status;

  auto z_of = [&](const std::vector<double>& s) {
    double z = 0.0;
    std::size_t pos = 0;
    for (const auto& b : blocks) {
      pos += static_cast<std::size_t>(b.length);
      z += b.weight * s[pos];
    }
    return z;
  };
  auto rhs = [&](const std::vector<double>& s, std::vector<double>& out) {
    out[0] = f(s[0], z_of(s));
    std::size_t pos = 1;
    for (const auto& b : blocks) {
      double prev = s[0];
      for (int j = 0; j < b.length; ++j, ++pos) {
        out[pos] = b.rate * (prev - s[pos]);
        prev = s[pos];
      }
    }
  };

  for (long n = 0;; ++n) {
    const double t = static_cast<double>(n) * dt;
    observe(n, t, y, z_of(y), log_scale);
    if (n == steps) break;

    rhs(y, k1);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    rhs(tmp, k3);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + dt * k3[i];
    rhs(tmp, k4);
    double peak = 0.0;
    bool clipped = false;
    for (std::size_t i = 0; i < dim; ++i) {
      double v = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (cfg.clip && v < 0.0) {
        v = 0.0;
        clipped = true;
      }
      y[i] = v;
      peak = std::max(peak, std::abs(v));
    }
    if (clipped) {
      ++status.clipped;
      check_clipping(status.clipped, steps);
    }
    if (!std::isfinite(peak) || peak > cfg.overflow) {
      status.truncated = true;
      status.note = "overflow at t = " + std::to_string(t + dt);
      break;
    }
    if (cfg.renormalize && (peak > 1e100 || (peak < 1e-100 && peak > 0.0))) {
      const double factor = peak > 1e100 ? 1e-100 : 1e100;
      for (auto& v : y) v *= factor;
      log_scale -= std::log(factor);
    }
  }
  return status;
}

// Initial chain state: y_i^(j)(0) = integral phi(-tau) Gamma(tau; j, rate_i) dtau.
std::vector<double> chain_initial_state(std::span<const ChainBlock> blocks,
                                        const HistorySpec& hist);

}  // namespace ddestab::detail
