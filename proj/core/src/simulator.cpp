#include "ddestab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "integrate.hpp"

namespace ddestab {

// ---------------------------------------------------------------------------
// History

HistorySpec HistorySpec::constant(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("history: non-finite constant");
  HistorySpec h;
  h.kind_ = Kind::constant;
  h.constant_ = value;
  return h;
}

HistorySpec HistorySpec::sampled(std::vector<double> times, std::vector<double> values) {
  if (times.size() != values.size() || times.size() < 2) {
    throw std::invalid_argument("history: need at least two (t, x) samples of equal count");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
      throw std::invalid_argument("history: non-finite sample");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument("history: sample times must be strictly increasing");
    }
  }
  if (std::abs(times.back()) > 1e-12) throw std::invalid_argument("history: last sample must be at t = 0");
  times.back() = 0.0;

  HistorySpec h;
  h.kind_ = Kind::sampled;
  const std::size_t n = times.size();
  h.slopes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      h.slopes_[i] = (values[1] - values[0]) / (times[1] - times[0]);
    } else if (i + 1 == n) {
      h.slopes_[i] = (values[i] - values[i - 1]) / (times[i] - times[i - 1]);
    } else {
      // three-point derivative on a nonuniform grid
      const double hl = times[i] - times[i - 1];
      const double hr = times[i + 1] - times[i];
      const double dl = (values[i] - values[i - 1]) / hl;
      const double dr = (values[i + 1] - values[i]) / hr;
      h.slopes_[i] = (hr * dl + hl * dr) / (hl + hr);
    }
  }
  h.times_ = std::move(times);
  h.values_ = std::move(values);
  return h;
}

namespace {

// index k with times[k] <= t < times[k+1]
std::size_t bracket(const std::vector<double>& times, double t) {
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times.begin());
  return std::min(k == 0 ? 0 : k - 1, times.size() - 2);
}

}  // namespace

double HistorySpec::value(double t) const {
  if (kind_ == Kind::constant) return constant_;
  if (t <= times_.front()) return values_.front();
  if (t >= 0.0) return values_.back();
  const std::size_t k = bracket(times_, t);
  const double h = times_[k + 1] - times_[k];
  const double s = (t - times_[k]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * values_[k] + (s3 - 2 * s2 + s) * h * slopes_[k] +
         (-2 * s3 + 3 * s2) * values_[k + 1] + (s3 - s2) * h * slopes_[k + 1];
}

double HistorySpec::slope(double t) const {
  if (kind_ == Kind::constant || t < times_.front()) return 0.0;
  if (t >= 0.0) return slopes_.back();
  const std::size_t k = bracket(times_, t);
  const double h = times_[k + 1] - times_[k];
  const double s = (t - times_[k]) / h;
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * values_[k] + (-6 * s2 + 6 * s) * values_[k + 1]) / h +
         (3 * s2 - 4 * s + 1) * slopes_[k] + (3 * s2 - 2 * s) * slopes_[k + 1];
}

double HistorySpec::horizon() const {
  return kind_ == Kind::constant ? 0.0 : -times_.front();
}

bool HistorySpec::positive() const {
  if (kind_ == Kind::constant) return constant_ > 0.0;
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
}

// ---------------------------------------------------------------------------
// Chain initial values

namespace detail {

namespace {

// upper regularized incomplete gamma Q(j, x) for integer j
double gamma_tail(int j, double x) {
  if (x <= 0.0) return 1.0;
  double sum = 0.0;
  const double lx = std::log(x);
  for (int m = 0; m < j; ++m) {
    sum += std::exp(m * lx - x - std::lgamma(m + 1.0));
  }
  return std::min(1.0, sum);
}

}  // namespace

std::vector<double> chain_initial_state(std::span<const ChainBlock> blocks,
                                        const HistorySpec& hist) {
  std::size_t dim = 1;
  for (const auto& b : blocks) dim += static_cast<std::size_t>(b.length);
  std::vector<double> y(dim, hist.value(0.0));
  if (hist.kind() == HistorySpec::Kind::constant) return y;

  const double horizon = hist.horizon();
  const double before = hist.value(-horizon);
  std::size_t pos = 1;
  for (const auto& b : blocks) {
    for (int j = 1; j <= b.length; ++j, ++pos) {
      // composite Simpson over the sampled window, held value beyond it
      const double width = std::sqrt(static_cast<double>(j)) / b.rate;
      long n = static_cast<long>(std::ceil(50.0 * horizon / width));
      n = std::clamp<long>(n, 2000, 2000000);
      if (n % 2) ++n;
      const double h = horizon / static_cast<double>(n);
      double acc = 0.0;
      for (long i = 0; i <= n; ++i) {
        const double tau = h * static_cast<double>(i);
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * hist.value(-tau) * gamma_density(j, b.rate, tau);
      }
      y[pos] = acc * h / 3.0 + before * gamma_tail(j, b.rate * horizon);
    }
  }
  return y;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Linear equation

namespace {

constexpr double kStepSlack = 1e-12;

void check_run(double t_end, double dt) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be finite and > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be finite and > 0");
}

std::vector<Atom> effective_atoms(const DelayDistribution& d) {
  if (d.is_heaviside()) return {{1.0, 0.0}};
  std::vector<Atom> out;
  for (const auto& a : d.atoms().atoms()) out.push_back({a.weight, a.delay * d.scale()});
  return out;
}

std::vector<detail::ChainBlock> chain_blocks(const GammaMixture& m, double rho) {
  std::vector<detail::ChainBlock> out;
  for (const auto& c : m.components()) out.push_back({c.weight, c.kernel.shape, c.kernel.rate / rho});
  return out;
}

double discrete_step_limit(const std::vector<Atom>& atoms) {
  double lim = 0.01;
  for (const auto& a : atoms) {
    if (a.delay > 0.0) lim = std::min(lim, a.delay / 20.0);
  }
  return lim;
}

bool uses_chain(const DelayDistribution& d) { return d.is_mixture() && !d.is_heaviside(); }

}  // namespace

double default_step(const CharacteristicProblem& p) {
  if (uses_chain(p.dist)) {
    const double kmax = p.dist.mixture().max_rate() / p.dist.scale();
    return std::min(0.01, 0.25 / kmax);
  }
  return discrete_step_limit(effective_atoms(p.dist));
}

Trace simulate_linear(const CharacteristicProblem& p, const HistorySpec& hist, double t_end,
                      double dt, const SimOptions& opts) {
  check_run(t_end, dt);
  if (opts.stride < 1) throw std::invalid_argument("stride must be >= 1");
  const double a = p.a;
  const double b = p.b;

  Trace tr;
  tr.dt = dt;
  tr.sample_dt = dt * opts.stride;
  tr.columns = {"x"};

  detail::EngineConfig cfg;
  cfg.t_end = t_end;
  cfg.dt = dt;
  cfg.overflow = opts.overflow;
  const auto linear = [a, b](double x, double z) { return -a * x - b * z; };

  if (uses_chain(p.dist)) {
    const auto blocks = chain_blocks(p.dist.mixture(), p.dist.scale());
    double kmax = 0.0;
    for (const auto& bl : blocks) kmax = std::max(kmax, bl.rate);
    if (dt * kmax > 1.0 + kStepSlack) {
      throw std::invalid_argument("dt too large: need dt <= rho / max beta_i = " +
                                  std::to_string(1.0 / kmax));
    }
    tr.scheme = "rk4-linear-chain";
    if (opts.record_chain) {
      for (std::size_t i = 0; i < blocks.size(); ++i) tr.columns.push_back("z" + std::to_string(i + 1));
    }
    tr.values.resize(tr.columns.size());
    const auto st = detail::chain_rk4(
        linear, blocks, detail::chain_initial_state(blocks, hist), cfg,
        [&](long n, double t, const std::vector<double>& y, double, double) {
          if (n % opts.stride) return;
          tr.times.push_back(t);
          tr.values[0].push_back(y[0]);
          if (opts.record_chain) {
            std::size_t pos = 0;
            for (std::size_t i = 0; i < blocks.size(); ++i) {
              pos += static_cast<std::size_t>(blocks[i].length);
              tr.values[i + 1].push_back(y[pos]);
            }
          }
        });
    tr.truncated = st.truncated;
    tr.note = st.note;
    return tr;
  }

  const auto atoms = effective_atoms(p.dist);
  const double lim = discrete_step_limit(atoms);
  if (dt > lim * (1.0 + kStepSlack)) {
    throw std::invalid_argument("dt too large: need dt <= min(0.01, min delay / 20) = " +
                                std::to_string(lim));
  }
  const double tau_max = atoms.back().delay;
  if (hist.kind() == HistorySpec::Kind::sampled && hist.horizon() < tau_max * (1.0 - kStepSlack)) {
    throw std::invalid_argument("history samples do not cover the maximal delay");
  }
  tr.scheme = "rk4-method-of-steps-hermite";
  tr.values.resize(1);
  const auto st = detail::method_of_steps(linear, atoms, hist, cfg,
                                          [&](long n, double t, double x, double, double) {
                                            if (n % opts.stride) return;
                                            tr.times.push_back(t);
                                            tr.values[0].push_back(x);
                                          });
  tr.truncated = st.truncated;
  tr.note = st.note;
  return tr;
}

GrowthEstimate estimate_growth_rate(const CharacteristicProblem& p, const HistorySpec& hist,
                                    double t_end, double dt) {
  if (dt == 0.0) dt = default_step(p);
  check_run(t_end, dt);
  const double a = p.a;
  const double b = p.b;
  const auto linear = [a, b](double x, double z) { return -a * x - b * z; };

  detail::EngineConfig cfg;
  cfg.t_end = t_end;
  cfg.dt = dt;
  cfg.renormalize = true;
  cfg.overflow = std::numeric_limits<double>::max();

  const double ninf = -std::numeric_limits<double>::infinity();
  double m1 = ninf;
  double m2 = ninf;
  auto track = [&](double t, double x, double log_scale) {
    if (x == 0.0) return;
    const double l = std::log(std::abs(x)) + log_scale;
    if (t >= 0.25 * t_end && t <= 0.5 * t_end) m1 = std::max(m1, l);
    if (t >= 0.75 * t_end) m2 = std::max(m2, l);
  };

  detail::EngineStatus st;
  if (uses_chain(p.dist)) {
    const auto blocks = chain_blocks(p.dist.mixture(), p.dist.scale());
    st = detail::chain_rk4(linear, blocks, detail::chain_initial_state(blocks, hist), cfg,
                           [&](long, double t, const std::vector<double>& y, double, double ls) {
                             track(t, y[0], ls);
                           });
  } else {
    const auto atoms = effective_atoms(p.dist);
    if (dt > discrete_step_limit(atoms) * (1.0 + kStepSlack)) {
      throw std::invalid_argument("dt too large for the smallest delay");
    }
    st = detail::method_of_steps(linear, atoms, hist, cfg,
                                 [&](long, double t, double x, double, double ls) { track(t, x, ls); });
  }
  if (st.truncated) throw SimulationError("growth estimate: " + st.note);
  GrowthEstimate g;
  g.t_end = t_end;
  g.dt = dt;
  g.rate = (m1 == ninf || m2 == ninf) ? ninf : (m2 - m1) / (0.5 * t_end);
  return g;
}

// ---------------------------------------------------------------------------
// Trace utilities

void write_csv(const Trace& trace, std::ostream& os) {
  os << "t";
  for (const auto& c : trace.columns) os << ',' << c;
  os << '\n';
  char buf[40];
  for (std::size_t k = 0; k < trace.rows(); ++k) {
    std::snprintf(buf, sizeof buf, "%.10g", trace.times[k]);
    os << buf;
    for (const auto& col : trace.values) {
      std::snprintf(buf, sizeof buf, "%.12g", col[k]);
      os << ',' << buf;
    }
    os << '\n';
  }
}

std::string to_string(TailBehavior b) {
  switch (b) {
    case TailBehavior::converged: return "converged";
    case TailBehavior::oscillatory: return "oscillatory";
    case TailBehavior::undecided: return "undecided";
    case TailBehavior::diverged: return "diverged";
  }
  return "unknown";
}

TailSummary classify_tail(const Trace& trace, std::size_t column) {
  TailSummary s;
  if (trace.rows() == 0 || column >= trace.values.size()) {
    throw std::invalid_argument("classify_tail: empty trace or bad column");
  }
  const auto& v = trace.values[column];
  s.final_value = v.back();
  if (trace.truncated) {
    s.behavior = TailBehavior::diverged;
    s.peak_to_peak = std::numeric_limits<double>::infinity();
    return s;
  }
  const double t0 = trace.times.front();
  const double t1 = trace.times.back();
  const double from = t1 - 0.25 * (t1 - t0);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (trace.times[k] < from) continue;
    lo = std::min(lo, v[k]);
    hi = std::max(hi, v[k]);
    sum += v[k];
    ++count;
  }
  s.peak_to_peak = hi - lo;
  s.tail_mean = sum / static_cast<double>(count);
  if (!std::isfinite(s.peak_to_peak)) {
    s.behavior = TailBehavior::diverged;
  } else if (s.peak_to_peak > 1e-2) {
    s.behavior = TailBehavior::oscillatory;
  } else if (s.peak_to_peak < 1e-4) {
    s.behavior = TailBehavior::converged;
  } else {
    s.behavior = TailBehavior::undecided;
  }
  return s;
}

SettledRun run_until_decided(const std::function<Trace(double)>& simulate, double t_end,
                             double t_max) {
  SettledRun r;
  for (;;) {
    r.trace = simulate(t_end);
    r.tail = classify_tail(r.trace);
    if (r.tail.behavior != TailBehavior::undecided || 2.0 * t_end > t_max) return r;
    t_end *= 2.0;
  }
}

}  // namespace ddestab
