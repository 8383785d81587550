#include "ddestab/hemato.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "integrate.hpp"

namespace ddestab {

void HematoModel::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("hemato: alpha must be > 0");
  if (!(k0 > 0.0) || !std::isfinite(k0)) throw std::invalid_argument("hemato: k0 must be > 0");
  if (!(h > 1.0) || !std::isfinite(h)) throw std::invalid_argument("hemato: h must be > 1");
  if (!(r >= 0.0) || r > h) throw std::invalid_argument("hemato: need 0 <= r <= h");
  if (lineages.empty() || lineages.size() > 3) {
    throw std::invalid_argument("hemato: between 1 and 3 lineages required");
  }
  (void)mixture();  // weight, length and rate checks
}

double HematoModel::production(double x, double z) const {
  return k0 * std::pow(x, r) / (1.0 + std::pow(z, h));
}

GammaMixture HematoModel::mixture() const {
  std::vector<MixtureComponent> comps;
  for (const auto& l : lineages) comps.push_back({l.weight, GammaKernel(l.length, l.rate)});
  return GammaMixture(std::move(comps));
}

double HematoModel::mean_delay() const { return mixture().mean(); }

std::string to_string(SteadyBranch b) {
  switch (b) {
    case SteadyBranch::zero: return "zero";
    case SteadyBranch::unique: return "unique";
    case SteadyBranch::smaller: return "smaller";
    case SteadyBranch::larger: return "larger";
    case SteadyBranch::coincident: return "coincident";
  }
  return "unknown";
}

double steady_residual(const HematoModel& m, double x) {
  return std::abs(m.production(x, x) - m.alpha * x);
}

namespace {

// sign change of g on [lo, hi], bisected in log x to full precision
double bisect_log(const std::function<double(double)>& g, double lo, double hi) {
  double glo = g(lo);
  for (int i = 0; i < 400 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = std::sqrt(lo * hi);
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<SteadyState> hemato_steady_states(const HematoModel& m) {
  m.validate();
  const double alpha = m.alpha;
  const double k0 = m.k0;
  const double r = m.r;
  const double h = m.h;
  std::vector<SteadyState> out;
  if (r > 0.0) out.push_back({0.0, SteadyBranch::zero});

  if (r == 1.0) {
    if (k0 > alpha) out.push_back({std::pow((k0 - alpha) / alpha, 1.0 / h), SteadyBranch::unique});
    return out;
  }

  if (r < 1.0) {
    // alpha (1 + x^h) x^(1-r) = k0, increasing from 0 to infinity
    const auto g = [&](double x) { return alpha * (1.0 + std::pow(x, h)) * std::pow(x, 1.0 - r) - k0; };
    double lo = 1.0;
    double hi = 1.0;
    while (g(lo) > 0.0) lo *= 0.5;
    while (g(hi) < 0.0) hi *= 2.0;
    out.push_back({lo == hi ? lo : bisect_log(g, lo, hi), SteadyBranch::unique});
    return out;
  }

  // r > 1: alpha x^h - k0 x^(r-1) + alpha, positive at 0 and infinity with a
  // single interior minimum
  const auto g = [&](double x) { return alpha * std::pow(x, h) - k0 * std::pow(x, r - 1.0) + alpha; };
  const double xm = std::pow(k0 * (r - 1.0) / (alpha * h), 1.0 / (h - r + 1.0));
  const double gm = g(xm);
  const double scale = alpha + k0 * std::pow(xm, r - 1.0);
  if (std::abs(gm) <= 1e-12 * scale) {
    out.push_back({xm, SteadyBranch::coincident});
    return out;
  }
  if (gm > 0.0) return out;
  double lo = xm;
  while (g(lo) <= 0.0) lo *= 0.5;
  double hi = xm;
  while (g(hi) <= 0.0) hi *= 2.0;
  out.push_back({bisect_log(g, lo, xm), SteadyBranch::smaller});
  out.push_back({bisect_log(g, xm, hi), SteadyBranch::larger});
  return out;
}

Linearization hemato_linearize(const HematoModel& m, double xbar) {
  m.validate();
  if (!(xbar > 0.0) || !std::isfinite(xbar)) {
    throw std::invalid_argument("hemato_linearize: steady state must be positive");
  }
  const double res = steady_residual(m, xbar);
  if (res > 1e-8 * std::max(1.0, m.alpha * xbar)) {
    throw std::invalid_argument("hemato_linearize: x = " + std::to_string(xbar) +
                                " is not a steady state (residual " + std::to_string(res) + ")");
  }
  return {m.alpha * (1.0 - m.r), m.alpha * m.alpha * m.h * std::pow(xbar, m.h - m.r + 1.0) / m.k0};
}

std::optional<double> hemato_mean_bound(const HematoModel& m) {
  m.validate();
  if (m.r != 1.0 || !(m.k0 > m.alpha)) return std::nullopt;
  return m.k0 * std::numbers::pi / (2.0 * m.alpha * m.h * (m.k0 - m.alpha));
}

std::vector<SteadyStateVerdict> hemato_verdict(const HematoModel& m) {
  const auto states = hemato_steady_states(m);
  const DelayDistribution dist(m.mixture());
  const DelayDistribution at_mean = DelayDistribution::single(m.mean_delay());
  std::vector<SteadyStateVerdict> out;

  for (const auto& s : states) {
    SteadyStateVerdict v;
    v.state = s;
    Linearization lin;
    if (s.branch == SteadyBranch::zero) {
      if (m.r > 1.0) {
        v.stable = true;
        v.basis = "zero state with 1 < r <= h is always linearly stable";
        out.push_back(v);
        continue;
      }
      if (m.r < 1.0) {
        v.stable = false;
        v.basis = "zero state with 0 < r < 1 is always unstable";
        out.push_back(v);
        continue;
      }
      // r = 1: x' = (k0 - alpha) x near 0
      lin = {m.alpha - m.k0, 0.0};
      v.basis = "linearization at 0: a = alpha - k0, b = 0";
    } else {
      lin = hemato_linearize(m, s.value);
      v.basis = "linearization a = alpha (1 - r), b = alpha^2 h x^(h-r+1) / k0";
    }
    v.linearization = lin;
    v.distributed = classify(CharacteristicProblem(lin.a, lin.b, dist));
    v.discrete_at_mean = classify(CharacteristicProblem(lin.a, lin.b, at_mean));
    v.stable = v.distributed->stable;
    if (s.branch == SteadyBranch::coincident) {
      v.stable = false;
      v.basis = "double positive root: unstable";
    }
    out.push_back(v);
  }
  return out;
}

std::string to_string(DelayMode m) {
  return m == DelayMode::distributed_chain ? "distributed_chain" : "discrete_at_mean";
}

DelayMode delay_mode_from_string(const std::string& s) {
  if (s == "distributed_chain" || s == "distributed") return DelayMode::distributed_chain;
  if (s == "discrete_at_mean" || s == "discrete") return DelayMode::discrete_at_mean;
  throw std::invalid_argument("unknown delay mode: " + s);
}

double hemato_max_step(const HematoModel& m) {
  m.validate();
  double lim = m.mean_delay() / 20.0;
  for (const auto& l : m.lineages) lim = std::min(lim, 1.0 / l.rate);
  return 1e-3 * lim;
}

Trace simulate_hemato(const HematoModel& m, const HistorySpec& hist, double t_end, double dt,
                      DelayMode mode, const SimOptions& opts) {
  m.validate();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be finite and > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (opts.stride < 1) throw std::invalid_argument("stride must be >= 1");
  if (!hist.positive()) throw std::invalid_argument("hemato history must be positive");
  const double lim = hemato_max_step(m);
  if (dt > lim * (1.0 + 1e-12)) {
    throw std::invalid_argument("dt too large: need dt <= 1e-3 min(1/beta_i, E_p/20) = " +
                                std::to_string(lim));
  }

  Trace tr;
  tr.dt = dt;
  tr.sample_dt = dt * opts.stride;
  tr.columns = {"x", "z"};
  tr.values.resize(2);

  detail::EngineConfig cfg;
  cfg.t_end = t_end;
  cfg.dt = dt;
  cfg.clip = true;
  cfg.overflow = opts.overflow;
  const auto rhs = [&m](double x, double z) { return m.production(x, z) - m.alpha * x; };

  detail::EngineStatus st;
  if (mode == DelayMode::distributed_chain) {
    tr.scheme = "rk4-linear-chain";
    std::vector<detail::ChainBlock> blocks;
    for (const auto& l : m.lineages) blocks.push_back({l.weight, l.length, l.rate});
    st = detail::chain_rk4(rhs, blocks, detail::chain_initial_state(blocks, hist), cfg,
                           [&](long n, double t, const std::vector<double>& y, double z, double) {
                             if (n % opts.stride) return;
                             tr.times.push_back(t);
                             tr.values[0].push_back(y[0]);
                             tr.values[1].push_back(z);
                           });
  } else {
    tr.scheme = "rk4-method-of-steps-hermite";
    const double e = m.mean_delay();
    if (hist.kind() == HistorySpec::Kind::sampled && hist.horizon() < e * (1.0 - 1e-12)) {
      throw std::invalid_argument("history samples do not cover the mean delay");
    }
    const std::vector<Atom> atoms{{1.0, e}};
    st = detail::method_of_steps(rhs, atoms, hist, cfg,
                                 [&](long n, double t, double x, double z, double) {
                                   if (n % opts.stride) return;
                                   tr.times.push_back(t);
                                   tr.values[0].push_back(x);
                                   tr.values[1].push_back(z);
                                 });
  }
  tr.truncated = st.truncated;
  tr.note = st.note;
  tr.clipped_steps = st.clipped;
  if (st.clipped > 0) {
    tr.note += (tr.note.empty() ? "" : "; ") + std::string("negative states clipped on ") +
               std::to_string(st.clipped) + " steps";
  }
  return tr;
}

}  // namespace ddestab
