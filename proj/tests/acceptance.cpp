// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ddestab/chart.hpp"
#include "ddestab/criteria.hpp"
#include "ddestab/hemato.hpp"
#include "ddestab/json_io.hpp"
#include "ddestab/simulator.hpp"
#include "ddestab/spectrum.hpp"
#include "oracles.hpp"

using namespace ddestab;
using namespace ddestab::oracle;

namespace {

const double pi = std::numbers::pi;

struct Outcome {
  bool ok{true};
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [failed: " << what << "]";
    }
  }
};

bool near(double x, double ref, double tol) { return std::abs(x - ref) <= tol; }

const DelayDistribution kFig1(DiscreteAtoms({{0.8, 0.625}, {0.2, 3.5}}));

void tangency(Outcome& o) {
  Stopwatch sw;
  const auto k = constants_c_thetac();
  const double t = sw.seconds();
  o.detail << "c = " << k.c << ", theta_c = " << k.theta_c << ", " << t * 1e3 << " ms";
  o.require(near(k.c, 0.7246, 1e-4), "c");
  o.require(near(k.theta_c, 2.3311, 1e-4), "theta_c");
  o.require(t < 1e-3, "runtime < 1 ms");
}

void fig1(Outcome& o) {
  Stopwatch sw;
  const auto ws = c_crossings(kFig1, 0.5, std::sqrt(0.75));
  const auto ch = extremal_given_u(-0.5, 0.9969, 0.5192);
  const double t = sw.seconds();
  if (ws.empty() || ch.roots.size() < 2) {
    o.require(false, "missing crossing or chord roots");
    return;
  }
  const auto f_star = ch.density(ws.front());
  const auto atoms = f_star.atoms().atoms();
  o.detail << "omega_s = " << ws.front() << ", v1 = " << ch.v1 << ", v2 = " << ch.roots[1] << ", f* = {"
           << atoms[0].weight << "@" << atoms[0].delay << ", " << atoms[1].weight << "@" << atoms[1].delay
           << "}, " << t * 1e3 << " ms";
  o.require(near(ws.front(), 0.8308, 1e-3), "omega_s");
  o.require(near(ch.v1, 1.3056, 1e-3), "v1");
  o.require(near(ch.roots[1], 2.9078, 1e-3), "v2");
  o.require(atoms.size() == 2, "two atoms");
  o.require(near(atoms[0].weight, 0.3925, 1e-3) && near(atoms[0].delay, 0.625, 1e-3), "first atom");
  o.require(near(atoms[1].weight, 0.6075, 1e-3) && near(atoms[1].delay, 1.5715, 1e-3), "second atom");
  o.require(t < 1e-2, "runtime < 10 ms");
}

void hayes(Outcome& o) {
  const auto h0 = hayes_bound(0.0, 1.0);
  const auto rep = rightmost_root_discrete(CharacteristicProblem(0.0, 1.0, DelayDistribution::single(pi / 2)));
  const auto z = rep.rightmost().value;
  const auto h1 = hayes_bound(-0.5, 1.0);
  o.detail << "E*(0,1) = " << h0.value << ", root " << z.real() << (z.imag() < 0 ? "" : "+") << z.imag()
           << "i, E*(-0.5,1) = " << h1.value;
  o.require(near(h0.value, pi / 2, 1e-12), "E* = pi/2");
  o.require(std::abs(z.real()) < 1e-6, "|Re| < 1e-6");
  o.require(near(std::abs(z.imag()), 1.0, 1e-6), "Im = +-1");
  o.require(near(h1.value, 1.2092, 1e-4), "E*(-0.5, 1)");
}

void discrete_worst(Outcome& o) {
  Stopwatch sw;
  Rng rng(4242);
  int below = 0;
  int bad_below = 0;
  for (int n = 0; n < 200; ++n) {
    const double b = uniform(rng, 0.2, 3.0);
    const double a = uniform(rng, -0.98, 0.98) * b;
    const double e = hayes_bound(a, b).value * uniform(rng, 0.02, 0.995);
    const auto d = DelayDistribution(random_atoms(rng, 5, e));
    ++below;
    if (!(rightmost_root(CharacteristicProblem(a, b, d)).rightmost_real < 0.0)) ++bad_below;
  }
  int compared = 0;
  int bad_cmp = 0;
  while (compared < 200) {
    const double b = uniform(rng, 0.2, 3.0);
    const double a = uniform(rng, -0.98, 1.5) * b;
    const double e = uniform(rng, 0.05, 4.0);
    if (!(rightmost_root(CharacteristicProblem(a, b, DelayDistribution::single(e))).rightmost_real < 0.0)) continue;
    ++compared;
    const auto d = DelayDistribution(random_atoms(rng, 5, e));
    if (!(rightmost_root(CharacteristicProblem(a, b, d)).rightmost_real < 0.0)) ++bad_cmp;
  }
  const double t = sw.seconds();
  o.detail << below << " below E*: " << bad_below << " unstable; " << compared << " comparisons: " << bad_cmp
           << " violations; " << t << " s";
  o.require(bad_below == 0 && bad_cmp == 0, "all stable");
  o.require(t < 60.0, "runtime < 60 s");
}

void maximizer(Outcome& o) {
  Stopwatch sw;
  Rng rng(99);
  int checked = 0;
  int bad = 0;
  double worst = -1e300;
  for (int n = 0; n < 100000 && checked < 200; ++n) {
    const double a = uniform(rng, -0.95, 0.95);
    const double e = hayes_bound(a, 1.0).value * uniform(rng, 0.3, 0.99);
    const double ws = std::sqrt(1.0 - a * a) * uniform(rng, 0.3, 1.0);
    const double t = ws * e;
    ExtremalDistribution fs;
    ChordSolution ch;
    try {
      fs = extremal_f_star(a, e, ws);
      ch = extremal_given_u(a, t, uniform(rng, 0.0, 0.999) * t);
    } catch (const std::exception&) {
      continue;
    }
    if (ch.roots.empty()) continue;
    const double sstar = fs.s_value();
    if (!(sstar < ws)) ++bad;
    for (double v : ch.roots) {
      // a random two-atom density of mean E with C2(omega_s) = -a
      const double s2 = chord_s(t, ch.u, v);
      worst = std::max(worst, s2 - sstar);
      if (!(s2 <= sstar + 1e-9) || !near(chord_c(t, ch.u, v), -a, 1e-9)) ++bad;
    }
    ++checked;
  }
  const double t = sw.seconds();
  o.detail << checked << " densities, " << bad << " violations, max S2 - S* = " << worst << ", " << t << " s";
  o.require(checked == 200, "200 feasible instances");
  o.require(bad == 0, "S2 <= S* and S* < omega_s");
  o.require(t < 10.0, "runtime < 10 s");
}

bool sim_stable(const HematoModel& m, DelayMode mode) {
  const double dt = hemato_max_step(m);
  SimOptions opts;
  opts.stride = std::max(1, static_cast<int>(std::lround(0.01 / dt)));
  const auto run = run_until_decided(
      [&](double te) { return simulate_hemato(m, HistorySpec::constant(1.05), te, dt, mode, opts); }, 400.0, 1600.0);
  return run.tail.behavior == TailBehavior::converged && near(run.tail.final_value, 1.0, 1e-2);
}

void fig3(Outcome& o) {
  Stopwatch sw;
  const auto cfg = hemato_config_from_json(read_text_file(std::string(DDESTAB_DATA_DIR) + "/fig3.json"));
  const std::map<std::string, std::pair<bool, bool>> expected{
      {"i", {true, true}}, {"ii", {true, false}}, {"iii", {false, false}},
      {"iv", {true, true}}, {"vi", {false, false}}};
  o.require(near(*hemato_mean_bound(cfg.at("i")), pi / 1.5, 1e-12), "bound pi/1.5");
  o.require(near(*hemato_mean_bound(cfg.at("ii")), pi / 1.9, 1e-12), "bound pi/1.9");
  std::map<std::string, std::pair<bool, bool>> got_root;
  for (const auto& [name, rh] : cfg.points) {
    const auto m = cfg.at(name);
    const auto vs = hemato_verdict(m);
    const auto it = std::find_if(vs.begin(), vs.end(), [](const auto& v) { return near(v.state.value, 1.0, 1e-9); });
    o.require(it != vs.end(), "xbar = 1 at " + name);
    if (it == vs.end()) continue;
    // both verdicts confirmed by the rightmost root itself
    const auto lin = *it->linearization;
    const double re_dist = rightmost_root(CharacteristicProblem(lin.a, lin.b, DelayDistribution(m.mixture()))).rightmost_real;
    const double re_disc =
        rightmost_root(CharacteristicProblem(lin.a, lin.b, DelayDistribution::single(m.mean_delay()))).rightmost_real;
    got_root[name] = {re_dist < -kStabilityMargin, re_disc < -kStabilityMargin};
    o.require(it->stable == std::optional<bool>(re_dist < 0.0), "verdict vs root at " + name);
  }
  o.require(got_root["v"] == got_root["ii"], "point v reproduces ii");
  std::string dist_set, disc_set;
  for (const auto& [name, exp] : expected) {
    const auto m = cfg.at(name);
    const bool sd = sim_stable(m, DelayMode::distributed_chain);
    const bool sm = sim_stable(m, DelayMode::discrete_at_mean);
    if (got_root[name].first) dist_set += name + " ";
    if (got_root[name].second) disc_set += name + " ";
    o.require(got_root[name] == exp, "root pattern at " + name);
    o.require(sd == exp.first && sm == exp.second, "simulation pattern at " + name);
  }
  const double t = sw.seconds();
  o.detail << "distributed stable {" << dist_set << "}, discrete stable {" << disc_set << "}, " << t << " s";
  o.require(t < 300.0, "runtime < 5 min");
}

void mixture_sign(Outcome& o) {
  Stopwatch sw;
  Rng rng(7);
  int used = 0;
  int excluded = 0;
  int disagree = 0;
  for (int n = 0; n < 50; ++n) {
    const double b = uniform(rng, 0.3, 2.5);
    const double a = uniform(rng, -0.9, 0.9) * b;
    const auto mix = random_mixture(rng, 6);
    const double rho = uniform(rng, 0.5, 4.0) / mix.mean();
    const CharacteristicProblem p(a, b, DelayDistribution(mix, rho));
    const double re = rightmost_root(p).rightmost_real;
    if (std::abs(re) < 1e-3) {
      ++excluded;
      continue;
    }
    ++used;
    const auto g = estimate_growth_rate(p, HistorySpec::constant(1.0));
    if ((g.rate < 0.0) != (re < 0.0)) ++disagree;
  }
  o.detail << used << " compared, " << excluded << " marginal excluded, " << disagree << " disagreements, "
           << sw.seconds() << " s";
  o.require(disagree == 0, "zero disagreements");
}

void integrator_order(Outcome& o) {
  const GammaMixture m({{0.6, GammaKernel(3, 2.0)}, {0.4, GammaKernel(5, 4.0)}});
  const CharacteristicProblem p(0.5, 1.0, DelayDistribution(m));
  const double ref = chain_expm_solution(0.5, 1.0, m, 1.0, {10.0})[0];
  std::vector<double> err;
  for (double dt : {0.2, 0.1, 0.05}) {
    err.push_back(std::abs(simulate_linear(p, HistorySpec::constant(1.0), 10.0, dt).x().back() - ref));
  }
  const double o1 = std::log2(err[0] / err[1]);
  const double o2 = std::log2(err[1] / err[2]);
  o.detail << "observed orders " << o1 << ", " << o2;
  o.require(near(o1, 4.0, 0.3) && near(o2, 4.0, 0.3), "order 4 +- 0.3");
}

void chart_intersection(Outcome& o) {
  ChartJob job;
  job.na = 21;
  job.nb = 21;
  const auto c = compute_chart(kFig1, job);
  // limit omega -> 0 of the crossing curve (-w C / S, w / S)
  const double w = 1e-7;
  const auto cs = cs_moments(kFig1, w);
  const double a0 = -w * cs.c / cs.s;
  const double b0 = w / cs.s;
  o.detail << "intersection (" << c.intersection.first << ", " << c.intersection.second << "), curve limit (" << a0
           << ", " << b0 << ")";
  o.require(near(c.intersection.first, -1.0 / 1.2, 1e-6) && near(c.intersection.second, 1.0 / 1.2, 1e-6),
            "(-1/E, 1/E)");
  o.require(near(c.intersection.first, -0.8333, 1e-4) && near(c.intersection.second, 0.8333, 1e-4),
            "(-0.8333, 0.8333) to printed digits");
  o.require(near(a0, c.intersection.first, 1e-6) && near(b0, c.intersection.second, 1e-6), "curve limit");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"tangency constants", tangency},
      {"fig1 crossing, chord and extremal density", fig1},
      {"single-delay boundary", hayes},
      {"discrete delay is the worst case", discrete_worst},
      {"extremal density maximizes S", maximizer},
      {"fig3 stability pattern", fig3},
      {"mixture root sign vs simulation", mixture_sign},
      {"integrator order", integrator_order},
      {"chart boundary intersection", chart_intersection},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::printf("%s %zu %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
    if (!o.ok) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
