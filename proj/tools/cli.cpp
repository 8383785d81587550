#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "ddestab/chart.hpp"
#include "ddestab/criteria.hpp"
#include "ddestab/hemato.hpp"
#include "ddestab/json_io.hpp"
#include "ddestab/simulator.hpp"
#include "ddestab/spectrum.hpp"
#include "ddestab/svg.hpp"

namespace ddestab {

namespace {

struct Globals {
  double tol{kStabilityMargin};
  unsigned seed{1};
  std::string format;
};

int verdict_exit(const std::optional<bool>& stable) {
  if (!stable) return kExitUndecided;
  return *stable ? kExitStable : kExitUnstable;
}

// the root-based branch of a verdict honours --tol
StabilityVerdict apply_tol(StabilityVerdict v, double tol) {
  if (v.decided_by == DecidedBy::rightmost_root && v.rightmost_real) {
    const double re = *v.rightmost_real;
    if (std::abs(re) < tol) {
      v.stable.reset();
    } else {
      v.stable = re < 0.0;
    }
  }
  return v;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// selftest

struct Check {
  std::string name;
  bool ok;
  std::string detail;
};

std::vector<Check> selftest_checks(unsigned seed) {
  std::vector<Check> out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };

  const auto k = constants_c_thetac();
  add("tangency constants", std::abs(k.c - 0.7246) < 1e-4 && std::abs(k.theta_c - 2.3311) < 1e-4,
      "c = " + num(k.c) + ", theta_c = " + num(k.theta_c));

  const DelayDistribution f2(DiscreteAtoms({{0.8, 0.625}, {0.2, 3.5}}));
  const auto ws = c_crossings(f2, 0.5, std::sqrt(0.75));
  add("fig1 crossing", !ws.empty() && std::abs(ws.front() - 0.8308) < 1e-3,
      ws.empty() ? "no crossing" : "omega_s = " + num(ws.front()));

  const auto ch = extremal_given_u(-0.5, 0.9969, 0.5192);
  add("fig1 chord", std::abs(ch.v1 - 1.3056) < 1e-3 && ch.roots.size() >= 2 &&
                        std::abs(ch.roots[1] - 2.9078) < 1e-3,
      "v1 = " + num(ch.v1));

  const auto hb = hayes_bound(-0.5, 1.0);
  add("hayes bound", std::abs(hb.value - 1.2092) < 1e-4, "E* = " + num(hb.value));

  const auto rep = rightmost_root(CharacteristicProblem(0.0, 1.0, DelayDistribution::single(std::numbers::pi / 2)));
  add("boundary roots +-i", std::abs(rep.rightmost_real) < 1e-6 &&
                                std::abs(std::abs(rep.rightmost().value.imag()) - 1.0) < 1e-6,
      "rightmost Re = " + num(rep.rightmost_real));

  // random instances below the mean bound must be stable
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int bad = 0;
  for (int n = 0; n < 20; ++n) {
    const double b = 1.0;
    const double a = -0.9 + 1.8 * u01(rng);
    const double estar = hayes_bound(a, b).value;
    const double e = estar * (0.05 + 0.9 * u01(rng));
    const double tau2 = e / (0.2 + 0.8 * u01(rng));
    const double p2 = e / tau2;
    std::vector<Atom> atoms{{p2, tau2}};
    if (p2 < 1.0) atoms.push_back({1.0 - p2, 0.0});
    const auto r = rightmost_root(CharacteristicProblem(a, b, DelayDistribution(DiscreteAtoms(atoms))));
    if (!(r.rightmost_real < 0.0)) ++bad;
  }
  add("mean bound property", bad == 0, std::to_string(bad) + " counterexamples in 20");
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stability analysis of x' = -a x - b * integral x(t - tau) d eta(tau)", "ddestab"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tol", g.tol, "Marginal band for root-based verdicts")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for randomized checks");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json", "svg"}));

  double a = 0.0;
  double b = 0.0;
  std::string dist_arg;

  auto* verdict = app.add_subcommand("verdict", "Stability verdict for (a, b, distribution) or a model file");
  verdict->add_option("--a", a, "Instantaneous coefficient");
  verdict->add_option("--b", b, "Delayed coefficient");
  verdict->add_option("--dist", dist_arg, "single:X, inline JSON or JSON file");
  std::string model_path;
  std::vector<std::string> points;
  verdict->add_option("--model", model_path, "Hematopoiesis model JSON");
  verdict->add_option("--points", points, "Named (r, h) points of the model file");

  auto* roots = app.add_subcommand("roots", "Rightmost characteristic roots");
  roots->add_option("--a", a)->required();
  roots->add_option("--b", b)->required();
  roots->add_option("--dist", dist_arg)->required();
  double box_height = 0.0;
  roots->add_option("--box-height", box_height, "Initial half-height of the search box (atoms)");

  auto* chart = app.add_subcommand("chart", "Stability chart over an (a, b) grid");
  chart->add_option("--dist", dist_arg)->required();
  ChartJob job;
  int n_both = 0;
  chart->add_option("--a-min", job.a_min);
  chart->add_option("--a-max", job.a_max);
  chart->add_option("--b-min", job.b_min);
  chart->add_option("--b-max", job.b_max);
  chart->add_option("--na", job.na);
  chart->add_option("--nb", job.nb);
  chart->add_option("--n", n_both, "Resolution on both axes");
  chart->add_option("--threads", job.threads);
  std::string out_path;
  chart->add_option("--out", out_path, "Output file (stdout when absent)");

  auto* simulate = app.add_subcommand("simulate", "Time integration, linear or hematopoiesis model");
  simulate->add_option("--a", a);
  simulate->add_option("--b", b);
  simulate->add_option("--dist", dist_arg);
  simulate->add_option("--model", model_path);
  simulate->add_option("--points", points);
  std::string mode = "both";
  simulate->add_option("--mode", mode)->check(CLI::IsMember({"distributed", "discrete", "both"}));
  double history = std::nan("");
  double t_end = 0.0;
  double t_max = 0.0;
  double dt = 0.0;
  int stride = 0;
  simulate->add_option("--history", history, "Constant initial function");
  simulate->add_option("--t-end", t_end);
  simulate->add_option("--t-max", t_max, "Longest run when extending undecided model runs");
  simulate->add_option("--dt", dt);
  simulate->add_option("--stride", stride);
  simulate->add_option("--out", out_path, "Trace file for the linear equation (stdout when absent)");
  std::string out_dir = ".";
  simulate->add_option("--out-dir", out_dir, "Directory for model traces");

  auto* extremal = app.add_subcommand("extremal", "Extremal two-delay construction");
  double mean_e = std::nan("");
  double omega = std::nan("");
  double u = std::nan("");
  double t_chord = std::nan("");
  extremal->add_option("--a", a)->required();
  extremal->add_option("--E", mean_e, "Mean delay");
  extremal->add_option("--omega", omega, "Crossing frequency omega_s");
  extremal->add_option("--u", u, "First chord abscissa u = omega_s tau_1");
  extremal->add_option("--T", t_chord, "Chord mean T (default omega_s E)");
  extremal->add_option("--dist", dist_arg, "Distribution providing E and omega_s");

  auto* selftest = app.add_subcommand("selftest", "Quick numerical self checks");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (verdict->parsed()) {
      if (!model_path.empty()) {
        const auto cfg = hemato_config_from_json(read_text_file(model_path));
        const auto names = split_list(points);
        if (names.empty()) {
          out << to_json(hemato_verdict(cfg.model)) << '\n';
        } else {
          out << '{';
          for (std::size_t i = 0; i < names.size(); ++i) {
            out << (i ? "," : "") << json_string(names[i]) << ':' << to_json(hemato_verdict(cfg.at(names[i])));
          }
          out << "}\n";
        }
        return 0;
      }
      if (dist_arg.empty() || verdict->count("--a") == 0 || verdict->count("--b") == 0) {
        err << "verdict: --a, --b and --dist are required (or --model)\n";
        return kExitUsage;
      }
      const auto v = apply_tol(classify(CharacteristicProblem(a, b, parse_distribution_arg(dist_arg))), g.tol);
      out << to_json(v) << '\n';
      return verdict_exit(v.stable);
    }

    if (roots->parsed()) {
      const CharacteristicProblem p(a, b, parse_distribution_arg(dist_arg));
      RootReport rep;
      if (box_height > 0.0 && p.dist.is_discrete() && !p.dist.is_heaviside()) {
        DiscreteSearchOptions opts;
        opts.box_height = box_height;
        rep = rightmost_root_discrete(p, opts);
      } else {
        rep = rightmost_root(p);
      }
      out << to_json(rep) << '\n';
      return 0;
    }

    if (chart->parsed()) {
      if (n_both > 0) job.na = job.nb = n_both;
      const auto d = parse_distribution_arg(dist_arg);
      const ChartResult res = compute_chart(d, job);
      const std::string fmt = g.format.empty() ? "csv" : g.format;
      const std::string text = fmt == "csv" ? chart_csv(res) : fmt == "json" ? to_json(res) + "\n" : chart_svg(res);
      if (out_path.empty()) {
        out << text;
      } else {
        write_file(out_path, text);
        out << "{\"file\":" << json_string(out_path) << ",\"intersection\":[" << num(res.intersection.first)
            << ',' << num(res.intersection.second) << "]}\n";
      }
      return 0;
    }

    if (simulate->parsed()) {
      SimOptions opts;
      if (!model_path.empty()) {
        const auto cfg = hemato_config_from_json(read_text_file(model_path));
        auto names = split_list(points);
        std::vector<std::pair<std::string, HematoModel>> runs;
        if (names.empty()) {
          runs.push_back({"model", cfg.model});
        } else {
          for (const auto& n : names) runs.push_back({n, cfg.at(n)});
        }
        std::vector<DelayMode> modes;
        if (mode != "discrete") modes.push_back(DelayMode::distributed_chain);
        if (mode != "distributed") modes.push_back(DelayMode::discrete_at_mean);
        const double t0 = t_end > 0.0 ? t_end : 400.0;
        const double t1 = t_max > 0.0 ? t_max : 8.0 * t0;
        const HistorySpec hist = HistorySpec::constant(std::isnan(history) ? 1.05 : history);
        std::filesystem::create_directories(out_dir);
        out << '[';
        bool first = true;
        for (const auto& [name, m] : runs) {
          const double step = dt > 0.0 ? dt : hemato_max_step(m);
          opts.stride = stride > 0 ? stride : std::max(1, static_cast<int>(std::lround(0.01 / step)));
          for (DelayMode md : modes) {
            const auto run = run_until_decided(
                [&](double te) { return simulate_hemato(m, hist, te, step, md, opts); }, t0, t1);
            const std::string tag = md == DelayMode::distributed_chain ? "distributed" : "discrete";
            const std::string file = (std::filesystem::path(out_dir) / (name + "_" + tag + ".csv")).string();
            std::ostringstream csv;
            write_csv(run.trace, csv);
            write_file(file, csv.str());
            if (g.format == "svg") {
              write_file(file.substr(0, file.size() - 4) + ".svg", trace_svg(run.trace, name + " " + tag));
            }
            out << (first ? "" : ",") << "{\"point\":" << json_string(name) << ",\"mode\":"
                << json_string(to_string(md)) << ",\"behavior\":" << json_string(to_string(run.tail.behavior))
                << ",\"peak_to_peak\":" << num(run.tail.peak_to_peak) << ",\"final\":" << num(run.tail.final_value)
                << ",\"t_end\":" << num(run.trace.times.back()) << ",\"file\":" << json_string(file) << '}';
            first = false;
          }
        }
        out << "]\n";
        return 0;
      }
      if (dist_arg.empty() || simulate->count("--a") == 0 || simulate->count("--b") == 0) {
        err << "simulate: --a, --b and --dist are required (or --model)\n";
        return kExitUsage;
      }
      const CharacteristicProblem p(a, b, parse_distribution_arg(dist_arg));
      const double step = dt > 0.0 ? dt : default_step(p);
      opts.stride = stride > 0 ? stride : 1;
      const Trace tr = simulate_linear(p, HistorySpec::constant(std::isnan(history) ? 1.0 : history),
                                       t_end > 0.0 ? t_end : 80.0, step, opts);
      std::ostringstream text;
      if (g.format == "svg") {
        text << trace_svg(tr);
      } else {
        write_csv(tr, text);
      }
      if (out_path.empty()) {
        out << text.str();
      } else {
        write_file(out_path, text.str());
      }
      if (tr.truncated) err << "warning: " << tr.note << '\n';
      return 0;
    }

    if (extremal->parsed()) {
      std::optional<DelayDistribution> d;
      if (!dist_arg.empty()) d = parse_distribution_arg(dist_arg);
      ExtremalReport rep;
      rep.a = a;
      rep.mean = !std::isnan(mean_e) ? mean_e : d ? mean(*d) : std::nan("");
      if (!std::isnan(omega)) {
        rep.omega_s = omega;
      } else if (d && a > -1.0 && a < 1.0) {
        const auto ws = c_crossings(*d, -a, std::sqrt(1.0 - a * a));
        if (ws.empty()) throw std::invalid_argument("extremal: C(omega) = -a has no crossing in (0, omega_c]");
        rep.omega_s = ws.front();
      } else {
        err << "extremal: --omega or --dist is required\n";
        return kExitUsage;
      }
      if (!std::isnan(rep.mean)) {
        try {
          rep.f_star = extremal_f_star(a, rep.mean, rep.omega_s);
        } catch (const InfeasibleExtremal& e) {
          rep.f_star_error = e.what();
        }
      }
      if (!std::isnan(u)) {
        double t = t_chord;
        if (std::isnan(t)) {
          if (std::isnan(rep.mean)) throw std::invalid_argument("extremal: --T or --E needed with --u");
          t = rep.omega_s * rep.mean;
        }
        rep.chord = extremal_given_u(a, t, u);
      }
      if (std::isnan(rep.mean)) rep.mean = 0.0;
      out << to_json(rep) << '\n';
      return rep.f_star || rep.chord ? 0 : kExitFailure;
    }

    if (selftest->parsed()) {
      bool all = true;
      for (const auto& c : selftest_checks(g.seed)) {
        out << (c.ok ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        all = all && c.ok;
      }
      return all ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ddestab
