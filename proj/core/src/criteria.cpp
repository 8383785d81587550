#include "ddestab/criteria.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace ddestab {

namespace {

constexpr double kPi = std::numbers::pi;

// Bisection on a sign-changing bracket down to `tol`, then two Newton steps
// that are only kept while they stay inside the final bracket.
double bracketed_root(const std::function<double(double)>& f,
                      const std::function<double(double)>& df, double lo, double hi,
                      double tol) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  if (df) {
    for (int i = 0; i < 2; ++i) {
      const double d = df(x);
      if (d == 0.0) break;
      const double next = x - f(x) / d;
      if (next < lo - tol || next > hi + tol) break;
      x = next;
    }
  }
  return x;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

TangencyConstants constants_c_thetac() {
  // F(theta) = 1 - theta sin(theta) - cos(theta); F(pi/2) < 0 < F(pi)
  const auto f = [](double th) { return 1.0 - th * std::sin(th) - std::cos(th); };
  const auto df = [](double th) { return -th * std::cos(th); };
  const double theta = bracketed_root(f, df, 0.5 * kPi, kPi, 1e-12);
  return {std::sin(theta), theta};
}

double g_eval(double x) {
  if (!(x >= 0.0) || x > kPi) throw std::invalid_argument("g_eval: x outside [0, pi]");
  const auto k = constants_c_thetac();
  return x < k.theta_c ? 1.0 - k.c * x : std::cos(x);
}

HayesBound hayes_bound(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("hayes_bound: a and b must be finite");
  }
  if (a <= -b) return {BoundKind::none, 0.0};
  if (a >= std::abs(b)) return {BoundKind::infinite, std::numeric_limits<double>::infinity()};
  // here b > |a|
  return {BoundKind::finite, std::acos(-a / b) / std::sqrt(b * b - a * a)};
}

std::string to_string(Region r) {
  switch (r) {
    case Region::delay_independent_stable: return "delay_independent_stable";
    case Region::mean_bound_stable: return "mean_bound_stable";
    case Region::distribution_dependent: return "distribution_dependent";
    case Region::delay_independent_unstable: return "delay_independent_unstable";
  }
  return "unknown";
}

std::string to_string(DecidedBy d) {
  switch (d) {
    case DecidedBy::hayes_axioms: return "hayes_axioms";
    case DecidedBy::mean_bound: return "mean_bound";
    case DecidedBy::cs_sweep: return "cs_sweep";
    case DecidedBy::rightmost_root: return "rightmost_root";
  }
  return "unknown";
}

Region region_from_string(const std::string& s) {
  for (auto r : {Region::delay_independent_stable, Region::mean_bound_stable,
                 Region::distribution_dependent, Region::delay_independent_unstable}) {
    if (to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown region: " + s);
}

DecidedBy decided_by_from_string(const std::string& s) {
  for (auto d : {DecidedBy::hayes_axioms, DecidedBy::mean_bound, DecidedBy::cs_sweep,
                 DecidedBy::rightmost_root}) {
    if (to_string(d) == s) return d;
  }
  throw std::invalid_argument("unknown decision criterion: " + s);
}

StabilityVerdict classify(const CharacteristicProblem& p) {
  const double a = p.a;
  const double b = p.b;
  const double e = p.mean_delay();
  const HayesBound bound = hayes_bound(a, b);

  StabilityVerdict v;
  v.mean_delay = e;
  if (bound.kind == BoundKind::finite) v.critical_mean = bound.value;

  if (bound.kind == BoundKind::none) {
    v.region = Region::delay_independent_unstable;
    v.decided_by = DecidedBy::hayes_axioms;
    v.stable = false;
    v.details = "a <= -b: a nonnegative real characteristic root exists for every distribution";
    return v;
  }
  if (bound.kind == BoundKind::infinite) {
    v.region = Region::delay_independent_stable;
    v.decided_by = DecidedBy::hayes_axioms;
    v.stable = true;
    v.details = "a >= |b| and a > -b: no root with positive real part for any distribution";
    return v;
  }
  if (e < bound.value) {
    v.region = Region::mean_bound_stable;
    v.decided_by = DecidedBy::mean_bound;
    v.stable = true;
    v.details = "mean delay " + fmt(e) + " below the single-delay critical mean " + fmt(bound.value);
    return v;
  }

  v.region = Region::distribution_dependent;
  if (b > 0.0) {
    // time rescaled by b: a -> a/b, b -> 1, delays multiplied by b
    const SweepResult sweep = cs_sweep(a / b, scale(p.dist, b));
    if (sweep.outcome == SweepOutcome::certified_stable) {
      v.decided_by = DecidedBy::cs_sweep;
      v.stable = true;
      v.details = sweep.crossings.empty()
                      ? "C(omega) > -a on [0, omega_c]"
                      : "S(omega) < omega at all " + std::to_string(sweep.crossings.size()) +
                            " crossings C(omega) = -a";
      return v;
    }
  }
  const RootReport rep = rightmost_root(p);
  v.decided_by = DecidedBy::rightmost_root;
  v.rightmost_real = rep.rightmost_real;
  switch (rep.stability()) {
    case SpectralStability::stable: v.stable = true; break;
    case SpectralStability::unstable: v.stable = false; break;
    case SpectralStability::marginal: v.stable.reset(); break;
  }
  v.details = "rightmost characteristic root Re = " + fmt(rep.rightmost_real) + " (" +
              to_string(rep.method) + ")";
  return v;
}

// ---------------------------------------------------------------------------

std::vector<double> c_crossings(const DelayDistribution& d, double level, double omega_max) {
  std::vector<double> out;
  std::vector<std::pair<double, double>> touches;  // (w, |F(w)|)
  if (!(omega_max > 0.0)) return out;
  const double lip = std::max(mean(d), 1e-300);
  const auto f = [&](double w) { return cs_moments(d, w).c - level; };
  // C'(w) = -Im L'(i w)
  const auto df = [&](double w) { return -laplace_derivative(d, {0.0, w}).imag(); };

  std::function<void(double, double, double, double)> scan = [&](double lo, double flo, double hi,
                                                                 double fhi) {
    if (fhi == 0.0) {
      out.push_back(hi);
      return;
    }
    if ((flo < 0.0) != (fhi < 0.0) && flo != 0.0) {
      out.push_back(bracketed_root(f, df, lo, hi, 1e-10));
      return;
    }
    // same sign: |F| >= (|flo| + |fhi| - L (hi - lo)) / 2 on [lo, hi]
    if (std::abs(flo) + std::abs(fhi) > lip * (hi - lo)) return;
    if (hi - lo < 1e-6) {
      // possible tangential touch: locate the extremum of |F| and keep it if F vanishes there
      const double sign = (flo != 0.0 ? flo : fhi) > 0.0 ? 1.0 : -1.0;
      const auto w = boost::math::tools::brent_find_minima(
          [&](double x) { return sign * f(x); }, lo, hi, 40);
      if (std::abs(w.second) <= 1e-12) touches.push_back({w.first, std::abs(w.second)});
      return;
    }
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    scan(lo, flo, mid, fm);
    scan(mid, fm, hi, fhi);
  };

  const int n = 1000;
  double prev_w = 0.0;
  double prev_f = f(0.0);
  for (int i = 1; i <= n; ++i) {
    const double w = omega_max * static_cast<double>(i) / n;
    const double fw = f(w);
    scan(prev_w, prev_f, w, fw);
    prev_w = w;
    prev_f = fw;
  }
  // a crossing at omega_max itself may hide behind rounding
  if (prev_f != 0.0 && std::abs(prev_f) <= 1e-12) out.push_back(omega_max);
  // neighbouring leaves report the same touch; keep the deepest of each cluster
  std::sort(touches.begin(), touches.end());
  for (std::size_t i = 0; i < touches.size();) {
    auto best = touches[i];
    std::size_t j = i + 1;
    for (; j < touches.size() && touches[j].first - touches[j - 1].first < 1e-5; ++j) {
      if (touches[j].second < best.second) best = touches[j];
    }
    out.push_back(best.first);
    i = j;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(),
                        [](double l, double r) { return std::abs(l - r) < 1e-9; }),
            out.end());
  std::erase_if(out, [](double w) { return !(w > 0.0); });
  return out;
}

SweepResult cs_sweep(double a, const DelayDistribution& d) {
  if (!(a > -1.0 && a < 1.0)) throw std::invalid_argument("cs_sweep: requires a in (-1, 1)");
  SweepResult r;
  r.omega_c = std::sqrt(1.0 - a * a);
  for (double w : c_crossings(d, -a, r.omega_c)) {
    r.crossings.push_back({w, cs_moments(d, w).s});
  }
  const bool ok = std::all_of(r.crossings.begin(), r.crossings.end(),
                              [](const Crossing& c) { return c.s < c.omega - 1e-9; });
  r.outcome = ok ? SweepOutcome::certified_stable : SweepOutcome::inconclusive;
  return r;
}

// ---------------------------------------------------------------------------

DelayDistribution ExtremalDistribution::distribution() const {
  if (p2_star >= 1.0) return DelayDistribution::single(tau2_star);
  return DelayDistribution(DiscreteAtoms({{1.0 - p2_star, 0.0}, {p2_star, tau2_star}}));
}

double ExtremalDistribution::s_value() const { return p2_star * std::sin(omega_s * tau2_star); }

double ExtremalDistribution::c_value() const {
  return 1.0 - p2_star + p2_star * std::cos(omega_s * tau2_star);
}

ExtremalDistribution extremal_f_star(double a, double mean, double omega_s) {
  if (!(a > -1.0 && a < 1.0)) throw std::invalid_argument("extremal_f_star: requires a in (-1, 1)");
  const double omega_c = std::sqrt(1.0 - a * a);
  if (!(mean > 0.0) || !(mean < std::acos(-a) / omega_c)) {
    throw std::invalid_argument("extremal_f_star: mean must lie in (0, arccos(-a)/sqrt(1-a^2))");
  }
  if (!(omega_s > 0.0) || omega_s > omega_c * (1.0 + 1e-12)) {
    throw std::invalid_argument("extremal_f_star: omega_s must lie in (0, sqrt(1-a^2)]");
  }
  const auto tc = constants_c_thetac();
  const double k = (1.0 + a) / (omega_s * mean);
  if (k > tc.c) {
    throw InfeasibleExtremal("extremal_f_star: c = " + fmt(tc.c) + " < (1+a)/(omega_s E) = " +
                             fmt(k) + ", no zero-anchored two-delay density reaches C = -a");
  }

  // cos x = 1 - k x  <=>  phi(x) = (cos x - 1)/x + k = 0, phi decreasing on (0, theta_c]
  const auto h = [k](double x) { return std::cos(x) - 1.0 + k * x; };
  const auto dh = [k](double x) { return -std::sin(x) + k; };
  double x = tc.theta_c;
  if (k < tc.c) {
    const auto phi = [k](double x) { return (std::cos(x) - 1.0) / x + k; };
    const double lo = std::min(0.5 * tc.theta_c, k);
    x = bracketed_root(phi, nullptr, lo, tc.theta_c, 1e-13);
    // Newton on h, kept inside (0, theta_c]
    for (int i = 0; i < 2; ++i) {
      const double d = dh(x);
      if (d == 0.0) break;
      const double next = x - h(x) / d;
      if (next <= 0.0 || next > tc.theta_c) break;
      x = next;
    }
  }

  ExtremalDistribution out;
  out.omega_s = omega_s;
  out.tau2_star = x / omega_s;
  if (mean > out.tau2_star * (1.0 + 1e-9)) {
    throw InfeasibleExtremal("extremal_f_star: tau2* = " + fmt(out.tau2_star) + " < E = " + fmt(mean) +
                             ", no density of mean E has C(omega_s) = -a");
  }
  out.p2_star = std::min(1.0, mean / out.tau2_star);

  // remaining intersections of the line with cos on (x, pi]
  const int n = 2000;
  double prev = x + 1e-9;
  double fprev = h(prev);
  for (int i = 1; i <= n; ++i) {
    const double y = x + (kPi - x) * static_cast<double>(i) / n;
    const double fy = h(y);
    if ((fy < 0.0) != (fprev < 0.0) && std::abs(fprev) > 1e-14) {
      out.other_roots.push_back(bracketed_root(h, dh, prev, y, 1e-12));
    }
    prev = y;
    fprev = fy;
  }
  return out;
}

double chord_c(double t, double u, double v) {
  return ((v - t) * std::cos(u) + (t - u) * std::cos(v)) / (v - u);
}

double chord_s(double t, double u, double v) {
  return ((v - t) * std::sin(u) + (t - u) * std::sin(v)) / (v - u);
}

DelayDistribution ChordSolution::density(double omega_s) const {
  if (!(omega_s > 0.0)) throw std::invalid_argument("ChordSolution::density: omega_s must be > 0");
  return DelayDistribution(DiscreteAtoms({{p1, u / omega_s}, {p2, v1 / omega_s}}));
}

ChordSolution extremal_given_u(double a, double t, double u) {
  const auto tc = constants_c_thetac();
  if (!(u >= 0.0) || !(u < t)) throw std::invalid_argument("extremal_given_u: requires 0 <= u < T");
  if (!(t < tc.theta_c)) throw std::invalid_argument("extremal_given_u: requires T < theta_c");
  if (!(std::cos(u) + a > 0.0)) throw std::invalid_argument("extremal_given_u: requires cos(u) + a > 0");

  // (v - u) (C(u, v) + a), same zeros on v > T and no pole
  const auto g = [&](double v) {
    return (v - t) * std::cos(u) + (t - u) * std::cos(v) + a * (v - u);
  };
  const auto dg = [&](double v) { return std::cos(u) - (t - u) * std::sin(v) + a; };

  ChordSolution out;
  out.u = u;
  out.t = t;
  const int n = 4000;
  double prev = t;
  double fprev = g(t);
  for (int i = 1; i <= n; ++i) {
    const double v = t + (kPi - t) * static_cast<double>(i) / n;
    const double fv = g(v);
    if (fv == 0.0) {
      out.roots.push_back(v);
    } else if ((fv < 0.0) != (fprev < 0.0) && fprev != 0.0) {
      out.roots.push_back(bracketed_root(g, dg, prev, v, 1e-12));
    }
    prev = v;
    fprev = fv;
  }
  if (out.roots.empty()) {
    throw std::domain_error("extremal_given_u: C(u, v) = -a has no solution v in [T, pi]");
  }
  out.v1 = out.roots.front();
  out.s_value = chord_s(t, u, out.v1);
  out.p1 = (out.v1 - t) / (out.v1 - u);
  out.p2 = (t - u) / (out.v1 - u);
  return out;
}

}  // namespace ddestab
