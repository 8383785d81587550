#include "ddestab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "ddestab/lambert_w.hpp"
#include "ddestab/polynomial.hpp"

namespace ddestab {

namespace {

using cplx = std::complex<double>;

double residual_of(const CharacteristicProblem& p, cplx z) {
  return std::abs(char_eval(p, z)) / std::max(1.0, std::abs(p.b));
}

void sort_roots(std::vector<CharRoot>& roots) {
  std::sort(roots.begin(), roots.end(), [](const CharRoot& l, const CharRoot& r) {
    if (l.value.real() != r.value.real()) return l.value.real() > r.value.real();
    return l.value.imag() > r.value.imag();
  });
}

// Newton on D itself. Returns nullopt if it fails to settle.
std::optional<cplx> newton(const CharacteristicProblem& p, cplx z, int max_iter = 60) {
  for (int it = 0; it < max_iter; ++it) {
    const cplx d = char_eval(p, z);
    const cplx dd = char_derivative(p, z);
    if (!std::isfinite(std::abs(d)) || dd == cplx(0.0)) return std::nullopt;
    const cplx step = d / dd;
    z -= step;
    if (!std::isfinite(std::abs(z))) return std::nullopt;
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z))) return z;
  }
  // accept a stalled iterate only if it is a root to working precision
  if (residual_of(p, z) < 1e-11) return z;
  return std::nullopt;
}

// Polishing step for roots that are already accurate; never moves further
// than `max_move` and only accepts improvements.
cplx polish_on_char(const CharacteristicProblem& p, cplx z0, double max_move) {
  cplx z = z0;
  double best = std::abs(char_eval(p, z));
  for (int it = 0; it < 8; ++it) {
    const cplx dd = char_derivative(p, z);
    if (dd == cplx(0.0)) break;
    cplx next = z - char_eval(p, z) / dd;
    if (z.imag() == 0.0) next.imag(0.0);
    if (std::abs(next - z0) > max_move) break;
    const double r = std::abs(char_eval(p, next));
    if (!(r < best)) break;
    best = r;
    z = next;
  }
  return z;
}

RootReport explicit_report(const CharacteristicProblem& p) {
  // all mass at zero: D(l) = l + a + b
  RootReport rep;
  const cplx root(-(p.a + p.b), 0.0);
  rep.roots.push_back({root, residual_of(p, root)});
  rep.rightmost_real = root.real();
  rep.method = RootMethod::explicit_formula;
  rep.search_box = {root.real() - 1.0, root.real() + 1.0, -1.0, 1.0};
  rep.winding_count = 1;
  return rep;
}

bool all_mass_at_zero(const DelayDistribution& d) {
  return d.is_heaviside() || (d.is_discrete() && d.atoms().max_delay() == 0.0);
}

// ---------------------------------------------------------------------------
// Argument-principle search for quasi-polynomials

class QuasiPolynomialSearch {
 public:
  QuasiPolynomialSearch(const CharacteristicProblem& p, int max_depth)
      : p_(p), max_depth_(max_depth) {
    tau_max_ = max_delay(p.dist);
    samples_per_unit_ = 2.0 * (1.0 + tau_max_);
    tiny_ = 1e-13 * (1.0 + std::abs(p.a) + std::abs(p.b));
    fn_ = [this](cplx z) { return char_eval(p_, z); };
  }

  // Winding count, nudging the contour by 1e-7 (relative) when it runs
  // through a root or the refinement gives up.
  std::pair<int, Rect> count(Rect r) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      const auto w = winding_number(fn_, r, samples_per_unit_, tiny_);
      if (w.reliable) return {w.winding, r};
      const double nudge = 1e-7 * (1.0 + attempt) * (1.0 + std::abs(r.center()));
      r.re_min -= nudge;
      r.re_max += 0.5 * nudge;
      r.im_min -= 0.7 * nudge;
      r.im_max += 0.3 * nudge;
    }
    throw RootFindingError("argument principle: contour repeatedly passes through a root");
  }

  void isolate(const Rect& r, int n, int depth, std::vector<cplx>& out) {
    if (n <= 0) return;
    const double size = std::max(r.width(), r.height());
    if (n == 1) {
      if (auto z = newton(p_, r.center()); z && r.contains(*z, 1e-9 * (1.0 + size))) {
        out.push_back(*z);
        return;
      }
    }
    if (size < 1e-9 * (1.0 + std::abs(r.center())) || depth >= max_depth_) {
      if (n > 1 && size < 1e-6 * (1.0 + std::abs(r.center()))) {
        // cluster / multiple root
        for (int i = 0; i < n; ++i) out.push_back(r.center());
        return;
      }
      throw RootFindingError("argument principle: no convergence after maximal subdivision depth");
    }

    static constexpr double kFractions[] = {0.5123, 0.4871, 0.5377, 0.4619, 0.5511};
    for (double frac : kFractions) {
      Rect lo = r;
      Rect hi = r;
      if (r.width() >= r.height()) {
        const double cut = r.re_min + frac * r.width();
        lo.re_max = cut;
        hi.re_min = cut;
      } else {
        const double cut = r.im_min + frac * r.height();
        lo.im_max = cut;
        hi.im_min = cut;
      }
      const auto w_lo = winding_number(fn_, lo, samples_per_unit_, tiny_);
      const auto w_hi = winding_number(fn_, hi, samples_per_unit_, tiny_);
      if (!w_lo.reliable || !w_hi.reliable || w_lo.winding < 0 || w_hi.winding < 0 ||
          w_lo.winding + w_hi.winding != n) {
        continue;
      }
      isolate(hi, w_hi.winding, depth + 1, out);
      isolate(lo, w_lo.winding, depth + 1, out);
      return;
    }
    if (n > 1 && size < 1e-4 * (1.0 + std::abs(r.center()))) {
      // |D| drops below the noise floor around a multiple root: place it at the zero of D'
      cplx z = r.center();
      cplx z_prev = z + 1e-3 * size;
      cplx d_prev = char_derivative(p_, z_prev);
      for (int it = 0; it < 50; ++it) {
        const cplx dz = char_derivative(p_, z);
        if (dz == d_prev) break;
        const cplx step = dz * (z - z_prev) / (dz - d_prev);
        z_prev = z;
        d_prev = dz;
        z -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
      }
      if (!r.contains(z, 1e-9)) z = r.center();
      for (int i = 0; i < n; ++i) out.push_back(z);
      return;
    }
    throw RootFindingError("argument principle: could not split a rectangle consistently");
  }

  RootReport run(double initial_height) {
    const double ab = std::abs(p_.a) + std::abs(p_.b);
    const double right = ab + 0.5;
    const double step0 = 0.5 * (ab + 1.0);
    double height = initial_height;

    for (int pass = 0; pass < 4; ++pass) {
      // sweep strips right to left until zeros show up
      double left = right;
      int found = 0;
      Rect box;
      for (int k = 0; found == 0; ++k) {
        // the Im bound grows like exp(-left tau_max); keep each step within one e-fold
        left -= std::min(step0 * std::ldexp(1.0, std::min(k, 20)), 1.0 / tau_max_);
        const double h = std::max(height, imag_bound(left));
        if (-left * tau_max_ > 650.0 || h > 1e6) {
          throw RootFindingError("argument principle: no characteristic root found before overflow");
        }
        std::tie(found, box) = count({left, right, -h, h});
      }
      height = std::max(height, box.im_max);

      std::vector<cplx> zs;
      isolate(box, found, 0, zs);
      RootReport rep = assemble(zs, box, found);

      // A root with Re >= mu has |Im| <= |lambda + a| <= |b| sum p_i exp(-mu tau_i),
      // so a box at least that tall certifies mu as the rightmost real part.
      const double needed = imag_bound(rep.rightmost_real);
      lambert_cross_check(rep);
      if (height >= needed) return rep;
      height = needed;
    }
    throw RootFindingError("argument principle: search box height did not stabilize");
  }

 private:
  // |Im| of any root with Re >= mu: |lambda + a| <= |b| sum p_i exp(-mu tau_i)
  double imag_bound(double mu) const {
    double bound = 0.0;
    for (const auto& atom : p_.dist.atoms().atoms()) {
      bound += atom.weight * std::exp(std::max(0.0, -mu * p_.dist.scale() * atom.delay));
    }
    return std::abs(p_.b) * bound + 0.25;
  }

  RootReport assemble(const std::vector<cplx>& zs, const Rect& box, int count) {
    // enforce conjugate symmetry: keep the upper half-plane representatives
    std::vector<cplx> sym;
    for (cplx z : zs) {
      const double tol = 1e-9 * (1.0 + std::abs(z));
      if (std::abs(z.imag()) <= tol) {
        sym.push_back(polish_on_char(p_, {z.real(), 0.0}, 1e-6));
      } else if (z.imag() > 0.0) {
        sym.push_back(z);
        sym.push_back(std::conj(z));
      }
    }
    const auto& use = static_cast<int>(sym.size()) == count ? sym : zs;

    RootReport rep;
    rep.method = RootMethod::quasi_argument_principle;
    rep.search_box = box;
    rep.winding_count = count;
    for (cplx z : use) rep.roots.push_back({z, residual_of(p_, z)});
    sort_roots(rep.roots);
    rep.rightmost_real = rep.roots.front().value.real();
    return rep;
  }

  // For a single positive delay the principal Lambert-W branch gives the
  // rightmost root in closed form; treat a disagreement as a counting failure.
  void lambert_cross_check(const RootReport& rep) const {
    if (!p_.dist.is_discrete() || p_.dist.atoms().size() != 1) return;
    const double tau = tau_max_;
    const cplx seed = -p_.a + lambert_w(-p_.b * tau * std::exp(p_.a * tau), 0) / tau;
    const auto z = newton(p_, seed);
    if (!z || !rep.search_box.contains(*z)) return;
    for (const auto& r : rep.roots) {
      if (std::abs(r.value - *z) <= 1e-6 * (1.0 + std::abs(*z))) return;
    }
    throw RootFindingError("argument principle: Lambert-W root missing from certified box");
  }

  const CharacteristicProblem& p_;
  int max_depth_;
  double tau_max_{0.0};
  double samples_per_unit_{1.0};
  double tiny_{0.0};
  AnalyticFn fn_;
};

// ascending-coefficient helpers for the chain polynomial
using Poly = std::vector<double>;

Poly multiply(const Poly& l, const Poly& r) {
  Poly out(l.size() + r.size() - 1, 0.0);
  for (std::size_t i = 0; i < l.size(); ++i) {
    for (std::size_t j = 0; j < r.size(); ++j) out[i + j] += l[i] * r[j];
  }
  return out;
}

Poly linear_power(double shift, int q) {
  Poly out{1.0};
  const Poly factor{shift, 1.0};
  for (int i = 0; i < q; ++i) out = multiply(out, factor);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

CharacteristicProblem::CharacteristicProblem(double a_, double b_, DelayDistribution d)
    : a(a_), b(b_), dist(std::move(d)) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("characteristic problem: a and b must be finite");
  }
}

std::string to_string(RootMethod m) {
  switch (m) {
    case RootMethod::polynomial: return "polynomial";
    case RootMethod::quasi_argument_principle: return "quasi_argument_principle";
    case RootMethod::explicit_formula: return "explicit";
  }
  return "unknown";
}

std::string to_string(SpectralStability s) {
  switch (s) {
    case SpectralStability::stable: return "stable";
    case SpectralStability::marginal: return "marginal";
    case SpectralStability::unstable: return "unstable";
  }
  return "unknown";
}

SpectralStability RootReport::stability(double margin) const {
  if (std::abs(rightmost_real) < margin) return SpectralStability::marginal;
  return rightmost_real < 0.0 ? SpectralStability::stable : SpectralStability::unstable;
}

cplx char_eval(const CharacteristicProblem& p, cplx lambda) {
  return lambda + p.a + p.b * laplace(p.dist, lambda);
}

cplx char_derivative(const CharacteristicProblem& p, cplx lambda) {
  return 1.0 + p.b * laplace_derivative(p.dist, lambda);
}

std::vector<double> chain_polynomial(const CharacteristicProblem& p) {
  if (!p.dist.is_mixture()) {
    throw std::invalid_argument("chain_polynomial: requires a gamma mixture distribution");
  }
  if (p.dist.is_heaviside()) {
    throw std::invalid_argument("chain_polynomial: requires a positive scale");
  }
  const auto& comps = p.dist.mixture().components();
  if (p.dist.mixture().total_shape() + 1 > kMaxPolynomialDegree) {
    throw std::invalid_argument("chain_polynomial: total chain length exceeds degree cap");
  }
  const double rho = p.dist.scale();

  std::vector<Poly> powers;
  for (const auto& c : comps) powers.push_back(linear_power(c.kernel.rate / rho, c.kernel.shape));

  Poly all{1.0};
  for (const auto& pw : powers) all = multiply(all, pw);
  Poly result = multiply(all, Poly{p.a, 1.0});

  for (std::size_t i = 0; i < comps.size(); ++i) {
    Poly others{1.0};
    for (std::size_t j = 0; j < comps.size(); ++j) {
      if (j != i) others = multiply(others, powers[j]);
    }
    const double k = comps[i].kernel.rate / rho;
    const double coef = p.b * comps[i].weight * std::pow(k, comps[i].kernel.shape);
    for (std::size_t n = 0; n < others.size(); ++n) result[n] += coef * others[n];
  }
  std::reverse(result.begin(), result.end());
  return result;
}

RootReport rightmost_root_discrete(const CharacteristicProblem& p,
                                   const DiscreteSearchOptions& opts) {
  if (!p.dist.is_discrete()) {
    throw std::invalid_argument("rightmost_root_discrete: requires a discrete distribution");
  }
  if (all_mass_at_zero(p.dist) || p.b == 0.0) {
    if (p.b == 0.0) {
      RootReport rep;
      const cplx root(-p.a, 0.0);
      rep.roots.push_back({root, 0.0});
      rep.rightmost_real = -p.a;
      rep.method = RootMethod::explicit_formula;
      rep.search_box = {-p.a - 1.0, -p.a + 1.0, -1.0, 1.0};
      rep.winding_count = 1;
      return rep;
    }
    return explicit_report(p);
  }
  const double height =
      opts.box_height.value_or(std::abs(p.a) + std::abs(p.b) + 1.0);
  if (!(height > 0.0)) throw std::invalid_argument("rightmost_root_discrete: box height must be > 0");
  QuasiPolynomialSearch search(p, opts.max_depth);
  return search.run(height);
}

RootReport rightmost_root(const CharacteristicProblem& p) {
  if (all_mass_at_zero(p.dist)) return explicit_report(p);
  if (p.dist.is_discrete()) return rightmost_root_discrete(p);

  const auto coeffs = chain_polynomial(p);
  const auto zs = polynomial_roots(coeffs);
  RootReport rep;
  rep.method = RootMethod::polynomial;
  rep.winding_count = static_cast<int>(zs.size());

  // zs holds exact conjugate pairs; polish the upper representatives only
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (zs[i].imag() < 0.0) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < zs.size(); ++j) {
      if (j != i) nearest = std::min(nearest, std::abs(zs[j] - zs[i]));
    }
    cplx z = zs[i];
    double res = 0.0;
    try {
      z = polish_on_char(p, zs[i], 0.1 * std::min(nearest, 1.0));
      res = residual_of(p, z);
    } catch (const PoleProximityError&) {
      res = poly_residual(coeffs, z);
    }
    rep.roots.push_back({z, res});
    if (zs[i].imag() > 0.0) rep.roots.push_back({std::conj(z), res});
  }
  sort_roots(rep.roots);

  Rect box{INFINITY, -INFINITY, INFINITY, -INFINITY};
  for (const auto& r : rep.roots) {
    box.re_min = std::min(box.re_min, r.value.real());
    box.re_max = std::max(box.re_max, r.value.real());
    box.im_min = std::min(box.im_min, r.value.imag());
    box.im_max = std::max(box.im_max, r.value.imag());
  }
  const double pad = 0.5;
  rep.search_box = {box.re_min - pad, box.re_max + pad, box.im_min - pad, box.im_max + pad};
  rep.rightmost_real = rep.roots.front().value.real();
  return rep;
}

}  // namespace ddestab
