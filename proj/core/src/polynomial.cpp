#include "ddestab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Core>
#include <unsupported/Eigen/Polynomials>

namespace ddestab {

namespace {

using cplx = std::complex<double>;

struct EvalWithDerivative {
  cplx value;
  cplx derivative;
};

EvalWithDerivative horner(std::span<const double> c, cplx x) {
  cplx p = c[0];
  cplx dp = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    dp = dp * x + p;
    p = p * x + c[i];
  }
  return {p, dp};
}

double max_abs(std::span<const double> c) {
  double m = 0.0;
  for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

// Newton polish that refuses to wander further than `max_move` from the seed.
cplx polish(std::span<const double> c, cplx x0, double max_move) {
  cplx x = x0;
  double best = std::abs(horner(c, x).value);
  for (int it = 0; it < 12 && best > 0.0; ++it) {
    const auto [p, dp] = horner(c, x);
    if (dp == cplx(0.0)) break;
    cplx next = x - p / dp;
    if (x.imag() == 0.0) next.imag(0.0);
    if (std::abs(next - x0) > max_move) break;
    const double r = std::abs(horner(c, next).value);
    if (!(r < best)) break;
    best = r;
    x = next;
  }
  return x;
}

}  // namespace

cplx poly_eval(std::span<const double> coeffs, cplx x) {
  if (coeffs.empty()) return 0.0;
  return horner(coeffs, x).value;
}

double poly_residual(std::span<const double> coeffs, cplx x) {
  const double scale = max_abs(coeffs);
  if (scale == 0.0) return 0.0;
  const int deg = static_cast<int>(coeffs.size()) - 1;
  // |p(x)| / (1 + |x|^deg), computed in logs when |x|^deg would overflow
  const double ax = std::abs(x);
  const double p = std::abs(poly_eval(coeffs, x)) / scale;
  const double log_den = deg * std::log(std::max(ax, 1e-300));
  if (log_den > 600.0) return std::exp(std::log(p) - log_den);
  return p / (1.0 + std::pow(ax, deg));
}

std::vector<cplx> polynomial_roots(std::span<const double> coeffs) {
  if (coeffs.empty() || max_abs(coeffs) == 0.0) {
    throw std::invalid_argument("polynomial_roots: degenerate (all-zero) polynomial");
  }
  if (coeffs.front() == 0.0) {
    throw std::invalid_argument("polynomial_roots: leading coefficient is zero");
  }
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw std::invalid_argument("polynomial_roots: non-finite coefficient");
  }
  const int degree = static_cast<int>(coeffs.size()) - 1;
  if (degree < 1) throw std::invalid_argument("polynomial_roots: degree must be >= 1");
  if (degree > kMaxPolynomialDegree) {
    throw std::invalid_argument("polynomial_roots: degree exceeds cap of 256");
  }

  std::vector<cplx> roots;
  roots.reserve(degree);

  // Exact zero roots from trailing zero coefficients.
  std::size_t last = coeffs.size();
  while (last > 1 && coeffs[last - 1] == 0.0) {
    roots.emplace_back(0.0, 0.0);
    --last;
  }
  const std::span<const double> core = coeffs.subspan(0, last);
  const int n = static_cast<int>(core.size()) - 1;

  if (n == 1) {
    roots.emplace_back(-core[1] / core[0], 0.0);
  } else if (n >= 2) {
    // x = s * y with s = |c_n / c_0|^(1/n) (constant over leading)
    const double log_s =
        (std::log(std::abs(core[n])) - std::log(std::abs(core[0]))) / static_cast<double>(n);
    // ascending coefficients of q(y) = p(s y), normalized in log space
    std::vector<double> logs(n + 1);
    double log_max = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n; ++k) {
      const double c = core[n - k];
      logs[k] = c == 0.0 ? -std::numeric_limits<double>::infinity()
                         : std::log(std::abs(c)) + k * log_s;
      log_max = std::max(log_max, logs[k]);
    }
    Eigen::VectorXd q(n + 1);
    for (int k = 0; k <= n; ++k) {
      const double c = core[n - k];
      q[k] = c == 0.0 ? 0.0 : std::copysign(std::exp(logs[k] - log_max), c);
    }
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(q);
    const double s = std::exp(log_s);

    std::vector<cplx> raw;
    raw.reserve(n);
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) raw.push_back(solver.roots()[i] * s);

    for (std::size_t i = 0; i < raw.size(); ++i) {
      const cplx r = raw[i];
      if (r.imag() < 0.0) continue;  // added back as a conjugate below
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < raw.size(); ++j) {
        if (j != i) nearest = std::min(nearest, std::abs(raw[j] - r));
      }
      const double max_move = std::isfinite(nearest) ? 0.3 * nearest : 1.0 + std::abs(r);
      const cplx p = polish(core, r, max_move);
      roots.push_back(p);
      if (r.imag() > 0.0) roots.push_back(std::conj(p));
    }
    // An odd number of negative-imaginary outputs would mean the solver broke
    // conjugate symmetry; fall back to its raw values in that case.
    if (static_cast<int>(roots.size()) != degree) {
      roots.resize(degree - n);
      for (const auto& r : raw) roots.push_back(r);
    }
  }

  std::sort(roots.begin(), roots.end(), [](const cplx& l, const cplx& r) {
    if (l.real() != r.real()) return l.real() > r.real();
    return l.imag() > r.imag();
  });
  return roots;
}

}  // namespace ddestab
