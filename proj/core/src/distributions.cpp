#include "ddestab/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ddestab {

namespace {

constexpr double kWeightSumTol = 1e-12;
constexpr double kRenormalizeTol = 1e-9;
constexpr double kPoleTol = 1e-12;

template <typename T, typename Weight>
void normalize_weights(std::vector<T>& items, Weight weight_of, const char* what) {
  double total = 0.0;
  for (auto& it : items) total += weight_of(it);
  const double err = std::abs(total - 1.0);
  if (err > kRenormalizeTol) {
    throw std::invalid_argument(std::string(what) + ": weights sum to " + std::to_string(total) +
                                ", expected 1");
  }
  if (err > kWeightSumTol) {
    for (auto& it : items) weight_of(it) /= total;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// DiscreteAtoms

DiscreteAtoms::DiscreteAtoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("discrete distribution needs at least one atom");
  for (const auto& a : atoms) {
    if (!std::isfinite(a.weight) || !std::isfinite(a.delay)) {
      throw std::invalid_argument("discrete distribution: non-finite atom");
    }
    if (!(a.weight > 0.0) || a.weight > 1.0 + kRenormalizeTol) {
      throw std::invalid_argument("discrete distribution: atom weight outside (0, 1]");
    }
    if (a.delay < 0.0) throw std::invalid_argument("discrete distribution: negative delay");
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& l, const Atom& r) { return l.delay < r.delay; });
  for (const auto& a : atoms) {
    if (!atoms_.empty() && atoms_.back().delay == a.delay) {
      atoms_.back().weight += a.weight;
    } else {
      atoms_.push_back(a);
    }
  }
  normalize_weights(atoms_, [](Atom& a) -> double& { return a.weight; }, "discrete distribution");
}

double DiscreteAtoms::mean() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.weight * a.delay;
  return m;
}

double DiscreteAtoms::min_positive_delay() const {
  for (const auto& a : atoms_) {
    if (a.delay > 0.0) return a.delay;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Gamma kernels and mixtures

GammaKernel::GammaKernel(int q, double beta) : shape(q), rate(beta) {
  if (q < 1) throw std::invalid_argument("gamma kernel: shape must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::invalid_argument("gamma kernel: rate must be finite and > 0");
  }
}

GammaMixture::GammaMixture(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("gamma mixture needs at least one component");
  for (const auto& c : components_) {
    if (!(c.weight > 0.0) || c.weight > 1.0 + kRenormalizeTol) {
      throw std::invalid_argument("gamma mixture: component weight outside (0, 1]");
    }
    // Re-run kernel validation for aggregate-initialized kernels.
    (void)GammaKernel(c.kernel.shape, c.kernel.rate);
  }
  normalize_weights(components_, [](MixtureComponent& c) -> double& { return c.weight; },
                    "gamma mixture");
}

double GammaMixture::mean() const {
  double m = 0.0;
  for (const auto& c : components_) m += c.weight * c.kernel.mean();
  return m;
}

int GammaMixture::total_shape() const {
  int n = 0;
  for (const auto& c : components_) n += c.kernel.shape;
  return n;
}

double GammaMixture::min_rate() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& c : components_) r = std::min(r, c.kernel.rate);
  return r;
}

double GammaMixture::max_rate() const {
  double r = 0.0;
  for (const auto& c : components_) r = std::max(r, c.kernel.rate);
  return r;
}

// ---------------------------------------------------------------------------
// DelayDistribution

namespace {
double checked_scale(double rho) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("delay distribution: scale must be finite and >= 0");
  }
  return rho;
}
}  // namespace

DelayDistribution::DelayDistribution(DiscreteAtoms atoms, double scale)
    : inner_(std::move(atoms)), scale_(checked_scale(scale)) {}

DelayDistribution::DelayDistribution(GammaMixture mixture, double scale)
    : inner_(std::move(mixture)), scale_(checked_scale(scale)) {}

DelayDistribution DelayDistribution::single(double delay) {
  return DelayDistribution(DiscreteAtoms({{1.0, delay}}));
}

double mean(const DelayDistribution& d) {
  if (d.is_heaviside()) return 0.0;
  const double inner = std::visit([](const auto& v) { return v.mean(); }, d.variant());
  return d.scale() * inner;
}

cplx laplace(const DelayDistribution& d, cplx lambda) {
  const double rho = d.scale();
  if (rho == 0.0 || lambda == cplx(0.0)) return 1.0;
  if (d.is_discrete()) {
    cplx sum = 0.0;
    for (const auto& a : d.atoms().atoms()) sum += a.weight * std::exp(-lambda * (rho * a.delay));
    return sum;
  }
  cplx sum = 0.0;
  for (const auto& c : d.mixture().components()) {
    const cplx denom = c.kernel.rate + rho * lambda;
    if (std::abs(denom) < kPoleTol) {
      throw PoleProximityError("laplace: lambda within 1e-12 of a gamma pole");
    }
    sum += c.weight * std::pow(c.kernel.rate / denom, c.kernel.shape);
  }
  return sum;
}

cplx laplace_derivative(const DelayDistribution& d, cplx lambda) {
  const double rho = d.scale();
  if (rho == 0.0) return 0.0;
  if (d.is_discrete()) {
    cplx sum = 0.0;
    for (const auto& a : d.atoms().atoms()) {
      const double tau = rho * a.delay;
      sum -= a.weight * tau * std::exp(-lambda * tau);
    }
    return sum;
  }
  cplx sum = 0.0;
  for (const auto& c : d.mixture().components()) {
    const cplx denom = c.kernel.rate + rho * lambda;
    if (std::abs(denom) < kPoleTol) {
      throw PoleProximityError("laplace_derivative: lambda within 1e-12 of a gamma pole");
    }
    const cplx ratio = c.kernel.rate / denom;
    sum -= c.weight * static_cast<double>(c.kernel.shape) * rho * std::pow(ratio, c.kernel.shape) /
           denom;
  }
  return sum;
}

CosSinMoments cs_moments(const DelayDistribution& d, double omega) {
  const cplx l = laplace(d, cplx(0.0, omega));
  return {l.real(), -l.imag()};
}

DelayDistribution scale(const DelayDistribution& d, double rho) {
  if (rho < 0.0) throw std::invalid_argument("scale: negative factor");
  return std::visit([&](const auto& v) { return DelayDistribution(v, d.scale() * rho); },
                    d.variant());
}

double gamma_density(int q, double beta, double tau) {
  if (q < 1 || !(beta > 0.0)) throw std::invalid_argument("gamma_density: invalid parameters");
  if (tau < 0.0) return 0.0;
  if (tau == 0.0) return q == 1 ? beta : 0.0;
  // log form keeps large shapes finite
  const double log_g = q * std::log(beta) - std::lgamma(static_cast<double>(q)) +
                       (q - 1) * std::log(tau) - beta * tau;
  return std::exp(log_g);
}

double max_delay(const DelayDistribution& d) {
  if (d.is_heaviside()) return 0.0;
  if (d.is_discrete()) return d.scale() * d.atoms().max_delay();
  return std::numeric_limits<double>::infinity();
}

}  // namespace ddestab
