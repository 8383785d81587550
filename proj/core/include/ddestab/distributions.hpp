#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace ddestab {

using cplx = std::complex<double>;

/// Raised when a transform is evaluated within 1e-12 of a Gamma pole.
class PoleProximityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Atom {
  double weight{0.0};
  double delay{0.0};
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finite set of point masses. Construction sorts by delay, merges
/// duplicate delays and renormalizes weights whose sum is within 1e-9 of 1.
class DiscreteAtoms {
 public:
  explicit DiscreteAtoms(std::vector<Atom> atoms);

  std::span<const Atom> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double mean() const;
  double max_delay() const { return atoms_.back().delay; }
  /// Smallest strictly positive delay, or 0 when every atom sits at zero.
  double min_positive_delay() const;

  friend bool operator==(const DiscreteAtoms&, const DiscreteAtoms&) = default;

 private:
  std::vector<Atom> atoms_;
};

/// Gamma density with integer shape q and rate beta.
struct GammaKernel {
  int shape{1};
  double rate{1.0};

  GammaKernel() = default;
  GammaKernel(int q, double beta);

  double mean() const { return shape / rate; }
  double variance() const { return shape / (rate * rate); }
  friend bool operator==(const GammaKernel&, const GammaKernel&) = default;
};

struct MixtureComponent {
  double weight{0.0};
  GammaKernel kernel;
  friend bool operator==(const MixtureComponent&, const MixtureComponent&) = default;
};

class GammaMixture {
 public:
  explicit GammaMixture(std::vector<MixtureComponent> components);

  std::span<const MixtureComponent> components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  double mean() const;
  /// Total number of chain compartments, sum of shapes.
  int total_shape() const;
  double min_rate() const;
  double max_rate() const;

  friend bool operator==(const GammaMixture&, const GammaMixture&) = default;

 private:
  std::vector<MixtureComponent> components_;
};

/// Delay distribution eta_rho(tau) = eta(tau / rho). A zero scale is the
/// Heaviside step, i.e. a point mass at zero, whatever the inner variant.
class DelayDistribution {
 public:
  using Variant = std::variant<DiscreteAtoms, GammaMixture>;

  DelayDistribution(DiscreteAtoms atoms, double scale = 1.0);
  DelayDistribution(GammaMixture mixture, double scale = 1.0);

  /// One atom of unit weight at `delay`.
  static DelayDistribution single(double delay);

  const Variant& variant() const { return inner_; }
  double scale() const { return scale_; }

  bool is_discrete() const { return std::holds_alternative<DiscreteAtoms>(inner_); }
  bool is_mixture() const { return std::holds_alternative<GammaMixture>(inner_); }
  bool is_heaviside() const { return scale_ == 0.0; }

  const DiscreteAtoms& atoms() const { return std::get<DiscreteAtoms>(inner_); }
  const GammaMixture& mixture() const { return std::get<GammaMixture>(inner_); }

  friend bool operator==(const DelayDistribution&, const DelayDistribution&) = default;

 private:
  Variant inner_;
  double scale_{1.0};
};

struct CosSinMoments {
  double c{1.0};
  double s{0.0};
};

double mean(const DelayDistribution& d);

/// Laplace-Stieltjes transform, integral of exp(-lambda tau) d eta(tau).
/// Mixtures are evaluated in closed form, which continues analytically to
/// the whole plane minus the poles -beta_i / rho.
cplx laplace(const DelayDistribution& d, cplx lambda);

/// d/dlambda of laplace().
cplx laplace_derivative(const DelayDistribution& d, cplx lambda);

/// C(omega), S(omega): cosine and sine moments of the distribution.
CosSinMoments cs_moments(const DelayDistribution& d, double omega);

/// Rescale delays by rho; scales compose multiplicatively.
DelayDistribution scale(const DelayDistribution& d, double rho);

double gamma_density(int q, double beta, double tau);

/// Largest delay actually present, or +inf for mixtures (unbounded support).
double max_delay(const DelayDistribution& d);

}  // namespace ddestab
