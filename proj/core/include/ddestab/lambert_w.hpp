#pragma once

#include <complex>

namespace ddestab {

/// Branch `k` of the Lambert W function, solving w * exp(w) = z.
/// Halley iteration seeded from the branch-point series near -1/e, the
/// Taylor series near 0 (k = 0) and the logarithmic asymptote elsewhere.
std::complex<double> lambert_w(std::complex<double> z, int k = 0);

}  // namespace ddestab
