#include "ddestab/lambert_w.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace ddestab {

namespace {

using cplx = std::complex<double>;

cplx halley(cplx z, cplx w) {
  for (int it = 0; it < 64; ++it) {
    const cplx ew = std::exp(w);
    const cplx f = w * ew - z;
    const cplx wp1 = w + 1.0;
    if (std::abs(wp1) < 1e-14) break;  // at the branch point itself
    const cplx step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) break;
  }
  return w;
}

cplx branch_series(cplx z, bool principal) {
  cplx p = std::sqrt(2.0 * (std::numbers::e * z + 1.0));
  if (!principal) p = -p;
  return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
}

cplx asymptotic(cplx z, int k) {
  const cplx l1 = std::log(z) + cplx(0.0, 2.0 * std::numbers::pi * k);
  const cplx l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

// w lies on the principal sheet: left boundary -y cot y + iy, |y| < pi
bool principal_sheet(cplx w) {
  const double y = w.imag();
  if (std::abs(y) >= std::numbers::pi) return false;
  if (std::abs(y) < 1e-12) return w.real() >= -1.0 - 1e-7;
  return w.real() > -y / std::tan(y) - 1e-9;
}

cplx principal(cplx z) {
  std::vector<cplx> guesses;
  if (std::abs(std::numbers::e * z + 1.0) < 2.5) guesses.push_back(branch_series(z, true));
  if (std::abs(z) < 0.5) guesses.push_back(z - z * z + 1.5 * z * z * z);
  if (z != cplx(-1.0)) guesses.push_back(std::log(1.0 + z));
  if (std::abs(z) > 1.0) guesses.push_back(asymptotic(z, 0));
  guesses.push_back(cplx(0.0, z.imag() >= 0.0 ? 1.0 : -1.0));
  cplx best = halley(z, guesses.front());
  for (const cplx g : guesses) {
    const cplx w = halley(z, g);
    if (principal_sheet(w) && std::abs(w * std::exp(w) - z) <= 1e-12 * (1.0 + std::abs(z))) return w;
  }
  return best;
}

cplx initial_guess(cplx z, int k) {
  // the W_{-1}/W_{1} pair meeting W_0 at the branch point
  const bool near_branch =
      std::abs(std::numbers::e * z + 1.0) < 0.3 && ((k == -1 && z.imag() >= 0.0) || (k == 1 && z.imag() < 0.0));
  if (near_branch) return branch_series(z, false);
  return asymptotic(z, k);
}

}  // namespace

cplx lambert_w(cplx z, int k) {
  if (z == cplx(0.0)) return k == 0 ? cplx(0.0) : cplx(-INFINITY, 0.0);
  if (k == 0) return principal(z);
  return halley(z, initial_guess(z, k));
}

}  // namespace ddestab
