#pragma once

#include <complex>
#include <span>
#include <vector>

namespace ddestab {

/// Largest degree accepted by polynomial_roots().
inline constexpr int kMaxPolynomialDegree = 256;

/// Evaluates a real polynomial with coefficients in descending order.
std::complex<double> poly_eval(std::span<const double> coeffs, std::complex<double> x);

/// Scale-free residual |p(x)| / (1 + |x|^deg) with p normalized so that its
/// largest coefficient has unit magnitude.
double poly_residual(std::span<const double> coeffs, std::complex<double> x);

/// All complex roots of the polynomial whose coefficients are given in
/// descending order, e.g. {1, 1, 1} for x^2 + x + 1. Roots come from the
/// eigenvalues of the balanced companion matrix after a change of variable
/// that equalizes the extreme coefficients, and are Newton-polished on the
/// original coefficients. Non-real roots are returned as exact conjugate
/// pairs, sorted by decreasing real part.
///
/// Throws std::invalid_argument for an all-zero input, a zero leading
/// coefficient, degree 0 or degree above kMaxPolynomialDegree.
std::vector<std::complex<double>> polynomial_roots(std::span<const double> coeffs);

}  // namespace ddestab
