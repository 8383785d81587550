#pragma once

#include <complex>
#include <functional>

namespace ddestab {

/// Axis-aligned rectangle in the complex plane.
struct Rect {
  double re_min{0.0};
  double re_max{0.0};
  double im_min{0.0};
  double im_max{0.0};

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  std::complex<double> center() const {
    return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)};
  }
  bool contains(std::complex<double> z, double slack = 0.0) const {
    return z.real() >= re_min - slack && z.real() <= re_max + slack &&
           z.imag() >= im_min - slack && z.imag() <= im_max + slack;
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct WindingResult {
  int winding{0};
  /// False when the contour passed within `tiny` of a zero, or when the
  /// adaptive refinement hit its depth cap; the count is then meaningless.
  bool reliable{true};
  double min_abs{0.0};
  int evaluations{0};
};

using AnalyticFn = std::function<std::complex<double>(std::complex<double>)>;

/// Number of zeros (minus poles) of `f` inside `rect`, counted through the
/// total change of arg f along the counter-clockwise boundary. Each edge is
/// pre-sampled with `samples_per_unit` points per unit length and then
/// bisected until every sub-step turns arg f by less than pi/4.
WindingResult winding_number(const AnalyticFn& f, const Rect& rect, double samples_per_unit,
                             double tiny);

}  // namespace ddestab
