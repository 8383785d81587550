#include "ddestab/contour.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ddestab {

namespace {

using cplx = std::complex<double>;

constexpr double kMaxTurn = std::numbers::pi / 4.0;
constexpr int kMaxDepth = 40;

struct EdgeWalker {
  const AnalyticFn& f;
  double tiny;
  WindingResult& out;

  cplx eval(cplx z) {
    ++out.evaluations;
    const cplx v = f(z);
    const double a = std::abs(v);
    out.min_abs = std::min(out.min_abs, a);
    if (!(a > tiny) || !std::isfinite(a)) out.reliable = false;
    return v;
  }

  // Total arg change of f from z1 to z2.
  double segment(cplx z1, cplx f1, cplx z2, cplx f2, int depth) {
    const double whole = std::arg(f2 / f1);
    const cplx zm = 0.5 * (z1 + z2);
    const cplx fm = eval(zm);
    if (!out.reliable) return whole;
    const double left = std::arg(fm / f1);
    const double right = std::arg(f2 / fm);
    if (std::abs(left) < kMaxTurn && std::abs(right) < kMaxTurn &&
        std::abs(left + right - whole) < 1e-9) {
      return left + right;
    }
    if (depth >= kMaxDepth) {
      out.reliable = false;
      return left + right;
    }
    return segment(z1, f1, zm, fm, depth + 1) + segment(zm, fm, z2, f2, depth + 1);
  }

  double edge(cplx from, cplx to, double samples_per_unit) {
    const double len = std::abs(to - from);
    const int n = std::clamp(static_cast<int>(std::ceil(len * samples_per_unit)), 8, 200000);
    double total = 0.0;
    cplx z_prev = from;
    cplx f_prev = eval(from);
    for (int i = 1; i <= n && out.reliable; ++i) {
      const cplx z = from + (to - from) * (static_cast<double>(i) / n);
      const cplx fz = eval(z);
      if (!out.reliable) break;
      total += segment(z_prev, f_prev, z, fz, 0);
      z_prev = z;
      f_prev = fz;
    }
    return total;
  }
};

}  // namespace

WindingResult winding_number(const AnalyticFn& f, const Rect& r, double samples_per_unit,
                             double tiny) {
  WindingResult out;
  out.min_abs = INFINITY;
  EdgeWalker walker{f, tiny, out};
  const cplx c00(r.re_min, r.im_min), c10(r.re_max, r.im_min);
  const cplx c11(r.re_max, r.im_max), c01(r.re_min, r.im_max);
  double total = walker.edge(c00, c10, samples_per_unit);
  if (out.reliable) total += walker.edge(c10, c11, samples_per_unit);
  if (out.reliable) total += walker.edge(c11, c01, samples_per_unit);
  if (out.reliable) total += walker.edge(c01, c00, samples_per_unit);
  const double turns = total / (2.0 * std::numbers::pi);
  out.winding = static_cast<int>(std::lround(turns));
  if (std::abs(turns - out.winding) > 0.05) out.reliable = false;
  return out;
}

}  // namespace ddestab
