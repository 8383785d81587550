#include "ddestab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ddestab {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMargin = 50.0;

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

void header(std::ostringstream& os, const Frame& f, const std::string& title, const char* xname,
            const char* yname) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
     << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n";
  if (!title.empty()) {
    os << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\">" << escape(title)
       << "</text>\n";
  }
  os << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 15 << "\">" << label(f.x0) << "</text>\n";
  os << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 15
     << "\" text-anchor=\"end\">" << label(f.x1) << "</text>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
     << xname << "</text>\n";
  os << "<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin
     << "\" text-anchor=\"end\">" << label(f.y0) << "</text>\n";
  os << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 10 << "\" text-anchor=\"end\">"
     << label(f.y1) << "</text>\n";
  os << "<text x=\"14\" y=\"" << kHeight / 2 << "\">" << yname << "</text>\n";
}

}  // namespace

std::string trace_svg(const Trace& trace, const std::string& title) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& col : trace.values) {
    for (double v : col) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) {
    lo = (std::isfinite(lo) ? lo : 0.0) - 1.0;
    hi = lo + 2.0;
  }
  const double t0 = trace.times.empty() ? 0.0 : trace.times.front();
  const double t1 = trace.times.empty() ? 1.0 : std::max(trace.times.back(), t0 + 1e-12);
  const Frame f{t0, t1, lo, hi};
  std::ostringstream os;
  header(os, f, title, "t", "");

  // at most ~2000 vertices per line
  const std::size_t step = std::max<std::size_t>(1, trace.rows() / 2000);
  for (std::size_t c = 0; c < trace.values.size(); ++c) {
    os << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << colors[c % 5] << "\" points=\"";
    for (std::size_t k = 0; k < trace.rows(); k += step) {
      const double v = trace.values[c][k];
      if (!std::isfinite(v)) break;
      os << num(f.px(trace.times[k])) << ',' << num(f.py(v)) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << kWidth - kMargin - 5 << "\" y=\"" << kMargin + 14 * (c + 1)
       << "\" text-anchor=\"end\" fill=\"" << colors[c % 5] << "\">" << escape(trace.columns[c])
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string chart_svg(const ChartResult& chart) {
  static const char* fills[] = {"#ffffff", "#d9d9d9", "#ececec", "#ffffff", "#fbe3e3", "#7f7f7f"};
  const auto& av = chart.a_values;
  const auto& bv = chart.b_values;
  if (av.size() < 2 || bv.size() < 2) throw std::invalid_argument("chart_svg: empty chart");
  const double da = (av.back() - av.front()) / static_cast<double>(av.size() - 1);
  const double db = (bv.back() - bv.front()) / static_cast<double>(bv.size() - 1);
  const Frame f{av.front() - da / 2, av.back() + da / 2, bv.front() - db / 2, bv.back() + db / 2};
  std::ostringstream os;
  header(os, f, "stability chart, E = " + label(chart.mean), "a", "b");

  const double cw = f.px(f.x0 + da) - f.px(f.x0);
  const double ch = f.py(f.y0) - f.py(f.y0 + db);
  for (std::size_t j = 0; j < bv.size(); ++j) {
    for (std::size_t i = 0; i < av.size(); ++i) {
      const int l = std::clamp(chart.label(i, j), 0, 5);
      os << "<rect x=\"" << num(f.px(av[i] - da / 2)) << "\" y=\"" << num(f.py(bv[j] + db / 2))
         << "\" width=\"" << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"" << fills[l]
         << "\"><title>" << l << "</title></rect>\n";
    }
  }
  for (const auto& line : chart.boundaries) {
    if (line.points.size() < 2) continue;
    const bool dashed = line.name == "single_delay_boundary";
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\""
       << (dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (const auto& p : line.points) os << num(f.px(p.first)) << ',' << num(f.py(p.second)) << ' ';
    os << "\"/>\n";
  }
  os << "<circle cx=\"" << num(f.px(chart.intersection.first)) << "\" cy=\""
     << num(f.py(chart.intersection.second)) << "\" r=\"3\" fill=\"black\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace ddestab
