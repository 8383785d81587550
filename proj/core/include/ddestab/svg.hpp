#pragma once

#include <string>

#include "ddestab/chart.hpp"
#include "ddestab/simulator.hpp"

namespace ddestab {

/// Line plot of every trace column against t.
std::string trace_svg(const Trace& trace, const std::string& title = "");

/// Region heatmap with the boundary polylines drawn on top.
std::string chart_svg(const ChartResult& chart);

}  // namespace ddestab
