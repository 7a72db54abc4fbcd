#pragma once

#include <string>
#include <vector>

#include "etbc/simulator.hpp"

namespace etbc {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool points = false;  ///< draw markers instead of a polyline
};

struct Chart {
  std::string title;
  std::string x_label = "t [s]";
  std::string y_label;
  std::vector<Series> series;
  std::vector<double> vlines;  ///< event markers
};

enum class Figure { states, etm, estimates, input, dwell };

/// Throws std::invalid_argument for an unknown name.
Figure parse_figure(const std::string& name);

/// Builds a chart from logged rows and event records only.
Chart make_chart(Figure fig, const std::vector<TrajectoryRow>& rows, const TrajectoryLog& events);

std::string render_svg(const Chart& chart, int width = 760, int height = 420);

}  // namespace etbc
