// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

/// @file report.hpp
/// @brief CSV and SVG output helpers.

#pragma once

#include <string>
#include <vector>

namespace holofredholm {

/// Shortest decimal text that reads back to the same double; "inf", "-inf"
/// and "nan" for non-finite values.
std::string format_double(double x);

/// Joins already formatted fields with commas and appends a newline.
std::string csv_line(const std::vector<std::string>& fields);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  /// Fitted slope shown in the legend; NaN hides it.
  double slope;
};

/// Log-log line plot.  Non-positive points are skipped.
std::string loglog_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series);

}  // namespace holofredholm
