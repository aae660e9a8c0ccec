#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stylelens/common.hpp"

namespace stylelens::cli {

struct ChartPoint {
  Month month;
  std::optional<double> value;
};

struct ChartSpec {
  std::string title;
  std::string y_label;
  std::vector<ChartPoint> points;  // increasing months
  std::optional<Month> event;
};

/// Maps months and values to pixel coordinates.
class ChartScale {
 public:
  static constexpr double kWidth = 720, kHeight = 360;
  static constexpr double kLeft = 64, kRight = 24, kTop = 40, kBottom = 56;

  ChartScale(int first_ordinal, int last_ordinal, double y_min, double y_max);
  static ChartScale fit(const ChartSpec& spec);

  double x(Month m) const;
  double y(double v) const;
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }

 private:
  int first_, last_;
  double y_min_, y_max_;
};

/// Line chart with one polyline per run of present values, a marker per
/// point and, when `event` lies in range, a dashed vertical line with
/// id="event-marker".
std::string line_chart(const ChartSpec& spec);

}  // namespace stylelens::cli
