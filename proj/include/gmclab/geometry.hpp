#pragma once

#include <array>
#include <cstddef>

namespace gmclab {

/// Points carry two coordinates; in d = 1 only the first is used.
using Point = std::array<double, 2>;

double distance(const Point& x, const Point& y, int d);

/// Axis-aligned box, half-open [lo, hi) on every active axis.
struct Box {
  int d = 1;
  Point lo{0.0, 0.0};
  Point hi{1.0, 1.0};

  static Box unit(int d);
  static Box interval(double lo, double hi);
  static Box square(double x0, double y0, double x1, double y1);
  /// Ball of the sup-norm (an interval in d = 1, a square in d = 2).
  static Box ball(const Point& center, double radius, int d);

  double volume() const;
  bool contains(const Point& p) const;
  bool intersects(const Box& other) const;
  bool within(const Box& other) const;
};

}  // namespace gmclab
