#include "gmclab/geometry.hpp"

#include <cmath>

namespace gmclab {

double distance(const Point& x, const Point& y, int d) {
  if (d == 1) return std::abs(x[0] - y[0]);
  return std::hypot(x[0] - y[0], x[1] - y[1]);
}

Box Box::unit(int d) { return Box{d, {0.0, 0.0}, {1.0, 1.0}}; }

Box Box::interval(double lo, double hi) { return Box{1, {lo, 0.0}, {hi, 1.0}}; }

Box Box::square(double x0, double y0, double x1, double y1) {
  return Box{2, {x0, y0}, {x1, y1}};
}

Box Box::ball(const Point& center, double radius, int d) {
  Box b{d, {center[0] - radius, center[1] - radius}, {center[0] + radius, center[1] + radius}};
  if (d == 1) {
    b.lo[1] = 0.0;
    b.hi[1] = 1.0;
  }
  return b;
}

double Box::volume() const {
  double v = hi[0] - lo[0];
  if (d == 2) v *= hi[1] - lo[1];
  return v > 0.0 ? v : 0.0;
}

bool Box::contains(const Point& p) const {
  for (int a = 0; a < d; ++a) {
    if (!(p[a] >= lo[a] && p[a] < hi[a])) return false;
  }
  return true;
}

bool Box::intersects(const Box& other) const {
  for (int a = 0; a < d; ++a) {
    if (hi[a] <= other.lo[a] || other.hi[a] <= lo[a]) return false;
  }
  return true;
}

bool Box::within(const Box& other) const {
  for (int a = 0; a < d; ++a) {
    if (lo[a] < other.lo[a] || hi[a] > other.hi[a]) return false;
  }
  return true;
}

}  // namespace gmclab
