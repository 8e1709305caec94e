#pragma once

namespace lightfc {

// Axis-aligned rectangle, (x, y) is the top-left corner. Units depend on context:
// pixels in frame space, fractions of the side in normalized search space.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double cx() const { return x + 0.5 * w; }
  double cy() const { return y + 0.5 * h; }
  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  bool valid() const { return w > 0.0 && h > 0.0; }
  bool operator==(const Box&) const = default;
};

// Center-size form used by the regression losses.
struct CenterBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool operator==(const CenterBox&) const = default;
};

inline CenterBox to_center(const Box& b) { return {b.cx(), b.cy(), b.w, b.h}; }
inline Box to_corner(const CenterBox& b) {
  return {b.cx - 0.5 * b.w, b.cy - 0.5 * b.h, b.w, b.h};
}

}  // namespace lightfc
