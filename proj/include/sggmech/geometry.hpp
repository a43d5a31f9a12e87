#pragma once

#include <array>

namespace sggmech {

// Axis-aligned box in corner form. score is a detection confidence in [0,1];
// category_id indexes the object vocabulary (-1 when unlabeled).
struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;
  double score = 1.0;
  int category_id = -1;

  double width() const noexcept { return x2 - x1; }
  double height() const noexcept { return y2 - y1; }
  double area() const noexcept { return width() * height(); }
  std::array<double, 4> corners() const noexcept { return {x1, y1, x2, y2}; }

  // Geometric equality only; score and category are ignored.
  bool same_extent(const BoundingBox& o) const noexcept {
    return x1 == o.x1 && y1 == o.y1 && x2 == o.x2 && y2 == o.y2;
  }
};

inline BoundingBox make_box(double x1, double y1, double x2, double y2) {
  return BoundingBox{x1, y1, x2, y2, 1.0, -1};
}

// Throws InvalidArgument when corners are inverted, non-finite, or score is outside [0,1].
void validate(const BoundingBox& b);

double intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept;

// Intersection over union; 0 when the union is empty.
double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

struct GiouTerms {
  double inter = 0.0;
  double uni = 0.0;
  double enclosing = 0.0;
};

// Intersection, union and smallest-enclosing-box areas.
GiouTerms giou_terms(const BoundingBox& a, const BoundingBox& b) noexcept;

}  // namespace sggmech
