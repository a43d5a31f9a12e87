#include "sggmech/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "sggmech/error.hpp"

namespace sggmech {

void validate(const BoundingBox& b) {
  if (!std::isfinite(b.x1) || !std::isfinite(b.y1) || !std::isfinite(b.x2) || !std::isfinite(b.y2)) {
    throw Error(ErrorCode::InvalidArgument, "box has non-finite coordinates");
  }
  if (b.x1 > b.x2 || b.y1 > b.y2) {
    throw Error(ErrorCode::InvalidArgument, "box corners inverted");
  }
  if (!(b.score >= 0.0 && b.score <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "box score outside [0,1]");
  }
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double iw = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
  const double ih = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
  return iw * ih;
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

GiouTerms giou_terms(const BoundingBox& a, const BoundingBox& b) noexcept {
  GiouTerms t;
  t.inter = intersection_area(a, b);
  t.uni = a.area() + b.area() - t.inter;
  const double ew = std::max(a.x2, b.x2) - std::min(a.x1, b.x1);
  const double eh = std::max(a.y2, b.y2) - std::min(a.y1, b.y1);
  t.enclosing = ew * eh;
  return t;
}

}  // namespace sggmech
