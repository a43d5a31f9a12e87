#include "doctest.h"
#include "sggmech/error.hpp"
#include "sggmech/geometry.hpp"
#include "support.hpp"

using namespace sggmech;

namespace {

// Counts unit cells covered by integer-cornered boxes.
struct CellCount {
  int inter = 0, uni = 0, enclosing = 0;
};

CellCount rasterize(const BoundingBox& a, const BoundingBox& b) {
  CellCount c;
  const int lo_x = static_cast<int>(std::min(a.x1, b.x1)), hi_x = static_cast<int>(std::max(a.x2, b.x2));
  const int lo_y = static_cast<int>(std::min(a.y1, b.y1)), hi_y = static_cast<int>(std::max(a.y2, b.y2));
  for (int x = lo_x; x < hi_x; ++x) {
    for (int y = lo_y; y < hi_y; ++y) {
      const double cx = x + 0.5, cy = y + 0.5;
      const bool in_a = cx > a.x1 && cx < a.x2 && cy > a.y1 && cy < a.y2;
      const bool in_b = cx > b.x1 && cx < b.x2 && cy > b.y1 && cy < b.y2;
      c.inter += in_a && in_b;
      c.uni += in_a || in_b;
      ++c.enclosing;
    }
  }
  return c;
}

BoundingBox integer_box(Rng& rng) {
  const double x = static_cast<double>(rng.below(12)), y = static_cast<double>(rng.below(12));
  const double w = static_cast<double>(rng.below(8)), h = static_cast<double>(rng.below(8));
  return make_box(x, y, x + w, y + h);
}

}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("iou fixtures") {
    CHECK(iou(make_box(0, 0, 1, 1), make_box(0, 0, 1, 1)) == 1.0);
    CHECK(iou(make_box(0, 0, 1, 1), make_box(5, 5, 6, 6)) == 0.0);
    CHECK(iou(make_box(0, 0, 2, 2), make_box(1, 1, 3, 3)) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
  }

  TEST_CASE("degenerate boxes give zero rather than nan") {
    CHECK(iou(make_box(1, 1, 1, 1), make_box(1, 1, 1, 1)) == 0.0);
    CHECK(iou(make_box(0, 0, 0, 5), make_box(0, 0, 3, 3)) == 0.0);
  }

  TEST_CASE("giou_terms fixtures") {
    auto t = giou_terms(make_box(0, 0, 1, 1), make_box(0, 0, 1, 1));
    CHECK(t.inter == 1.0);
    CHECK(t.uni == 1.0);
    CHECK(t.enclosing == 1.0);
    t = giou_terms(make_box(0, 0, 1, 1), make_box(2, 0, 3, 1));
    CHECK(t.inter == 0.0);
    CHECK(t.uni == 2.0);
    CHECK(t.enclosing == 3.0);
    t = giou_terms(make_box(0, 0, 2, 2), make_box(1, 1, 3, 3));
    CHECK(t.inter == 1.0);
    CHECK(t.uni == 7.0);
    CHECK(t.enclosing == 9.0);
  }

  TEST_CASE("areas match a cell-count oracle on integer boxes") {
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
      const auto a = integer_box(rng), b = integer_box(rng);
      const auto t = giou_terms(a, b);
      const auto c = rasterize(a, b);
      REQUIRE(t.inter == c.inter);
      REQUIRE(t.uni == c.uni);
      REQUIRE(t.enclosing == c.enclosing);
      const double expected = c.uni > 0 ? static_cast<double>(c.inter) / c.uni : 0.0;
      REQUIRE(iou(a, b) == doctest::Approx(expected).epsilon(1e-14));
    }
  }

  TEST_CASE("iou and area properties on random boxes") {
    Rng rng(12);
    for (int i = 0; i < 2000; ++i) {
      const auto a = testsupport::random_box(rng), b = testsupport::random_box(rng);
      const auto t = giou_terms(a, b);
      REQUIRE(iou(a, b) == iou(b, a));
      REQUIRE(iou(a, b) >= 0.0);
      REQUIRE(iou(a, b) <= 1.0);
      REQUIRE(t.inter >= 0.0);
      REQUIRE(t.inter <= std::min(a.area(), b.area()));
      REQUIRE(t.uni == doctest::Approx(a.area() + b.area() - t.inter));
      REQUIRE(t.uni <= t.enclosing + 1e-12);
      if (a.area() > 0) REQUIRE(iou(a, a) == 1.0);
    }
  }

  TEST_CASE("validate rejects inverted and non-finite boxes") {
    CHECK_NOTHROW(validate(make_box(0, 0, 0, 0)));
    CHECK_THROWS_AS(validate(make_box(2, 0, 1, 1)), Error);
    CHECK_THROWS_AS(validate(make_box(0, 0, NAN, 1)), Error);
    auto b = make_box(0, 0, 1, 1);
    b.score = 1.5;
    CHECK_THROWS_AS(validate(b), Error);
  }
}
