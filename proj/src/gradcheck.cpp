#include "sggmech/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "sggmech/error.hpp"
#include "sggmech/geometry.hpp"
#include "sggmech/losses.hpp"
#include "sggmech/rng.hpp"

namespace sggmech {

double relative_error(double analytic, double numeric) noexcept {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport finite_diff_grad_check(const ScalarFn& f, const GradientFn& grad, std::span<const double> point,
                                       double step, double tolerance, const KinkFn& near_kink) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
  GradCheckReport r;
  r.points = 1;
  r.tolerance = tolerance;
  const auto analytic = grad(point);
  if (analytic.size() != point.size()) throw Error(ErrorCode::LengthMismatch, "gradient length differs from point");
  std::vector<double> x(point.begin(), point.end());
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (near_kink && near_kink(point, k, step)) {
      ++r.skipped;
      continue;
    }
    const double orig = x[k];
    x[k] = orig + step;
    const double fp = f(x);
    x[k] = orig - step;
    const double fm = f(x);
    x[k] = orig;
    const double numeric = (fp - fm) / (2.0 * step);
    r.max_rel_error = std::max(r.max_rel_error, relative_error(analytic[k], numeric));
    ++r.compared;
  }
  r.passed = r.max_rel_error <= tolerance;
  return r;
}

void merge_into(GradCheckReport& total, const GradCheckReport& part) {
  total.points += part.points;
  total.compared += part.compared;
  total.skipped += part.skipped;
  total.max_rel_error = std::max(total.max_rel_error, part.max_rel_error);
  total.passed = total.compared > 0 && total.max_rel_error <= total.tolerance;
}

namespace {

BoundingBox box_of(std::span<const double> x) { return make_box(x[0], x[1], x[2], x[3]); }

BoundingBox random_unit_box(Rng& rng) {
  const double w = rng.uniform(0.05, 0.5);
  const double h = rng.uniform(0.05, 0.5);
  const double x1 = rng.uniform(0.0, 1.0 - w);
  const double y1 = rng.uniform(0.0, 1.0 - h);
  return make_box(x1, y1, x1 + w, y1 + h);
}

GradCheckReport start(const std::string& name, double tolerance) {
  GradCheckReport r;
  r.name = name;
  r.tolerance = tolerance;
  return r;
}

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.normal();
  return m;
}

GradCheckReport check_giou(Rng& rng, std::size_t points, double tol) {
  auto total = start("giou", tol);
  constexpr double h = 1e-6;
  for (std::size_t p = 0; p < points; ++p) {
    const BoundingBox gt = random_unit_box(rng);
    // Half the points start near the target so the overlap branch is exercised.
    BoundingBox pred = random_unit_box(rng);
    if (p % 2 == 0) {
      pred = make_box(gt.x1 + rng.uniform(-0.04, 0.04), gt.y1 + rng.uniform(-0.04, 0.04),
                      gt.x2 + rng.uniform(-0.04, 0.04), gt.y2 + rng.uniform(-0.04, 0.04));
    }
    const auto x = pred.corners();
    const auto g = gt.corners();
    auto f = [&](std::span<const double> v) { return giou_loss(box_of(v), gt); };
    auto df = [&](std::span<const double> v) {
      const auto a = giou_loss_grad(box_of(v), gt);
      return std::vector<double>(a.begin(), a.end());
    };
    // Every max/min switches where a coordinate meets a target coordinate on the same axis.
    auto kink = [&](std::span<const double> v, std::size_t k, double step) {
      const std::size_t axis = k % 2;
      return std::abs(v[k] - g[axis]) < 2.0 * step || std::abs(v[k] - g[axis + 2]) < 2.0 * step;
    };
    merge_into(total, finite_diff_grad_check(f, df, x, h, tol, kink));
  }
  return total;
}

GradCheckReport check_focal(Rng& rng, std::size_t points, double tol) {
  auto total = start("focal", tol);
  for (std::size_t p = 0; p < points; ++p) {
    const double alpha = rng.uniform(0.1, 1.0);
    const double gamma = rng.uniform(0.0, 3.0);
    const std::vector<double> x{rng.uniform(0.02, 0.98)};
    auto f = [&](std::span<const double> v) { return focal_loss(v[0], alpha, gamma); };
    auto df = [&](std::span<const double> v) { return std::vector<double>{focal_loss_grad(v[0], alpha, gamma)}; };
    merge_into(total, finite_diff_grad_check(f, df, x, 1e-6, tol));
  }
  return total;
}

GradCheckReport check_bce(Rng& rng, std::size_t points, double tol) {
  auto total = start("bce", tol);
  constexpr std::size_t rows = 3, cols = 4;
  for (std::size_t p = 0; p < points; ++p) {
    Matrix gt(rows, cols);
    for (double& y : gt.data()) y = rng.uniform() < 0.5 ? 0.0 : 1.0;
    std::vector<double> x(rows * cols);
    for (double& v : x) v = rng.uniform(0.02, 0.98);
    auto f = [&](std::span<const double> v) {
      return bce_relation_loss(Matrix(rows, cols, std::vector<double>(v.begin(), v.end())), gt);
    };
    auto df = [&](std::span<const double> v) {
      return bce_relation_loss_grad(Matrix(rows, cols, std::vector<double>(v.begin(), v.end())), gt).data();
    };
    merge_into(total, finite_diff_grad_check(f, df, x, 1e-6, tol));
  }
  return total;
}

GradCheckReport check_vrd(Rng& rng, std::size_t points, double tol) {
  auto total = start("vrd", tol);
  constexpr std::size_t n = 4, d = 6;
  for (std::size_t p = 0; p < points; ++p) {
    const Matrix teacher = random_matrix(rng, n, d);
    const Matrix student = random_matrix(rng, n, d);
    auto f = [&](std::span<const double> v) {
      return vrd_loss(Matrix(n, d, std::vector<double>(v.begin(), v.end())), teacher);
    };
    auto df = [&](std::span<const double> v) {
      return vrd_loss_grad(Matrix(n, d, std::vector<double>(v.begin(), v.end())), teacher).data();
    };
    auto kink = [&](std::span<const double> v, std::size_t k, double step) {
      return std::abs(v[k] - teacher.data()[k]) < 2.0 * step;
    };
    merge_into(total, finite_diff_grad_check(f, df, student.data(), 1e-6, tol, kink));
  }
  return total;
}

GradCheckReport check_rrd(Rng& rng, std::size_t points, double tol) {
  auto total = start("rrd", tol);
  constexpr std::size_t n = 4, d = 6;
  for (std::size_t p = 0; p < points; ++p) {
    const Matrix teacher = random_matrix(rng, n, d);
    const Matrix student = random_matrix(rng, n, d);
    auto f = [&](std::span<const double> v) {
      return rrd_loss(Matrix(n, d, std::vector<double>(v.begin(), v.end())), teacher);
    };
    auto df = [&](std::span<const double> v) {
      return rrd_loss_grad(Matrix(n, d, std::vector<double>(v.begin(), v.end())), teacher).data();
    };
    merge_into(total, finite_diff_grad_check(f, df, student.data(), 1e-5, tol));
  }
  return total;
}

}  // namespace

GradCheckReport quadratic_check(std::uint64_t seed, double step, double tolerance) {
  Rng rng(seed);
  constexpr std::size_t n = 8;
  std::vector<double> a(n), b(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.uniform(0.5, 2.0);
    b[i] = rng.uniform(-1.0, 1.0);
    x[i] = rng.uniform(-1.0, 1.0);
  }
  auto f = [&](std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * v[i] * v[i] + b[i] * v[i];
    return s;
  };
  auto df = [&](std::span<const double> v) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = 2.0 * a[i] * v[i] + b[i];
    return g;
  };
  auto r = finite_diff_grad_check(f, df, x, step, tolerance);
  r.name = "quadratic";
  return r;
}

std::vector<GradCheckReport> run_gradient_suite(std::uint64_t seed, std::size_t points, double tolerance) {
  std::vector<GradCheckReport> out;
  std::uint64_t stream = 0;
  auto next_rng = [&] { return Rng(substream_seed(seed, stream++)); };
  {
    auto rng = next_rng();
    out.push_back(check_giou(rng, points, tolerance));
  }
  {
    auto rng = next_rng();
    out.push_back(check_focal(rng, points, tolerance));
  }
  {
    auto rng = next_rng();
    out.push_back(check_bce(rng, points, tolerance));
  }
  {
    auto rng = next_rng();
    out.push_back(check_vrd(rng, points, tolerance));
  }
  {
    auto rng = next_rng();
    out.push_back(check_rrd(rng, points, tolerance));
  }
  out.push_back(quadratic_check(substream_seed(seed, stream++)));
  return out;
}

}  // namespace sggmech
