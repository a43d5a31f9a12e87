#include "sggmech/kernels.hpp"

#include <cmath>
#include <limits>

#include "sggmech/parallel.hpp"

namespace sggmech::kernels {

double logistic(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

inline double row_max_dot(const Matrix& rows, std::size_t i, const Matrix& keys) {
  const auto r = rows.row(i);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < keys.rows(); ++j) {
    const double s = dot(r, keys.row(j));
    if (s > best) best = s;
  }
  return best;
}

inline double step1_row(const Matrix& visual, std::size_t i, const Matrix& objects, const Matrix& relations,
                        double gamma) {
  const double so = logistic(row_max_dot(visual, i, objects));
  const double sr = logistic(row_max_dot(visual, i, relations));
  return std::pow(so, gamma) * std::pow(sr, 1.0 - gamma);
}

std::vector<double> row_norms(const Matrix& v) {
  std::vector<double> n(v.rows());
  for (std::size_t i = 0; i < v.rows(); ++i) n[i] = std::sqrt(dot(v.row(i), v.row(i)));
  return n;
}

inline void cosine_row(const Matrix& v, const std::vector<double>& norms, std::size_t i, Matrix& out) {
  for (std::size_t j = 0; j < v.rows(); ++j) {
    const double denom = norms[i] * norms[j];
    if (denom <= 0.0) {
      out(i, j) = 0.0;
    } else if (i == j) {
      out(i, j) = 1.0;
    } else {
      out(i, j) = dot(v.row(i), v.row(j)) / denom;
    }
  }
}

}  // namespace

namespace serial {

std::vector<double> max_similarity(const Matrix& rows, const Matrix& keys) {
  std::vector<double> out(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = row_max_dot(rows, i, keys);
  return out;
}

std::vector<double> step1_scores(const Matrix& visual, const Matrix& objects, const Matrix& relations, double gamma) {
  std::vector<double> out(visual.rows());
  for (std::size_t i = 0; i < visual.rows(); ++i) out[i] = step1_row(visual, i, objects, relations, gamma);
  return out;
}

Matrix cosine_similarity(const Matrix& vectors) {
  const auto norms = row_norms(vectors);
  Matrix out(vectors.rows(), vectors.rows());
  for (std::size_t i = 0; i < vectors.rows(); ++i) cosine_row(vectors, norms, i, out);
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<double> max_similarity(const Matrix& rows, const Matrix& keys) {
  const auto n = static_cast<std::ptrdiff_t>(rows.rows());
  std::vector<double> out(rows.rows());
#pragma omp parallel for schedule(static) num_threads(worker_threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = row_max_dot(rows, static_cast<std::size_t>(i), keys);
  }
  return out;
}

std::vector<double> step1_scores(const Matrix& visual, const Matrix& objects, const Matrix& relations, double gamma) {
  const auto n = static_cast<std::ptrdiff_t>(visual.rows());
  std::vector<double> out(visual.rows());
#pragma omp parallel for schedule(static) num_threads(worker_threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = step1_row(visual, static_cast<std::size_t>(i), objects, relations, gamma);
  }
  return out;
}

Matrix cosine_similarity(const Matrix& vectors) {
  const auto norms = row_norms(vectors);
  Matrix out(vectors.rows(), vectors.rows());
  const auto n = static_cast<std::ptrdiff_t>(vectors.rows());
#pragma omp parallel for schedule(static) num_threads(worker_threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) cosine_row(vectors, norms, static_cast<std::size_t>(i), out);
  return out;
}

}  // namespace parallel

}  // namespace sggmech::kernels
