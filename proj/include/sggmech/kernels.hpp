#pragma once

#include <vector>

#include "sggmech/matrix.hpp"

// Row-wise scoring kernels. `serial` is the reference; `parallel` splits rows
// across OpenMP threads. Every row is reduced independently in the same order,
// so both produce bit-identical results.
namespace sggmech::kernels {

namespace serial {
// out[i] = max_j rows_i . keys_j
std::vector<double> max_similarity(const Matrix& rows, const Matrix& keys);
// out[i] = logistic(max obj sim)^gamma * logistic(max rel sim)^(1-gamma)
std::vector<double> step1_scores(const Matrix& visual, const Matrix& objects, const Matrix& relations, double gamma);
// Cosine similarity of every row pair; zero-norm rows give 0 entries.
Matrix cosine_similarity(const Matrix& vectors);
}  // namespace serial

namespace parallel {
std::vector<double> max_similarity(const Matrix& rows, const Matrix& keys);
std::vector<double> step1_scores(const Matrix& visual, const Matrix& objects, const Matrix& relations, double gamma);
Matrix cosine_similarity(const Matrix& vectors);
}  // namespace parallel

double logistic(double x) noexcept;

}  // namespace sggmech::kernels
