#include "sggmech/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sggmech/error.hpp"
#include "sggmech/losses.hpp"

namespace sggmech {

double pair_cost(const QueryPrediction& q, const GroundTruthObject& g, const MatchWeights& w, double image_width,
                 double image_height) {
  if (g.class_id < 0 || static_cast<std::size_t>(g.class_id) >= q.class_probs.size()) {
    throw Error(ErrorCode::UnknownClass, "class " + std::to_string(g.class_id) + " outside probability vector of size " +
                                             std::to_string(q.class_probs.size()));
  }
  if (!(image_width > 0.0) || !(image_height > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "image extent must be positive");
  }
  const double p = q.class_probs[static_cast<std::size_t>(g.class_id)];
  const double l1 = std::abs(q.box.x1 - g.box.x1) / image_width + std::abs(q.box.y1 - g.box.y1) / image_height +
                    std::abs(q.box.x2 - g.box.x2) / image_width + std::abs(q.box.y2 - g.box.y2) / image_height;
  return w.cls * (1.0 - p) + w.l1 * l1 + w.giou * giou_loss(q.box, g.box);
}

Matrix cost_matrix(const std::vector<QueryPrediction>& queries, const std::vector<GroundTruthObject>& gts,
                   const MatchWeights& w, double image_width, double image_height) {
  Matrix c(queries.size(), gts.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    for (std::size_t j = 0; j < gts.size(); ++j) c(i, j) = pair_cost(queries[i], gts[j], w, image_width, image_height);
  }
  return c;
}

double assignment_cost(const Matrix& cost, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  double total = 0.0;
  for (const auto& [q, g] : pairs) total += cost(q, g);
  return total;
}

namespace {

void require_finite(const Matrix& cost) {
  for (double v : cost.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteCost, "cost matrix has non-finite entries");
  }
}

struct SquareSolution {
  std::vector<std::size_t> col_of_row;
  std::vector<double> u;  // row potentials
  std::vector<double> v;  // column potentials
};

// Shortest augmenting path Hungarian method on a square matrix.
SquareSolution solve_square(const Matrix& a) {
  const std::size_t n = a.rows();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  SquareSolution s;
  s.col_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    if (p[j] != 0) s.col_of_row[p[j] - 1] = j - 1;
  }
  s.u.assign(u.begin() + 1, u.end());
  s.v.assign(v.begin() + 1, v.end());
  return s;
}

// Square problem with zero-cost padding: padded columns mean "query unmatched",
// padded rows absorb surplus ground truths. Padded columns sort after real ones.
class PaddedProblem {
 public:
  explicit PaddedProblem(const Matrix& cost)
      : cost_(cost), rows_(cost.rows()), cols_(cost.cols()), n_(std::max(rows_, cols_)), square_(n_, n_, 0.0) {
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) square_(i, j) = cost(i, j);
    }
  }

  std::size_t size() const { return n_; }
  const Matrix& square() const { return square_; }

  // Solves with rows [0, fixed.size()) pinned to the given columns.
  std::vector<std::size_t> solve_with_prefix(const std::vector<std::size_t>& fixed) const {
    std::vector<char> col_taken(n_, 0);
    for (auto c : fixed) col_taken[c] = 1;
    std::vector<std::size_t> free_cols;
    for (std::size_t j = 0; j < n_; ++j) {
      if (!col_taken[j]) free_cols.push_back(j);
    }
    const std::size_t m = n_ - fixed.size();
    std::vector<std::size_t> full(fixed);
    full.resize(n_);
    if (m > 0) {
      Matrix sub(m, m);
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < m; ++c) sub(r, c) = square_(fixed.size() + r, free_cols[c]);
      }
      const auto sol = solve_square(sub);
      for (std::size_t r = 0; r < m; ++r) full[fixed.size() + r] = free_cols[sol.col_of_row[r]];
    }
    return full;
  }

  std::vector<std::pair<std::size_t, std::size_t>> real_pairs(const std::vector<std::size_t>& col_of_row) const {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (col_of_row[i] < cols_) pairs.emplace_back(i, col_of_row[i]);
    }
    return pairs;
  }

  double total(const std::vector<std::size_t>& col_of_row) const { return assignment_cost(cost_, real_pairs(col_of_row)); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  const Matrix& cost_;
  std::size_t rows_;
  std::size_t cols_;
  std::size_t n_;
  Matrix square_;
};

}  // namespace

MatchAssignment hungarian(const Matrix& cost) {
  require_finite(cost);
  MatchAssignment out;
  if (cost.rows() == 0 || cost.cols() == 0) return out;

  const PaddedProblem problem(cost);
  const std::size_t n = problem.size();
  const auto first = solve_square(problem.square());
  std::vector<std::size_t> best = first.col_of_row;
  double best_total = problem.total(best);

  // Complementary slackness: every optimal assignment uses only edges that are
  // tight under the optimal potentials, so only those can displace the
  // current choice. The final decision compares recomputed totals exactly.
  double scale = 1.0;
  for (double c : cost.data()) scale = std::max(scale, std::abs(c));
  const double tight_tol = 1e-9 * scale * static_cast<double>(n);
  auto tight = [&](std::size_t i, std::size_t j) {
    return problem.square()(i, j) - first.u[i] - first.v[j] <= tight_tol;
  };

  std::vector<std::size_t> fixed;
  for (std::size_t i = 0; i < problem.rows(); ++i) {
    const std::size_t current = best[i];
    // Lexicographic rank of a column for row i: real columns ascending, then
    // the lowest free padded column standing in for "unmatched".
    std::vector<char> used(n, 0);
    for (auto c : fixed) used[c] = 1;
    std::vector<std::size_t> candidates;
    for (std::size_t j = 0; j < problem.cols(); ++j) {
      if (!used[j]) candidates.push_back(j);
    }
    for (std::size_t j = problem.cols(); j < n; ++j) {
      if (!used[j]) {
        candidates.push_back(j);
        break;
      }
    }
    const bool current_is_pad = current >= problem.cols();
    for (std::size_t j : candidates) {
      if (j == current || (current_is_pad && j >= problem.cols())) break;
      if (!tight(i, j)) continue;
      auto trial_fixed = fixed;
      trial_fixed.push_back(j);
      auto trial = problem.solve_with_prefix(trial_fixed);
      const double t = problem.total(trial);
      if (t <= best_total) {
        best = std::move(trial);
        best_total = t;
        break;
      }
    }
    fixed.push_back(best[i]);
  }

  out.pairs = problem.real_pairs(best);
  out.total_cost = assignment_cost(cost, out.pairs);
  return out;
}

MatchAssignment brute_force_assignment(const Matrix& cost) {
  require_finite(cost);
  const std::size_t rows = cost.rows();
  const std::size_t cols = cost.cols();
  MatchAssignment out;
  if (rows == 0 || cols == 0) return out;
  if (std::min(rows, cols) > kBruteForceMaxDim) {
    throw Error(ErrorCode::TooLarge, "brute force limited to min dimension " + std::to_string(kBruteForceMaxDim));
  }
  double count = 1.0;
  for (std::size_t k = 0; k < std::min(rows, cols); ++k) count *= static_cast<double>(std::max(rows, cols) - k);
  if (count > 5e8) throw Error(ErrorCode::TooLarge, "too many injections to enumerate");

  const std::size_t skips_allowed = rows > cols ? rows - cols : 0;
  std::vector<char> col_used(cols, 0);
  std::vector<std::pair<std::size_t, std::size_t>> current;
  double best_total = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::size_t, std::size_t>> best_pairs;

  // Rows are visited in order with columns ascending before "unmatched", so
  // the first minimum found is the lexicographically smallest one.
  auto recurse = [&](auto&& self, std::size_t row, std::size_t skips, double partial) -> void {
    if (row == rows) {
      if (partial < best_total) {
        best_total = partial;
        best_pairs = current;
      }
      return;
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (col_used[j]) continue;
      col_used[j] = 1;
      current.emplace_back(row, j);
      self(self, row + 1, skips, partial + cost(row, j));
      current.pop_back();
      col_used[j] = 0;
    }
    if (skips < skips_allowed) self(self, row + 1, skips + 1, partial);
  };
  recurse(recurse, 0, 0, 0.0);

  out.pairs = std::move(best_pairs);
  out.total_cost = assignment_cost(cost, out.pairs);
  return out;
}

}  // namespace sggmech
