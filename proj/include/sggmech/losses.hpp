#pragma once

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "sggmech/geometry.hpp"
#include "sggmech/matrix.hpp"

namespace sggmech {

struct QueryPrediction;

struct EdgeFeature {
  std::vector<double> vector;
  std::pair<std::size_t, std::size_t> pair{0, 0};
  bool is_negative = false;
};

struct LossWeights {
  double beta1 = 0.1;
  double beta2 = 0.5;
  double alpha_focal = 0.25;
  double gamma_focal = 2.0;
};

// ---------------------------------------------------------------------------
// Box regression

// Mean over boxes of the 4-coordinate L1 distance.
double l1_box_loss(std::span<const BoundingBox> pred, std::span<const BoundingBox> gt);
// d/d(pred corners), one 4-vector per box. Zero differences get subgradient 0.
std::vector<std::array<double, 4>> l1_box_loss_grad(std::span<const BoundingBox> pred,
                                                    std::span<const BoundingBox> gt);

// 1 - inter/union + (enclosing - union)/enclosing, with 0/0 taken as 0.
double giou_loss(const BoundingBox& pred, const BoundingBox& gt);
// d/d(x1, y1, x2, y2) of the predicted box.
std::array<double, 4> giou_loss_grad(const BoundingBox& pred, const BoundingBox& gt);

// ---------------------------------------------------------------------------
// Classification

// -alpha (1 - y)^gamma ln(y) for the true-class probability y in (0, 1].
double focal_loss(double y, double alpha, double gamma);
double focal_loss_grad(double y, double alpha, double gamma);

// Mean binary cross-entropy over every entry; predictions in (0,1), labels in [0,1].
double bce_relation_loss(const Matrix& pred, const Matrix& gt);
Matrix bce_relation_loss_grad(const Matrix& pred, const Matrix& gt);

// ---------------------------------------------------------------------------
// Edge features and distillation

// concat(feature_i, feature_j) with `global_rel` added to each half when given.
std::vector<EdgeFeature> build_edge_features(const std::vector<QueryPrediction>& queries,
                                             std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                             const std::optional<std::vector<double>>& global_rel = std::nullopt);

// Edges whose is_negative flag is set, in input order.
std::vector<EdgeFeature> negatives_only(const std::vector<EdgeFeature>& edges);

// Stacks edge vectors as matrix rows; all edges must share a dimension.
Matrix edge_matrix(const std::vector<EdgeFeature>& edges);

// Mean L1 distance between aligned student and teacher edges.
double vrd_loss(const std::vector<EdgeFeature>& student, const std::vector<EdgeFeature>& teacher);
double vrd_loss(const Matrix& student, const Matrix& teacher);
Matrix vrd_loss_grad(const Matrix& student, const Matrix& teacher);

// Pairwise cosine similarities; rows with zero norm yield 0 entries.
Matrix cosine_sim_matrix(const std::vector<EdgeFeature>& edges);
Matrix cosine_sim_matrix(const Matrix& edges);

// ||M_S - M_T||_F^2 / |N|^2 over cosine structure matrices.
double rrd_loss(const std::vector<EdgeFeature>& student, const std::vector<EdgeFeature>& teacher);
double rrd_loss(const Matrix& student, const Matrix& teacher);
Matrix rrd_loss_grad(const Matrix& student, const Matrix& teacher);

struct LossComponents {
  double reg = 0.0;
  double giou = 0.0;
  double obj = 0.0;
  double rel = 0.0;
  double vrd = 0.0;
  double rrd = 0.0;
};

// reg + giou + obj + rel + beta1 * vrd + beta2 * rrd
double total_loss(const LossComponents& c, const LossWeights& w);

}  // namespace sggmech
