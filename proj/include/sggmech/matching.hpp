#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sggmech/geometry.hpp"
#include "sggmech/matrix.hpp"

namespace sggmech {

struct QueryPrediction {
  BoundingBox box;
  std::vector<double> class_probs;
  std::optional<std::vector<double>> feature;
};

struct GroundTruthObject {
  int class_id = -1;
  BoundingBox box;
};

struct MatchWeights {
  double cls = 2.0;
  double l1 = 5.0;
  double giou = 2.0;
};

struct MatchAssignment {
  // Sorted by query index.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total_cost = 0.0;
};

// cls * (1 - p[class]) + l1 * ||q - g||_1 + giou * giou_loss(q, g). L1 uses
// corners divided by the image extent; GIoU is scale-invariant.
double pair_cost(const QueryPrediction& q, const GroundTruthObject& g, const MatchWeights& w = {},
                 double image_width = 1.0, double image_height = 1.0);

Matrix cost_matrix(const std::vector<QueryPrediction>& queries, const std::vector<GroundTruthObject>& gts,
                   const MatchWeights& w = {}, double image_width = 1.0, double image_height = 1.0);

// Sum of cost(q, g) over pairs in the given order.
double assignment_cost(const Matrix& cost, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

// Minimum-cost injection of the smaller side into the larger. Among minimizers
// the pair list (ordered by query) is lexicographically smallest.
MatchAssignment hungarian(const Matrix& cost);

// Exhaustive reference with the same tie rule; min(rows, cols) <= 9.
MatchAssignment brute_force_assignment(const Matrix& cost);

inline constexpr std::size_t kBruteForceMaxDim = 9;

}  // namespace sggmech
