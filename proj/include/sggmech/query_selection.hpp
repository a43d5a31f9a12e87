#pragma once

#include <span>
#include <vector>

#include "sggmech/token_matrix.hpp"

namespace sggmech {

struct QueryIndexSet {
  std::vector<std::size_t> indices;
  // indices[0, interaction_count) were ranked by interaction relevance.
  std::size_t interaction_count = 0;
};

// Relevance of each visual token to the object and relation vocabularies:
// logistic(max_j v.t_o)^gamma * logistic(max_j v.t_r)^(1-gamma). Always > 0.
std::vector<double> step1_scores(const TokenMatrix& visual, const TokenMatrix& object_classes,
                                 const TokenMatrix& relation_classes, double gamma_balance);

// Indices of the K largest scores, by descending score then ascending index.
std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k);

// max_j v_i . t_in_j (raw dot products).
std::vector<double> interaction_scores(const TokenMatrix& visual, const TokenMatrix& interactions);

// max_j v_i . t_o_j (raw dot products).
std::vector<double> object_scores(const TokenMatrix& visual, const TokenMatrix& object_classes);

QueryIndexSet step1_select(const TokenMatrix& visual, const TokenMatrix& object_classes,
                           const TokenMatrix& relation_classes, std::size_t k, double gamma_balance);

// Top-L by interaction relevance, then top-(K-L) by object relevance among the
// rest. An empty interaction set falls back to step1_select.
QueryIndexSet step2_select(const TokenMatrix& visual, const TokenMatrix& interactions,
                           const TokenMatrix& object_classes, std::size_t k, std::size_t l, double gamma_balance,
                           const TokenMatrix& relation_classes);

struct QueryBudget {
  std::size_t k = 0;
  std::size_t l = 0;
};

// K = min(k_max, n_visual), L = min(l_max, K).
QueryBudget scaled_budget(std::size_t k_max, std::size_t l_max, std::size_t n_visual) noexcept;

inline constexpr std::size_t kDefaultQueryCount = 900;
inline constexpr std::size_t kDefaultInteractionQueries = 200;

}  // namespace sggmech
