#include "sggmech/query_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sggmech/error.hpp"
#include "sggmech/kernels.hpp"

namespace sggmech {

namespace {

void require_dims(const TokenMatrix& visual, const TokenMatrix& other, const char* name) {
  if (visual.dim() != other.dim()) {
    throw Error(ErrorCode::DimMismatch, std::string(name) + " dim " + std::to_string(other.dim()) +
                                            " != visual dim " + std::to_string(visual.dim()));
  }
}

void require_rows(const TokenMatrix& m, const char* name) {
  if (m.rows() == 0) throw Error(ErrorCode::EmptyInput, std::string(name) + " has no rows");
}

bool ranks_before(double sa, std::size_t a, double sb, std::size_t b) {
  if (sa != sb) return sa > sb;
  return a < b;
}

}  // namespace

std::vector<double> step1_scores(const TokenMatrix& visual, const TokenMatrix& object_classes,
                                 const TokenMatrix& relation_classes, double gamma_balance) {
  require_dims(visual, object_classes, "object class tokens");
  require_dims(visual, relation_classes, "relation class tokens");
  require_rows(object_classes, "object class tokens");
  require_rows(relation_classes, "relation class tokens");
  if (!(gamma_balance >= 0.0 && gamma_balance <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "gamma_balance must be in [0,1]");
  }
  return kernels::parallel::step1_scores(visual.values, object_classes.values, relation_classes.values,
                                         gamma_balance);
}

std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k) {
  if (k < 1 || k > scores.size()) {
    throw Error(ErrorCode::KOutOfRange,
                "K=" + std::to_string(k) + " outside [1, " + std::to_string(scores.size()) + "]");
  }
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) { return ranks_before(scores[a], a, scores[b], b); });
  idx.resize(k);
  return idx;
}

std::vector<double> interaction_scores(const TokenMatrix& visual, const TokenMatrix& interactions) {
  if (interactions.rows() == 0) throw Error(ErrorCode::EmptyInteractionSet, "no interaction tokens");
  require_dims(visual, interactions, "interaction tokens");
  return kernels::parallel::max_similarity(visual.values, interactions.values);
}

std::vector<double> object_scores(const TokenMatrix& visual, const TokenMatrix& object_classes) {
  require_dims(visual, object_classes, "object class tokens");
  require_rows(object_classes, "object class tokens");
  return kernels::parallel::max_similarity(visual.values, object_classes.values);
}

QueryIndexSet step1_select(const TokenMatrix& visual, const TokenMatrix& object_classes,
                           const TokenMatrix& relation_classes, std::size_t k, double gamma_balance) {
  const auto scores = step1_scores(visual, object_classes, relation_classes, gamma_balance);
  return QueryIndexSet{top_k(scores, k), 0};
}

QueryIndexSet step2_select(const TokenMatrix& visual, const TokenMatrix& interactions,
                           const TokenMatrix& object_classes, std::size_t k, std::size_t l, double gamma_balance,
                           const TokenMatrix& relation_classes) {
  if (k < 1 || k > visual.rows() || l > k) {
    throw Error(ErrorCode::KOutOfRange, "need L <= K <= N_v with K >= 1 (K=" + std::to_string(k) +
                                            ", L=" + std::to_string(l) + ", N_v=" + std::to_string(visual.rows()) +
                                            ")");
  }
  if (interactions.rows() == 0) {
    return step1_select(visual, object_classes, relation_classes, k, gamma_balance);
  }
  require_dims(visual, interactions, "interaction tokens");
  require_dims(visual, object_classes, "object class tokens");

  QueryIndexSet out;
  if (l > 0) out.indices = top_k(interaction_scores(visual, interactions), l);
  out.interaction_count = out.indices.size();

  if (k > l) {
    const auto obj = object_scores(visual, object_classes);
    std::vector<bool> taken(visual.rows(), false);
    for (auto i : out.indices) taken[i] = true;
    std::vector<std::size_t> pool;
    pool.reserve(visual.rows() - l);
    for (std::size_t i = 0; i < visual.rows(); ++i) {
      if (!taken[i]) pool.push_back(i);
    }
    const auto rest = static_cast<std::ptrdiff_t>(k - l);
    std::partial_sort(pool.begin(), pool.begin() + rest, pool.end(),
                      [&](std::size_t a, std::size_t b) { return ranks_before(obj[a], a, obj[b], b); });
    out.indices.insert(out.indices.end(), pool.begin(), pool.begin() + rest);
  }
  return out;
}

QueryBudget scaled_budget(std::size_t k_max, std::size_t l_max, std::size_t n_visual) noexcept {
  QueryBudget b;
  b.k = std::min(k_max, n_visual);
  b.l = std::min(l_max, b.k);
  return b;
}

}  // namespace sggmech
