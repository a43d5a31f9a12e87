#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sggmech/text.hpp"
#include "sggmech/vocabulary.hpp"

namespace sggmech {

struct RankedPrediction {
  Triplet triplet;  // boxes required
  double score = 0.0;
  std::string image_id;
};

// Labels equal and both box pairs reach `iou_thresh`. Throws MissingBox.
bool triplet_match(const Triplet& pred, const Triplet& gt, double iou_thresh = 0.5);

// Prediction indices by descending score; ties keep input order.
std::vector<std::size_t> rank_order(const std::vector<RankedPrediction>& preds);

// Greedy one-to-one matching of the top-K predictions in rank order, each
// taking the first unconsumed matching GT. 1 when `gts` is empty.
double recall_at_k(const std::vector<RankedPrediction>& preds, const std::vector<Triplet>& gts, std::size_t k,
                   double iou_thresh = 0.5);

// recall_at_k per predicate present in `gts`, averaged.
double mean_recall_at_k(const std::vector<RankedPrediction>& preds, const std::vector<Triplet>& gts, std::size_t k,
                        double iou_thresh = 0.5);

// Best achievable recall over all one-to-one matchings between the top-K and
// the GTs. At most 8 GTs and 12 ranked candidates, else TooLarge.
double oracle_recall(const std::vector<RankedPrediction>& preds, const std::vector<Triplet>& gts, std::size_t k,
                     double iou_thresh = 0.5);

inline constexpr std::size_t kOracleMaxGts = 8;
inline constexpr std::size_t kOracleMaxK = 12;

enum class SplitSpec { JointBaseNovel, NovelObject, NovelRelation, BaseRelation, BaseObject };

std::string_view to_string(SplitSpec s);
// joint | novel_object | novel_relation | base_relation | base_object; else UnknownSplit.
SplitSpec split_from_string(std::string_view s);

// NovelObject: subject or object novel. BaseObject: both base.
std::vector<Triplet> split_filter(const std::vector<Triplet>& gts, const Vocabulary& vocab, SplitSpec split);

inline constexpr std::array<std::size_t, 3> kRecallKs{20, 50, 100};

struct SplitRecall {
  std::size_t gt_count = 0;
  std::size_t images = 0;
  std::array<double, 3> recall{0, 0, 0};
  std::array<double, 3> mean_recall{0, 0, 0};
};

struct RecallReport {
  std::map<std::string, SplitRecall> splits;
};

struct ImageEval {
  std::string image_id;
  std::vector<RankedPrediction> preds;
  std::vector<Triplet> gts;
};

// R@K averages per-image recall over images with at least one GT in the split;
// mR@K averages, per predicate, the per-image recall over images containing it.
RecallReport evaluate(const std::vector<ImageEval>& images, const Vocabulary& vocab,
                      const std::vector<SplitSpec>& splits, double iou_thresh = 0.5);

// {"triplet": {...}, "score": s, "image_id": id} per line.
std::vector<RankedPrediction> read_predictions_jsonl(const std::filesystem::path& path);
void write_predictions_jsonl(const std::filesystem::path& path, const std::vector<RankedPrediction>& preds);
// {"triplet": {...}, "image_id": id} per line.
std::vector<std::pair<std::string, Triplet>> read_ground_truth_jsonl(const std::filesystem::path& path);

// Groups predictions and GTs by image id, ordered by id.
std::vector<ImageEval> group_by_image(const std::vector<RankedPrediction>& preds,
                                      const std::vector<std::pair<std::string, Triplet>>& gts);

// split,metric,K,value
void write_recall_csv(const std::filesystem::path& path, const RecallReport& report);

}  // namespace sggmech
