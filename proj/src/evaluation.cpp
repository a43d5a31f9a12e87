#include "sggmech/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "sggmech/error.hpp"
#include "sggmech/geometry.hpp"
#include "sggmech/json_io.hpp"
#include "sggmech/parallel.hpp"

namespace sggmech {

namespace {

void require_boxes(const Triplet& t, const char* which) {
  if (!t.has_boxes()) throw Error(ErrorCode::MissingBox, std::string(which) + " triplet lacks a box");
}

// match[r][g]: whether the r-th ranked prediction matches GT g.
std::vector<std::vector<char>> match_table(const std::vector<RankedPrediction>& preds,
                                           const std::vector<Triplet>& gts, std::size_t k, double iou_thresh) {
  const auto order = rank_order(preds);
  const std::size_t top = std::min(k, order.size());
  std::vector<std::vector<char>> table(top, std::vector<char>(gts.size(), 0));
  for (std::size_t r = 0; r < top; ++r) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      table[r][g] = triplet_match(preds[order[r]].triplet, gts[g], iou_thresh) ? 1 : 0;
    }
  }
  return table;
}

void require_k(std::size_t k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "K must be >= 1");
}

}  // namespace

bool triplet_match(const Triplet& pred, const Triplet& gt, double iou_thresh) {
  require_boxes(pred, "predicted");
  require_boxes(gt, "ground-truth");
  if (!pred.same_labels(gt)) return false;
  return iou(*pred.subject_box, *gt.subject_box) >= iou_thresh && iou(*pred.object_box, *gt.object_box) >= iou_thresh;
}

std::vector<std::size_t> rank_order(const std::vector<RankedPrediction>& preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });
  return order;
}

double recall_at_k(const std::vector<RankedPrediction>& preds, const std::vector<Triplet>& gts, std::size_t k,
                   double iou_thresh) {
  require_k(k);
  if (gts.empty()) return 1.0;
  const auto table = match_table(preds, gts, k, iou_thresh);
  std::vector<char> consumed(gts.size(), 0);
  std::size_t hits = 0;
  for (const auto& row : table) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (row[g] && !consumed[g]) {
        consumed[g] = 1;
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(gts.size());
}

double mean_recall_at_k(const std::vector<RankedPrediction>& preds, const std::vector<Triplet>& gts, std::size_t k,
                        double iou_thresh) {
  require_k(k);
  if (gts.empty()) return 1.0;
  std::map<std::string, std::vector<Triplet>> by_predicate;
  for (const auto& g : gts) by_predicate[g.predicate].push_back(g);
  double sum = 0.0;
  for (const auto& [pred_name, subset] : by_predicate) sum += recall_at_k(preds, subset, k, iou_thresh);
  return sum / static_cast<double>(by_predicate.size());
}

double oracle_recall(const std::vector<RankedPrediction>& preds, const std::vector<Triplet>& gts, std::size_t k,
                     double iou_thresh) {
  require_k(k);
  if (gts.size() > kOracleMaxGts) throw Error(ErrorCode::TooLarge, "oracle recall limited to 8 ground truths");
  if (std::min(k, preds.size()) > kOracleMaxK) throw Error(ErrorCode::TooLarge, "oracle recall limited to K <= 12");
  if (gts.empty()) return 1.0;
  const auto table = match_table(preds, gts, k, iou_thresh);
  const std::size_t top = table.size();
  // best[g][mask]: most GTs in [g, end) matchable using predictions outside mask.
  std::vector<std::vector<int>> best(gts.size() + 1, std::vector<int>(std::size_t{1} << top, -1));
  auto solve = [&](auto&& self, std::size_t g, std::size_t mask) -> int {
    if (g == gts.size()) return 0;
    int& memo = best[g][mask];
    if (memo >= 0) return memo;
    int result = self(self, g + 1, mask);
    for (std::size_t r = 0; r < top; ++r) {
      if (table[r][g] && !(mask & (std::size_t{1} << r))) {
        result = std::max(result, 1 + self(self, g + 1, mask | (std::size_t{1} << r)));
      }
    }
    memo = result;
    return result;
  };
  return static_cast<double>(solve(solve, 0, 0)) / static_cast<double>(gts.size());
}

std::string_view to_string(SplitSpec s) {
  switch (s) {
    case SplitSpec::JointBaseNovel:
      return "joint";
    case SplitSpec::NovelObject:
      return "novel_object";
    case SplitSpec::NovelRelation:
      return "novel_relation";
    case SplitSpec::BaseRelation:
      return "base_relation";
    case SplitSpec::BaseObject:
      return "base_object";
  }
  return "joint";
}

SplitSpec split_from_string(std::string_view s) {
  for (auto spec : {SplitSpec::JointBaseNovel, SplitSpec::NovelObject, SplitSpec::NovelRelation,
                    SplitSpec::BaseRelation, SplitSpec::BaseObject}) {
    if (to_string(spec) == s) return spec;
  }
  throw Error(ErrorCode::UnknownSplit, "unknown split '" + std::string(s) + "'");
}

std::vector<Triplet> split_filter(const std::vector<Triplet>& gts, const Vocabulary& vocab, SplitSpec split) {
  std::vector<Triplet> out;
  for (const auto& t : gts) {
    bool keep = true;
    switch (split) {
      case SplitSpec::JointBaseNovel:
        break;
      case SplitSpec::NovelObject:
        keep = !vocab.is_base_object(t.subject) || !vocab.is_base_object(t.object);
        break;
      case SplitSpec::BaseObject:
        keep = vocab.is_base_object(t.subject) && vocab.is_base_object(t.object);
        break;
      case SplitSpec::NovelRelation:
        keep = !vocab.is_base_predicate(t.predicate);
        break;
      case SplitSpec::BaseRelation:
        keep = vocab.is_base_predicate(t.predicate);
        break;
    }
    if (keep) out.push_back(t);
  }
  return out;
}

RecallReport evaluate(const std::vector<ImageEval>& images, const Vocabulary& vocab,
                      const std::vector<SplitSpec>& splits, double iou_thresh) {
  for (const auto& img : images) {
    for (const auto& p : img.preds) require_boxes(p.triplet, "predicted");
    for (const auto& g : img.gts) require_boxes(g, "ground-truth");
  }
  RecallReport report;
  for (SplitSpec split : splits) {
    std::vector<std::vector<Triplet>> filtered(images.size());
    for (std::size_t i = 0; i < images.size(); ++i) filtered[i] = split_filter(images[i].gts, vocab, split);

    // Per-image tallies computed independently, then folded in image order.
    struct ImageTally {
      std::array<double, 3> recall{0, 0, 0};
      std::map<std::string, std::array<double, 3>> per_predicate;
    };
    std::vector<ImageTally> tallies(images.size());
    const auto n = static_cast<std::ptrdiff_t>(images.size());
#pragma omp parallel for schedule(static) num_threads(worker_threads())
    for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      const auto& gts = filtered[i];
      if (gts.empty()) continue;
      std::map<std::string, std::vector<Triplet>> by_predicate;
      for (const auto& g : gts) by_predicate[g.predicate].push_back(g);
      for (std::size_t kk = 0; kk < kRecallKs.size(); ++kk) {
        tallies[i].recall[kk] = recall_at_k(images[i].preds, gts, kRecallKs[kk], iou_thresh);
        for (const auto& [name, subset] : by_predicate) {
          tallies[i].per_predicate[name][kk] = recall_at_k(images[i].preds, subset, kRecallKs[kk], iou_thresh);
        }
      }
    }

    SplitRecall sr;
    std::map<std::string, std::pair<std::array<double, 3>, std::size_t>> predicate_sums;
    for (std::size_t i = 0; i < images.size(); ++i) {
      if (filtered[i].empty()) continue;
      sr.gt_count += filtered[i].size();
      ++sr.images;
      for (std::size_t kk = 0; kk < 3; ++kk) sr.recall[kk] += tallies[i].recall[kk];
      for (const auto& [name, r] : tallies[i].per_predicate) {
        auto& acc = predicate_sums[name];
        for (std::size_t kk = 0; kk < 3; ++kk) acc.first[kk] += r[kk];
        ++acc.second;
      }
    }
    if (sr.images > 0) {
      for (std::size_t kk = 0; kk < 3; ++kk) sr.recall[kk] /= static_cast<double>(sr.images);
      for (std::size_t kk = 0; kk < 3; ++kk) {
        double s = 0.0;
        for (const auto& [name, acc] : predicate_sums) s += acc.first[kk] / static_cast<double>(acc.second);
        sr.mean_recall[kk] = s / static_cast<double>(predicate_sums.size());
      }
    }
    report.splits[std::string(to_string(split))] = sr;
  }
  return report;
}

std::vector<RankedPrediction> read_predictions_jsonl(const std::filesystem::path& path) {
  std::vector<RankedPrediction> out;
  for_each_jsonl(path, [&](const Json& j, std::size_t) {
    RankedPrediction p;
    p.triplet = triplet_from_json(j.at("triplet"));
    p.score = j.at("score").get<double>();
    if (!std::isfinite(p.score)) throw Error(ErrorCode::InvalidArgument, "score must be finite");
    p.image_id = j.at("image_id").is_string() ? j.at("image_id").get<std::string>() : j.at("image_id").dump();
    require_boxes(p.triplet, "predicted");
    out.push_back(std::move(p));
  });
  return out;
}

void write_predictions_jsonl(const std::filesystem::path& path, const std::vector<RankedPrediction>& preds) {
  std::vector<std::string> lines;
  lines.reserve(preds.size());
  for (const auto& p : preds) {
    Json j;
    j["triplet"] = triplet_to_json(p.triplet);
    j["score"] = p.score;
    j["image_id"] = p.image_id;
    lines.push_back(j.dump());
  }
  write_lines(path, lines);
}

std::vector<std::pair<std::string, Triplet>> read_ground_truth_jsonl(const std::filesystem::path& path) {
  std::vector<std::pair<std::string, Triplet>> out;
  for_each_jsonl(path, [&](const Json& j, std::size_t) {
    Triplet t = triplet_from_json(j.at("triplet"));
    require_boxes(t, "ground-truth");
    const auto& id = j.at("image_id");
    out.emplace_back(id.is_string() ? id.get<std::string>() : id.dump(), std::move(t));
  });
  return out;
}

std::vector<ImageEval> group_by_image(const std::vector<RankedPrediction>& preds,
                                      const std::vector<std::pair<std::string, Triplet>>& gts) {
  std::map<std::string, ImageEval> by_id;
  for (const auto& p : preds) {
    auto& img = by_id[p.image_id];
    img.image_id = p.image_id;
    img.preds.push_back(p);
  }
  for (const auto& [id, t] : gts) {
    auto& img = by_id[id];
    img.image_id = id;
    img.gts.push_back(t);
  }
  std::vector<ImageEval> out;
  out.reserve(by_id.size());
  for (auto& [id, img] : by_id) out.push_back(std::move(img));
  return out;
}

void write_recall_csv(const std::filesystem::path& path, const RecallReport& report) {
  std::vector<std::string> lines{"split,metric,K,value"};
  for (const auto& [name, sr] : report.splits) {
    for (std::size_t kk = 0; kk < kRecallKs.size(); ++kk) {
      lines.push_back(fmt::format("{},R,{},{}", name, kRecallKs[kk], sr.recall[kk]));
    }
    for (std::size_t kk = 0; kk < kRecallKs.size(); ++kk) {
      lines.push_back(fmt::format("{},mR,{},{}", name, kRecallKs[kk], sr.mean_recall[kk]));
    }
    lines.push_back(fmt::format("{},gt_count,0,{}", name, sr.gt_count));
  }
  write_lines(path, lines);
}

}  // namespace sggmech
