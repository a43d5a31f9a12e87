#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sggmech/geometry.hpp"
#include "sggmech/scene.hpp"
#include "sggmech/text.hpp"

namespace sggmech {

struct Detection {
  BoundingBox box;
  std::string phrase;
  double score = 0.0;
};

struct PseudoLabel {
  Triplet triplet;  // both boxes set
  double iou = 0.0;
  double subject_score = 0.0;
  double object_score = 0.0;
};

struct MockGrounderOptions {
  double interaction_bonus = 0.3;
};

// Stand-in grounder: one detection per instance whose category occurs in the
// prompt as a whole-word phrase. Interacting instances whose predicate also
// occurs in the prompt receive `interaction_bonus`. Scores clamp to [0,1].
std::vector<Detection> mock_ground(const SyntheticScene& scene, std::string_view prompt,
                                   const MockGrounderOptions& options = {});

// True when `phrase` occurs in `text` on word boundaries (both tokenized).
bool contains_phrase(std::string_view text, std::string_view phrase);

// Cartesian subject x object pairs with both scores > conf_threshold and
// iou > iou_threshold, sorted by min score desc, then iou desc, then input order.
std::vector<PseudoLabel> combine_pairs(const std::vector<Detection>& subjects, const std::vector<Detection>& objects,
                                       double conf_threshold, double iou_threshold, const std::string& predicate);

inline constexpr double kDefaultConfThreshold = 0.25;
inline constexpr double kDefaultIouThreshold = 0.0;

// JSONL: {"subject","predicate","object","sbox","obox","sscore","oscore","iou"}.
void write_pseudo_labels(const std::filesystem::path& path, const std::vector<PseudoLabel>& labels);
std::vector<PseudoLabel> read_pseudo_labels(const std::filesystem::path& path);

}  // namespace sggmech
