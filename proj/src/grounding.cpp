#include "sggmech/grounding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sggmech/error.hpp"
#include "sggmech/json_io.hpp"

namespace sggmech {

bool contains_phrase(std::string_view text, std::string_view phrase) {
  const auto hay = tokenize(text);
  const auto needle = tokenize(phrase);
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

std::vector<Detection> mock_ground(const SyntheticScene& scene, std::string_view prompt,
                                   const MockGrounderOptions& options) {
  std::vector<Detection> out;
  for (const auto& inst : scene.instances) {
    if (!contains_phrase(prompt, inst.category)) continue;
    double score = inst.base_score;
    if (inst.interacting) {
      const auto& inter = scene.interactions.at(static_cast<std::size_t>(inst.interaction_id));
      if (contains_phrase(prompt, inter.predicate)) score += options.interaction_bonus;
    }
    Detection d;
    d.box = inst.box;
    d.score = std::clamp(score, 0.0, 1.0);
    d.box.score = d.score;
    d.phrase = inst.category;
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<PseudoLabel> combine_pairs(const std::vector<Detection>& subjects, const std::vector<Detection>& objects,
                                       double conf_threshold, double iou_threshold, const std::string& predicate) {
  if (!std::isfinite(conf_threshold) || !std::isfinite(iou_threshold)) {
    throw Error(ErrorCode::InvalidArgument, "thresholds must be finite");
  }
  std::vector<PseudoLabel> labels;
  for (const auto& s : subjects) {
    if (!(s.score > conf_threshold)) continue;
    for (const auto& o : objects) {
      if (!(o.score > conf_threshold)) continue;
      const double overlap = iou(s.box, o.box);
      if (!(overlap > iou_threshold)) continue;
      PseudoLabel l;
      l.triplet.subject = s.phrase;
      l.triplet.predicate = predicate;
      l.triplet.object = o.phrase;
      l.triplet.subject_box = s.box;
      l.triplet.object_box = o.box;
      l.triplet.confidence = std::min(s.score, o.score);
      l.iou = overlap;
      l.subject_score = s.score;
      l.object_score = o.score;
      labels.push_back(std::move(l));
    }
  }
  // Labels are generated in input order, so a stable sort keeps it as the last key.
  std::stable_sort(labels.begin(), labels.end(), [](const PseudoLabel& a, const PseudoLabel& b) {
    const double ma = std::min(a.subject_score, a.object_score);
    const double mb = std::min(b.subject_score, b.object_score);
    if (ma != mb) return ma > mb;
    return a.iou > b.iou;
  });
  return labels;
}

void write_pseudo_labels(const std::filesystem::path& path, const std::vector<PseudoLabel>& labels) {
  std::vector<std::string> lines;
  lines.reserve(labels.size());
  for (const auto& l : labels) {
    if (!l.triplet.has_boxes()) throw Error(ErrorCode::InvalidArgument, "pseudo-label without boxes");
    Json j = {{"subject", l.triplet.subject}, {"predicate", l.triplet.predicate},
              {"object", l.triplet.object},   {"sbox", box_to_json(*l.triplet.subject_box)},
              {"obox", box_to_json(*l.triplet.object_box)}, {"sscore", l.subject_score},
              {"oscore", l.object_score},     {"iou", l.iou}};
    lines.push_back(j.dump());
  }
  write_lines(path, lines);
}

std::vector<PseudoLabel> read_pseudo_labels(const std::filesystem::path& path) {
  std::vector<PseudoLabel> out;
  for_each_jsonl(path, [&](const Json& j, std::size_t) {
    PseudoLabel l;
    l.triplet.subject = j.at("subject").get<std::string>();
    l.triplet.predicate = j.at("predicate").get<std::string>();
    l.triplet.object = j.at("object").get<std::string>();
    l.triplet.subject_box = box_from_json(j.at("sbox"));
    l.triplet.object_box = box_from_json(j.at("obox"));
    l.subject_score = j.at("sscore").get<double>();
    l.object_score = j.at("oscore").get<double>();
    l.iou = j.at("iou").get<double>();
    l.triplet.subject_box->score = l.subject_score;
    l.triplet.object_box->score = l.object_score;
    l.triplet.confidence = std::min(l.subject_score, l.object_score);
    out.push_back(std::move(l));
  });
  return out;
}

}  // namespace sggmech
