#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "sggmech/llm_client.hpp"
#include "sggmech/vocabulary.hpp"

namespace sggmech {

struct SceneConfig {
  double width = 640.0;
  double height = 480.0;
  int interactions = 2;
  int distractors = 3;
  // Extra visual tokens that belong to no instance.
  int background_tokens = 8;
  double min_box = 40.0;
  double max_box = 160.0;
};

struct EmbeddingConfig {
  int dim = 32;
  // Total expected norm of the isotropic token noise.
  double noise_sigma = 0.25;
  double interaction_mix = 0.5;
};

struct SelectionConfig {
  // Clamped per scene to K = min(K, N_v), L = min(L, K).
  int K = 900;
  int L = 200;
  double gamma_balance = 0.5;
  // Chance that a first-pass triplet carries a wrong predicate.
  double predicate_flip_prob = 0.0;
};

struct GroundingConfig {
  double interaction_bonus = 0.3;
  double base_score_min = 0.3;
  double base_score_max = 0.7;
  double conf_threshold = 0.25;
  double iou_threshold = 0.0;
};

struct LossConfig {
  double beta1 = 0.1;
  double beta2 = 0.5;
  double alpha_focal = 0.25;
  double gamma_focal = 2.0;
  double match_cls = 2.0;
  double match_l1 = 5.0;
  double match_giou = 2.0;
  bool rrd_negatives_only = true;
};

struct DistillConfig {
  int edges = 8;
  int descent_steps = 200;
  double step_size = 0.01;
  double perturb_sigma = 0.1;
};

struct ExperimentConfig {
  std::uint64_t master_seed = 20250101;
  int scenes = 200;
  SceneConfig scene;
  EmbeddingConfig embedding;
  SelectionConfig selection;
  GroundingConfig grounding;
  LossConfig losses;
  DistillConfig distill;
  std::string counter_action_backend = "rules";
  LlmClientConfig llm;
  Vocabulary vocabulary = default_vocabulary();

  static Vocabulary default_vocabulary();
  // Throws ConfigInvalid on the first violated precondition.
  void validate() const;
};

// Missing fields keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace sggmech
