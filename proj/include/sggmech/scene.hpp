#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sggmech/config.hpp"
#include "sggmech/geometry.hpp"
#include "sggmech/text.hpp"
#include "sggmech/token_matrix.hpp"

namespace sggmech {

struct SceneInstance {
  int category_id = -1;
  std::string category;
  BoundingBox box;
  bool interacting = false;
  int interaction_id = -1;
  // Grounder confidence before any interaction bonus.
  double base_score = 0.5;
};

struct SceneInteraction {
  std::size_t subject_instance = 0;
  std::size_t object_instance = 0;
  int predicate_id = -1;
  std::string predicate;
};

struct SyntheticScene {
  double width = 0.0;
  double height = 0.0;
  std::vector<SceneInstance> instances;
  std::vector<SceneInteraction> interactions;
  // gt_triplets[k] describes interactions[k].
  std::vector<Triplet> gt_triplets;
  std::uint64_t seed = 0;

  std::size_t interacting_count() const;
};

// Places `interactions` overlapping subject/object pairs with distinct
// categories, then same-category distractors that overlap the partner box.
// Instance order is shuffled. Deterministic in `seed`.
SyntheticScene gen_scene(const ExperimentConfig& config, std::uint64_t seed);

// Throws InvalidArgument when a scene invariant is broken.
void check_scene(const SyntheticScene& scene);

// Frozen stand-in for visual/text encoders: one unit vector per category.
struct EmbeddingModel {
  Matrix object_vectors;
  Matrix predicate_vectors;
  double noise_sigma = 0.0;
  double interaction_mix = 0.0;
  std::size_t dim() const noexcept { return object_vectors.cols(); }
};

EmbeddingModel make_embedding_model(const Vocabulary& vocab, const EmbeddingConfig& config, std::uint64_t seed);

struct SceneTokens {
  TokenMatrix visual;
  TokenMatrix object_classes;
  TokenMatrix relation_classes;
  TokenMatrix interactions;
  // Rows [0, instance_tokens) of `visual` mirror scene.instances; the rest are background.
  std::size_t instance_tokens = 0;
};

// Interaction rows: normalize(e_subject + e_predicate) and
// normalize(e_predicate + e_object) for each triplet, in order.
TokenMatrix interaction_tokens(const std::vector<Triplet>& triplets, const Vocabulary& vocab,
                               const EmbeddingModel& model);

// Visual token per instance: normalize(e_cat + mix * e_pred [interacting] + noise),
// followed by `background_tokens` random unit rows. Noise draws come from the scene seed.
SceneTokens embed_scene(const SyntheticScene& scene, const Vocabulary& vocab, const EmbeddingModel& model,
                        int background_tokens, const std::vector<Triplet>& first_pass);

void normalize_in_place(std::span<double> v);

}  // namespace sggmech
