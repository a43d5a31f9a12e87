#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "sggmech/config.hpp"
#include "sggmech/grounding.hpp"
#include "sggmech/losses.hpp"
#include "sggmech/matrix.hpp"
#include "sggmech/report.hpp"
#include "sggmech/scene.hpp"

namespace sggmech {

// Rule backend, or the HTTP client when counter_action_backend is "llm".
std::unique_ptr<CounterActionBackend> make_counter_action_backend(const ExperimentConfig& config);

// Seed of scene `index` under the config's master seed.
std::uint64_t scene_seed(const ExperimentConfig& config, std::size_t index);
// The shared category embedding model for a config.
EmbeddingModel config_embedding_model(const ExperimentConfig& config);

// GT triplets with each predicate replaced, with probability `flip_prob`, by a
// different vocabulary predicate.
std::vector<Triplet> first_pass_triplets(const SyntheticScene& scene, const Vocabulary& vocab, double flip_prob,
                                         std::uint64_t seed);

struct SceneSelection {
  std::size_t interacting = 0;
  std::size_t k = 0;
  std::size_t l = 0;
  // Fraction of the scene's interacting instances among the selected queries.
  double baseline = 0.0;  // object-only ranking, no interaction stage
  double step1 = 0.0;     // first stage at the configured gamma
  double step2 = 0.0;     // both stages
  // Fraction of interacting instances inside the interaction-ranked prefix.
  double prefix = 0.0;
};

struct SelectionReport {
  std::vector<SceneSelection> scenes;
  double baseline_mean = 0.0;
  double step1_mean = 0.0;
  double step2_mean = 0.0;
  // Paired per-scene difference step2 - baseline with a normal 95% interval.
  double diff_mean = 0.0;
  double diff_ci_low = 0.0;
  double diff_ci_high = 0.0;
  // Scenes whose interacting count is <= L, and the share of them whose
  // prefix holds every interacting instance.
  std::size_t prefix_eligible = 0;
  double prefix_exact_fraction = 0.0;

  Report to_report() const;
};

SelectionReport run_selection_experiment(const ExperimentConfig& config);

struct DistillRow {
  std::string student;
  double vrd = 0.0;
  double rrd = 0.0;
};

struct DistillReport {
  std::size_t edges = 0;
  std::size_t edge_dim = 0;
  std::vector<DistillRow> rows;  // identical, rotated, perturbed
  double rotation_scale = 1.0;
  // beta1 * VRD + beta2 * RRD before each step and after the last.
  std::vector<double> descent_trace;
  bool monotone = false;

  double initial_loss() const { return descent_trace.empty() ? 0.0 : descent_trace.front(); }
  double final_loss() const { return descent_trace.empty() ? 0.0 : descent_trace.back(); }
  Report to_report() const;
};

// Teacher edges: concatenated visual tokens of ordered instance pairs, drawn
// scene by scene. Only non-interacting pairs unless rrd_negatives_only is off.
std::vector<EdgeFeature> teacher_edges(const ExperimentConfig& config);

// Uniformly random orthogonal matrix (Gram-Schmidt on Gaussian draws).
Matrix random_orthogonal(std::size_t n, std::uint64_t seed);

DistillReport run_distill_experiment(const ExperimentConfig& config);

struct InfusionReport {
  std::size_t triplets = 0;
  std::size_t object_only_correct = 0;
  std::size_t bidirectional_correct = 0;

  double object_only_fraction() const;
  double bidirectional_fraction() const;
  Report to_report() const;
};

// Top-ranked pseudo-label for `t` in `scene` under `prompt`, if any.
std::optional<PseudoLabel> top_pseudo_label(const SyntheticScene& scene, const Triplet& t, const std::string& prompt,
                                            const GroundingConfig& grounding);

InfusionReport run_infusion_experiment(const ExperimentConfig& config);

// Bidirectional-prompt pseudo-labels (top-1 per GT triplet) over all scenes.
std::vector<PseudoLabel> run_grounding(const ExperimentConfig& config);

}  // namespace sggmech
