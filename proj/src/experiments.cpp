#include "sggmech/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "sggmech/error.hpp"
#include "sggmech/llm_client.hpp"
#include "sggmech/matching.hpp"
#include "sggmech/parallel.hpp"
#include "sggmech/query_selection.hpp"
#include "sggmech/rng.hpp"

namespace sggmech {

namespace {

constexpr std::uint64_t kModelStream = 0x8000000000000000ull;
constexpr std::uint64_t kFlipStream = 0xF11Bull;
constexpr std::uint64_t kEdgeStream = 0xED6Eull;
constexpr std::uint64_t kStudentStream = 0x57D7ull;

// Counter-actions for every vocabulary predicate, computed up front.
class FixedCounterAction final : public CounterActionBackend {
 public:
  FixedCounterAction(const Vocabulary& vocab, const CounterActionBackend& backend) {
    for (const auto& p : vocab.predicates()) table_[p] = counter_action(p, backend);
  }
  std::string generate(std::string_view verb) const override {
    auto it = table_.find(std::string(verb));
    if (it == table_.end()) throw Error(ErrorCode::UnknownCategory, "no counter-action for '" + std::string(verb) + "'");
    return it->second;
  }

 private:
  std::map<std::string, std::string> table_;
};

double interacting_fraction(const SyntheticScene& scene, std::span<const std::size_t> indices) {
  const std::size_t total = scene.interacting_count();
  if (total == 0) return 1.0;
  std::size_t hits = 0;
  for (std::size_t idx : indices) {
    if (idx < scene.instances.size() && scene.instances[idx].interacting) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

double mean_of(const std::vector<SceneSelection>& rows, double SceneSelection::*field) {
  double s = 0.0;
  for (const auto& r : rows) s += r.*field;
  return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) std::copy(m.row(rows[r]).begin(), m.row(rows[r]).end(), out.row(r).begin());
  return out;
}

}  // namespace

std::unique_ptr<CounterActionBackend> make_counter_action_backend(const ExperimentConfig& config) {
  if (config.counter_action_backend == "llm") return std::make_unique<LlmCounterAction>(config.llm);
  return std::make_unique<RuleCounterAction>();
}

std::uint64_t scene_seed(const ExperimentConfig& config, std::size_t index) {
  return substream_seed(config.master_seed, index);
}

EmbeddingModel config_embedding_model(const ExperimentConfig& config) {
  return make_embedding_model(config.vocabulary, config.embedding, substream_seed(config.master_seed, kModelStream));
}

std::vector<Triplet> first_pass_triplets(const SyntheticScene& scene, const Vocabulary& vocab, double flip_prob,
                                         std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Triplet> out = scene.gt_triplets;
  const std::size_t n_pred = vocab.predicates().size();
  for (auto& t : out) {
    if (n_pred < 2 || !(rng.uniform() < flip_prob)) continue;
    const auto current = vocab.predicate_index(t.predicate);
    auto pick = static_cast<std::size_t>(rng.below(n_pred - 1));
    if (current && pick >= *current) ++pick;
    t.predicate = vocab.predicates()[pick];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Selection

SelectionReport run_selection_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto model = config_embedding_model(config);
  const auto n = static_cast<std::size_t>(config.scenes);
  SelectionReport report;
  report.scenes.resize(n);

  parallel_for(n, [&](std::size_t i) {
    const std::uint64_t seed = scene_seed(config, i);
    const auto scene = gen_scene(config, seed);
    const auto first = first_pass_triplets(scene, config.vocabulary, config.selection.predicate_flip_prob,
                                           substream_seed(seed, kFlipStream));
    const auto tokens = embed_scene(scene, config.vocabulary, model, config.scene.background_tokens, first);
    const auto budget = scaled_budget(static_cast<std::size_t>(config.selection.K),
                                      static_cast<std::size_t>(config.selection.L), tokens.visual.rows());
    const double gamma = config.selection.gamma_balance;

    const auto base = step1_select(tokens.visual, tokens.object_classes, tokens.relation_classes, budget.k, 1.0);
    const auto s1 = step1_select(tokens.visual, tokens.object_classes, tokens.relation_classes, budget.k, gamma);
    const auto s2 = step2_select(tokens.visual, tokens.interactions, tokens.object_classes, budget.k, budget.l, gamma,
                                 tokens.relation_classes);

    SceneSelection row;
    row.interacting = scene.interacting_count();
    row.k = budget.k;
    row.l = budget.l;
    row.baseline = interacting_fraction(scene, base.indices);
    row.step1 = interacting_fraction(scene, s1.indices);
    row.step2 = interacting_fraction(scene, s2.indices);
    row.prefix = interacting_fraction(scene, std::span(s2.indices).first(s2.interaction_count));
    report.scenes[i] = row;
  });

  report.baseline_mean = mean_of(report.scenes, &SceneSelection::baseline);
  report.step1_mean = mean_of(report.scenes, &SceneSelection::step1);
  report.step2_mean = mean_of(report.scenes, &SceneSelection::step2);

  double sum = 0.0;
  for (const auto& r : report.scenes) sum += r.step2 - r.baseline;
  report.diff_mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& r : report.scenes) {
    const double d = r.step2 - r.baseline - report.diff_mean;
    ss += d * d;
  }
  const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  const double half = 1.96 * sd / std::sqrt(static_cast<double>(n));
  report.diff_ci_low = report.diff_mean - half;
  report.diff_ci_high = report.diff_mean + half;

  std::size_t exact = 0;
  for (const auto& r : report.scenes) {
    if (r.interacting > r.l) continue;
    ++report.prefix_eligible;
    if (r.prefix == 1.0) ++exact;
  }
  report.prefix_exact_fraction =
      report.prefix_eligible ? static_cast<double>(exact) / static_cast<double>(report.prefix_eligible) : 0.0;
  return report;
}

Report SelectionReport::to_report() const {
  Report r;
  r.title = "Interacting instances among selected queries";
  r.chart_metric = "interacting_fraction";
  r.rows = {
      {"object_only", "interacting_fraction", baseline_mean},
      {"stage_one", "interacting_fraction", step1_mean},
      {"interaction_guided", "interacting_fraction", step2_mean},
      {"paired_difference", "mean", diff_mean},
      {"paired_difference", "ci95_low", diff_ci_low},
      {"paired_difference", "ci95_high", diff_ci_high},
      {"prefix", "eligible_scenes", static_cast<double>(prefix_eligible)},
      {"prefix", "exact_fraction", prefix_exact_fraction},
      {"all", "scenes", static_cast<double>(scenes.size())},
  };
  return r;
}

// ---------------------------------------------------------------------------
// Distillation

std::vector<EdgeFeature> teacher_edges(const ExperimentConfig& config) {
  config.validate();
  const auto model = config_embedding_model(config);
  const auto wanted = static_cast<std::size_t>(config.distill.edges);
  std::vector<EdgeFeature> out;
  for (std::size_t i = 0; out.size() < wanted; ++i) {
    if (i >= static_cast<std::size_t>(config.scenes)) {
      throw Error(ErrorCode::ConfigInvalid, "scenes do not supply enough edges for distill.edges");
    }
    const std::uint64_t seed = scene_seed(config, i);
    const auto scene = gen_scene(config, seed);
    const auto tokens = embed_scene(scene, config.vocabulary, model, 0, scene.gt_triplets);

    std::vector<QueryPrediction> queries(scene.instances.size());
    for (std::size_t q = 0; q < queries.size(); ++q) {
      const auto row = tokens.visual.row(q);
      queries[q].box = scene.instances[q].box;
      queries[q].feature = std::vector<double>(row.begin(), row.end());
    }
    std::set<std::pair<std::size_t, std::size_t>> positives;
    for (const auto& inter : scene.interactions) positives.emplace(inter.subject_instance, inter.object_instance);

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < queries.size(); ++a) {
      for (std::size_t b = 0; b < queries.size(); ++b) {
        if (a == b) continue;
        const bool negative = !positives.count({a, b});
        if (negative || !config.losses.rrd_negatives_only) pairs.emplace_back(a, b);
      }
    }
    Rng rng(substream_seed(seed, kEdgeStream));
    rng.shuffle(pairs);
    auto edges = build_edge_features(queries, pairs);
    for (auto& e : edges) {
      e.is_negative = !positives.count(e.pair);
      if (out.size() < wanted) out.push_back(std::move(e));
    }
  }
  return out;
}

Matrix random_orthogonal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix q(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    // Redraw in the measure-zero event that a row is dependent on earlier ones.
    for (;;) {
      auto row = q.row(r);
      for (auto& x : row) x = rng.normal();
      for (std::size_t p = 0; p < r; ++p) {
        const double c = dot(row, q.row(p));
        for (std::size_t k = 0; k < n; ++k) row[k] -= c * q(p, k);
      }
      const double norm = std::sqrt(dot(row, row));
      if (norm > 1e-8) {
        for (auto& x : row) x /= norm;
        break;
      }
    }
  }
  return q;
}

DistillReport run_distill_experiment(const ExperimentConfig& config) {
  const auto edges = teacher_edges(config);
  const Matrix teacher = edge_matrix(edges);
  const std::size_t n = teacher.rows();
  const std::size_t d = teacher.cols();
  std::vector<std::size_t> neg_rows;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].is_negative) neg_rows.push_back(i);
  }
  const Matrix teacher_neg = select_rows(teacher, neg_rows);

  const double b1 = config.losses.beta1;
  const double b2 = config.losses.beta2;
  auto vrd_of = [&](const Matrix& s) { return vrd_loss(select_rows(s, neg_rows), teacher_neg); };
  auto objective = [&](const Matrix& s) { return b1 * vrd_of(s) + b2 * rrd_loss(s, teacher); };

  DistillReport report;
  report.edges = n;
  report.edge_dim = d;

  Rng rng(substream_seed(config.master_seed, kStudentStream));
  const Matrix q = random_orthogonal(d, rng.next_u64());
  report.rotation_scale = rng.uniform(0.5, 2.0);
  Matrix rotated(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < d; ++r) rotated(i, r) = report.rotation_scale * dot(q.row(r), teacher.row(i));
  }
  Matrix perturbed = teacher;
  for (double& v : perturbed.data()) v += config.distill.perturb_sigma * rng.normal();

  for (const auto& [name, student] :
       std::vector<std::pair<std::string, const Matrix*>>{{"identical", &teacher}, {"rotated", &rotated},
                                                          {"perturbed", &perturbed}}) {
    report.rows.push_back({name, vrd_of(*student), rrd_loss(*student, teacher)});
  }

  Matrix x = perturbed;
  for (int step = 0; step < config.distill.descent_steps; ++step) {
    report.descent_trace.push_back(objective(x));
    const Matrix g_vrd = vrd_loss_grad(select_rows(x, neg_rows), teacher_neg);
    const Matrix g_rrd = rrd_loss_grad(x, teacher);
    for (std::size_t i = 0; i < x.data().size(); ++i) x.data()[i] -= config.distill.step_size * b2 * g_rrd.data()[i];
    for (std::size_t r = 0; r < neg_rows.size(); ++r) {
      for (std::size_t k = 0; k < d; ++k) x(neg_rows[r], k) -= config.distill.step_size * b1 * g_vrd(r, k);
    }
  }
  report.descent_trace.push_back(objective(x));
  report.monotone = std::is_sorted(report.descent_trace.rbegin(), report.descent_trace.rend());
  return report;
}

Report DistillReport::to_report() const {
  Report r;
  r.title = "Edge distillation losses per student";
  r.chart_metric = "vrd";
  for (const auto& row : rows) {
    r.rows.push_back({row.student, "vrd", row.vrd});
    r.rows.push_back({row.student, "rrd", row.rrd});
  }
  r.rows.push_back({"rotated", "scale", rotation_scale});
  r.rows.push_back({"descent", "initial", initial_loss()});
  r.rows.push_back({"descent", "final", final_loss()});
  r.rows.push_back({"descent", "steps", descent_trace.empty() ? 0.0 : static_cast<double>(descent_trace.size() - 1)});
  r.rows.push_back({"descent", "monotone", monotone ? 1.0 : 0.0});
  r.rows.push_back({"all", "edges", static_cast<double>(edges)});
  r.rows.push_back({"all", "edge_dim", static_cast<double>(edge_dim)});
  return r;
}

// ---------------------------------------------------------------------------
// Knowledge infusion

std::optional<PseudoLabel> top_pseudo_label(const SyntheticScene& scene, const Triplet& t, const std::string& prompt,
                                            const GroundingConfig& grounding) {
  const auto detections = mock_ground(scene, prompt, MockGrounderOptions{grounding.interaction_bonus});
  std::vector<Detection> subjects, objects;
  for (const auto& d : detections) {
    if (d.phrase == t.subject) subjects.push_back(d);
    if (d.phrase == t.object) objects.push_back(d);
  }
  auto labels = combine_pairs(subjects, objects, grounding.conf_threshold, grounding.iou_threshold, t.predicate);
  if (labels.empty()) return std::nullopt;
  return std::move(labels.front());
}

namespace {

bool boxes_match(const std::optional<PseudoLabel>& label, const Triplet& gt) {
  return label && label->triplet.subject_box->same_extent(*gt.subject_box) &&
         label->triplet.object_box->same_extent(*gt.object_box);
}

}  // namespace

double InfusionReport::object_only_fraction() const {
  return triplets ? static_cast<double>(object_only_correct) / static_cast<double>(triplets) : 0.0;
}

double InfusionReport::bidirectional_fraction() const {
  return triplets ? static_cast<double>(bidirectional_correct) / static_cast<double>(triplets) : 0.0;
}

InfusionReport run_infusion_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto backend = make_counter_action_backend(config);
  const FixedCounterAction fixed(config.vocabulary, *backend);
  const auto n = static_cast<std::size_t>(config.scenes);
  struct Tally {
    std::size_t triplets = 0, object_only = 0, bidirectional = 0;
  };
  std::vector<Tally> tallies(n);
  parallel_for(n, [&](std::size_t i) {
    const auto scene = gen_scene(config, scene_seed(config, i));
    for (const auto& gt : scene.gt_triplets) {
      const std::string plain = join_categories({gt.subject, gt.object});
      const std::string bidir = build_bidirectional_prompt(gt, fixed).combined;
      ++tallies[i].triplets;
      if (boxes_match(top_pseudo_label(scene, gt, plain, config.grounding), gt)) ++tallies[i].object_only;
      if (boxes_match(top_pseudo_label(scene, gt, bidir, config.grounding), gt)) ++tallies[i].bidirectional;
    }
  });
  InfusionReport report;
  for (const auto& t : tallies) {
    report.triplets += t.triplets;
    report.object_only_correct += t.object_only;
    report.bidirectional_correct += t.bidirectional;
  }
  return report;
}

Report InfusionReport::to_report() const {
  Report r;
  r.title = "Pseudo-label box correctness by prompt style";
  r.chart_metric = "correct_fraction";
  r.rows = {
      {"object_only", "correct_fraction", object_only_fraction()},
      {"bidirectional", "correct_fraction", bidirectional_fraction()},
      {"object_only", "correct", static_cast<double>(object_only_correct)},
      {"bidirectional", "correct", static_cast<double>(bidirectional_correct)},
      {"all", "triplets", static_cast<double>(triplets)},
  };
  return r;
}

std::vector<PseudoLabel> run_grounding(const ExperimentConfig& config) {
  config.validate();
  const auto backend = make_counter_action_backend(config);
  const FixedCounterAction fixed(config.vocabulary, *backend);
  const auto n = static_cast<std::size_t>(config.scenes);
  std::vector<std::vector<PseudoLabel>> per_scene(n);
  parallel_for(n, [&](std::size_t i) {
    const auto scene = gen_scene(config, scene_seed(config, i));
    for (const auto& gt : scene.gt_triplets) {
      const std::string prompt = build_bidirectional_prompt(gt, fixed).combined;
      if (auto label = top_pseudo_label(scene, gt, prompt, config.grounding)) per_scene[i].push_back(std::move(*label));
    }
  });
  std::vector<PseudoLabel> out;
  for (auto& labels : per_scene) {
    for (auto& l : labels) out.push_back(std::move(l));
  }
  return out;
}

}  // namespace sggmech
