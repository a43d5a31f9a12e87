#include "sggmech/scene.hpp"

#include <algorithm>
#include <cmath>

#include "sggmech/error.hpp"
#include "sggmech/rng.hpp"

namespace sggmech {

namespace {

BoundingBox random_box(Rng& rng, const SceneConfig& sc) {
  const double w = rng.uniform(sc.min_box, sc.max_box);
  const double h = rng.uniform(sc.min_box, sc.max_box);
  const double x1 = rng.uniform(0.0, sc.width - w);
  const double y1 = rng.uniform(0.0, sc.height - h);
  return make_box(x1, y1, x1 + w, y1 + h);
}

// A box whose extent contains a random interior point of `anchor`, so the two overlap.
BoundingBox box_overlapping(Rng& rng, const SceneConfig& sc, const BoundingBox& anchor) {
  const double w = rng.uniform(sc.min_box, sc.max_box);
  const double h = rng.uniform(sc.min_box, sc.max_box);
  const double cx = rng.uniform(anchor.x1, anchor.x2);
  const double cy = rng.uniform(anchor.y1, anchor.y2);
  const double x1 = std::clamp(cx - w / 2.0, 0.0, sc.width - w);
  const double y1 = std::clamp(cy - h / 2.0, 0.0, sc.height - h);
  return make_box(x1, y1, x1 + w, y1 + h);
}

void add_scaled(std::span<double> dst, std::span<const double> src, double scale) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
}

}  // namespace

void normalize_in_place(std::span<double> v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  if (n2 <= 0.0) return;
  const double inv = 1.0 / std::sqrt(n2);
  for (double& x : v) x *= inv;
}

std::size_t SyntheticScene::interacting_count() const {
  return static_cast<std::size_t>(
      std::count_if(instances.begin(), instances.end(), [](const SceneInstance& i) { return i.interacting; }));
}

SyntheticScene gen_scene(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  const auto& sc = config.scene;
  const auto& vocab = config.vocabulary;
  Rng rng(seed);

  std::vector<std::size_t> object_ids(vocab.objects().size());
  for (std::size_t i = 0; i < object_ids.size(); ++i) object_ids[i] = i;
  rng.shuffle(object_ids);

  SyntheticScene scene;
  scene.width = sc.width;
  scene.height = sc.height;
  scene.seed = seed;

  auto make_instance = [&](std::size_t cat, const BoundingBox& box, bool interacting, int interaction_id) {
    SceneInstance inst;
    inst.category_id = static_cast<int>(cat);
    inst.category = vocab.objects()[cat];
    inst.box = box;
    inst.box.category_id = inst.category_id;
    inst.interacting = interacting;
    inst.interaction_id = interaction_id;
    inst.base_score = rng.uniform(config.grounding.base_score_min, config.grounding.base_score_max);
    return inst;
  };

  const auto n_inter = static_cast<std::size_t>(sc.interactions);
  for (std::size_t k = 0; k < n_inter; ++k) {
    const std::size_t pred = static_cast<std::size_t>(rng.below(vocab.predicates().size()));
    const BoundingBox sbox = random_box(rng, sc);
    const BoundingBox obox = box_overlapping(rng, sc, sbox);
    scene.instances.push_back(make_instance(object_ids[2 * k], sbox, true, static_cast<int>(k)));
    scene.instances.push_back(make_instance(object_ids[2 * k + 1], obox, true, static_cast<int>(k)));
    SceneInteraction inter;
    inter.subject_instance = 2 * k;
    inter.object_instance = 2 * k + 1;
    inter.predicate_id = static_cast<int>(pred);
    inter.predicate = vocab.predicates()[pred];
    scene.interactions.push_back(inter);
  }

  for (int d = 0; d < sc.distractors; ++d) {
    const std::size_t twin = static_cast<std::size_t>(rng.below(2 * n_inter));
    const std::size_t partner = twin ^ 1U;
    const BoundingBox box = box_overlapping(rng, sc, scene.instances[partner].box);
    scene.instances.push_back(make_instance(static_cast<std::size_t>(scene.instances[twin].category_id), box, false, -1));
  }

  std::vector<std::size_t> order(scene.instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<std::size_t> new_pos(order.size());
  std::vector<SceneInstance> shuffled;
  shuffled.reserve(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    new_pos[order[i]] = i;
    shuffled.push_back(scene.instances[order[i]]);
  }
  scene.instances = std::move(shuffled);
  for (auto& inter : scene.interactions) {
    inter.subject_instance = new_pos[inter.subject_instance];
    inter.object_instance = new_pos[inter.object_instance];
  }

  for (const auto& inter : scene.interactions) {
    const auto& s = scene.instances[inter.subject_instance];
    const auto& o = scene.instances[inter.object_instance];
    Triplet t;
    t.subject = s.category;
    t.predicate = inter.predicate;
    t.object = o.category;
    t.subject_box = s.box;
    t.object_box = o.box;
    scene.gt_triplets.push_back(std::move(t));
  }
  return scene;
}

void check_scene(const SyntheticScene& scene) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "scene: " + what); };
  if (scene.gt_triplets.size() != scene.interactions.size()) fail("triplet/interaction count mismatch");
  std::vector<int> membership(scene.instances.size(), 0);
  for (std::size_t k = 0; k < scene.interactions.size(); ++k) {
    const auto& inter = scene.interactions[k];
    if (inter.subject_instance >= scene.instances.size() || inter.object_instance >= scene.instances.size()) {
      fail("interaction references a missing instance");
    }
    const auto& t = scene.gt_triplets[k];
    const auto& s = scene.instances[inter.subject_instance];
    const auto& o = scene.instances[inter.object_instance];
    if (!t.subject_box || !t.object_box) fail("gt triplet without boxes");
    if (!t.subject_box->same_extent(s.box) || !t.object_box->same_extent(o.box)) fail("gt box differs from instance box");
    if (t.subject != s.category || t.object != o.category || t.predicate != inter.predicate) fail("gt labels differ");
    ++membership[inter.subject_instance];
    ++membership[inter.object_instance];
  }
  for (std::size_t i = 0; i < scene.instances.size(); ++i) {
    const auto& inst = scene.instances[i];
    validate(inst.box);
    if (inst.box.x2 > scene.width || inst.box.y2 > scene.height || inst.box.x1 < 0 || inst.box.y1 < 0) {
      fail("instance box outside image");
    }
    if (inst.interacting != (membership[i] > 0)) fail("interacting flag disagrees with gt triplets");
  }
}

EmbeddingModel make_embedding_model(const Vocabulary& vocab, const EmbeddingConfig& config, std::uint64_t seed) {
  if (config.dim < 1) throw Error(ErrorCode::ConfigInvalid, "embedding dim must be positive");
  const auto d = static_cast<std::size_t>(config.dim);
  Rng rng(seed);
  auto draw = [&](std::size_t n) {
    Matrix m(n, d);
    for (std::size_t r = 0; r < n; ++r) {
      for (auto& x : m.row(r)) x = rng.normal();
      normalize_in_place(m.row(r));
    }
    return m;
  };
  EmbeddingModel model;
  model.object_vectors = draw(vocab.objects().size());
  model.predicate_vectors = draw(vocab.predicates().size());
  model.noise_sigma = config.noise_sigma;
  model.interaction_mix = config.interaction_mix;
  return model;
}

TokenMatrix interaction_tokens(const std::vector<Triplet>& triplets, const Vocabulary& vocab,
                               const EmbeddingModel& model) {
  const std::size_t d = model.dim();
  Matrix m(2 * triplets.size(), d);
  auto lookup = [](std::optional<std::size_t> idx, const std::string& name) {
    if (!idx) throw Error(ErrorCode::UnknownCategory, "'" + name + "' has no embedding");
    return *idx;
  };
  for (std::size_t k = 0; k < triplets.size(); ++k) {
    const auto& t = triplets[k];
    const auto s = model.object_vectors.row(lookup(vocab.object_index(t.subject), t.subject));
    const auto o = model.object_vectors.row(lookup(vocab.object_index(t.object), t.object));
    const auto p = model.predicate_vectors.row(lookup(vocab.predicate_index(t.predicate), t.predicate));
    auto sp = m.row(2 * k);
    auto po = m.row(2 * k + 1);
    for (std::size_t i = 0; i < d; ++i) {
      sp[i] = s[i] + p[i];
      po[i] = p[i] + o[i];
    }
    normalize_in_place(sp);
    normalize_in_place(po);
  }
  return TokenMatrix(std::move(m), TokenRole::Interaction);
}

SceneTokens embed_scene(const SyntheticScene& scene, const Vocabulary& vocab, const EmbeddingModel& model,
                        int background_tokens, const std::vector<Triplet>& first_pass) {
  if (background_tokens < 0) throw Error(ErrorCode::ConfigInvalid, "background_tokens must be >= 0");
  const std::size_t d = model.dim();
  const std::size_t n_inst = scene.instances.size();
  const std::size_t n_v = n_inst + static_cast<std::size_t>(background_tokens);
  Rng rng(substream_seed(scene.seed, 0xE3BEDull));
  const double noise_std = model.noise_sigma / std::sqrt(static_cast<double>(d));

  Matrix v(n_v, d);
  for (std::size_t i = 0; i < n_inst; ++i) {
    const auto& inst = scene.instances[i];
    if (inst.category_id < 0 || static_cast<std::size_t>(inst.category_id) >= model.object_vectors.rows()) {
      throw Error(ErrorCode::UnknownCategory, "instance category '" + inst.category + "' has no embedding");
    }
    auto row = v.row(i);
    add_scaled(row, model.object_vectors.row(static_cast<std::size_t>(inst.category_id)), 1.0);
    if (inst.interacting) {
      const auto& inter = scene.interactions.at(static_cast<std::size_t>(inst.interaction_id));
      add_scaled(row, model.predicate_vectors.row(static_cast<std::size_t>(inter.predicate_id)),
                 model.interaction_mix);
    }
    if (noise_std > 0.0) {
      for (auto& x : row) x += noise_std * rng.normal();
    }
    normalize_in_place(row);
  }
  for (std::size_t i = n_inst; i < n_v; ++i) {
    auto row = v.row(i);
    for (auto& x : row) x = rng.normal();
    normalize_in_place(row);
  }

  SceneTokens tokens;
  tokens.visual = TokenMatrix(std::move(v), TokenRole::Visual);
  tokens.object_classes = TokenMatrix(model.object_vectors, TokenRole::ObjectClass);
  tokens.relation_classes = TokenMatrix(model.predicate_vectors, TokenRole::RelationClass);
  tokens.interactions = interaction_tokens(first_pass, vocab, model);
  tokens.instance_tokens = n_inst;
  return tokens;
}

}  // namespace sggmech
