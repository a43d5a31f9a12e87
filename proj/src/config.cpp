#include "sggmech/config.hpp"

#include <cmath>
#include <set>

#include "sggmech/error.hpp"
#include "sggmech/json_io.hpp"

namespace sggmech {

Vocabulary ExperimentConfig::default_vocabulary() {
  std::vector<std::string> objects = {"man",   "woman",   "child",  "dog",      "horse",     "bike",
                                      "surfboard", "skateboard", "kite", "umbrella", "frisbee", "ball",
                                      "hat",   "shirt",   "bench",  "table",    "plate",     "pizza",
                                      "cup",   "car",     "elephant", "giraffe", "boat",     "phone"};
  std::vector<std::string> predicates = {"hold", "ride",  "wear",  "eat",   "carry", "throw",
                                         "pull", "watch", "touch", "kick",  "feed",  "sit on"};
  const std::set<std::string> novel_objects = {"woman", "skateboard", "giraffe", "cup", "phone", "pizza"};
  const std::set<std::string> novel_predicates = {"carry", "kick", "feed"};
  std::vector<std::size_t> base_o;
  std::vector<std::size_t> base_p;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    if (!novel_objects.count(objects[i])) base_o.push_back(i);
  }
  for (std::size_t i = 0; i < predicates.size(); ++i) {
    if (!novel_predicates.count(predicates[i])) base_p.push_back(i);
  }
  return Vocabulary(std::move(objects), std::move(predicates), std::move(base_o), std::move(base_p));
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

void require(bool ok, const std::string& what) {
  if (!ok) invalid(what);
}

bool finite_in(double v, double lo, double hi) { return std::isfinite(v) && v >= lo && v <= hi; }

// Reads the keys of one JSON object into typed fields and rejects keys nobody claimed.
class Section {
 public:
  Section(const nlohmann::json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) invalid(name_ + " must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) invalid("unknown key '" + name_ + "." + it.key() + "'");
    }
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      invalid(name_ + "." + key + ": " + e.what());
    }
  }

  const nlohmann::json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

 private:
  const nlohmann::json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

void ExperimentConfig::validate() const {
  require(scenes >= 1, "scenes must be >= 1");
  require(std::isfinite(scene.width) && std::isfinite(scene.height) && scene.width > 0 && scene.height > 0,
          "scene extent must be positive");
  require(scene.interactions >= 1, "scene.interactions must be >= 1");
  require(scene.distractors >= 0, "scene.distractors must be >= 0");
  require(scene.background_tokens >= 0, "scene.background_tokens must be >= 0");
  require(scene.min_box > 0 && scene.max_box >= scene.min_box, "scene box size range invalid");
  require(scene.max_box <= std::min(scene.width, scene.height), "scene.max_box exceeds image extent");
  require(static_cast<std::size_t>(2 * scene.interactions) <= vocabulary.objects().size(),
          "vocabulary has too few objects for distinct interaction categories");
  require(!vocabulary.predicates().empty(), "vocabulary has no predicates");
  require(embedding.dim >= 2, "embedding.dim must be >= 2");
  require(finite_in(embedding.noise_sigma, 0.0, 1e6), "embedding.noise_sigma must be >= 0");
  require(finite_in(embedding.interaction_mix, 0.0, 1.0), "embedding.interaction_mix must be in [0,1]");
  require(selection.K >= 1, "selection.K must be >= 1");
  require(selection.L >= 0 && selection.L <= selection.K, "selection.L must be in [0, K]");
  require(finite_in(selection.gamma_balance, 0.0, 1.0), "selection.gamma_balance must be in [0,1]");
  require(finite_in(selection.predicate_flip_prob, 0.0, 1.0), "selection.predicate_flip_prob must be in [0,1]");
  require(finite_in(grounding.interaction_bonus, 0.0, 1.0), "grounding.interaction_bonus must be in [0,1]");
  require(finite_in(grounding.base_score_min, 0.0, 1.0) && finite_in(grounding.base_score_max, 0.0, 1.0) &&
              grounding.base_score_min <= grounding.base_score_max,
          "grounding base score range invalid");
  require(std::isfinite(grounding.conf_threshold) && std::isfinite(grounding.iou_threshold),
          "grounding thresholds must be finite");
  for (double w : {losses.beta1, losses.beta2, losses.alpha_focal, losses.gamma_focal, losses.match_cls,
                   losses.match_l1, losses.match_giou}) {
    require(finite_in(w, 0.0, 1e12), "loss weights must be finite and non-negative");
  }
  require(distill.edges >= 2, "distill.edges must be >= 2");
  require(distill.descent_steps >= 0, "distill.descent_steps must be >= 0");
  require(distill.step_size > 0 && std::isfinite(distill.step_size), "distill.step_size must be positive");
  require(finite_in(distill.perturb_sigma, 0.0, 1e6), "distill.perturb_sigma must be >= 0");
  require(counter_action_backend == "rules" || counter_action_backend == "llm",
          "counter_action_backend must be 'rules' or 'llm'");
  require(llm.timeout_ms > 0 && llm.retries >= 0, "llm timeout/retries invalid");
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  {
    Section root(j, "config");
    root.read("master_seed", c.master_seed);
    root.read("scenes", c.scenes);
    root.read("counter_action_backend", c.counter_action_backend);
    if (auto* s = root.child("scene")) {
      Section sec(*s, "scene");
      sec.read("width", c.scene.width);
      sec.read("height", c.scene.height);
      sec.read("interactions", c.scene.interactions);
      sec.read("distractors", c.scene.distractors);
      sec.read("background_tokens", c.scene.background_tokens);
      sec.read("min_box", c.scene.min_box);
      sec.read("max_box", c.scene.max_box);
    }
    if (auto* s = root.child("embedding")) {
      Section sec(*s, "embedding");
      sec.read("dim", c.embedding.dim);
      sec.read("noise_sigma", c.embedding.noise_sigma);
      sec.read("interaction_mix", c.embedding.interaction_mix);
    }
    if (auto* s = root.child("selection")) {
      Section sec(*s, "selection");
      sec.read("K", c.selection.K);
      sec.read("L", c.selection.L);
      sec.read("gamma_balance", c.selection.gamma_balance);
      sec.read("predicate_flip_prob", c.selection.predicate_flip_prob);
    }
    if (auto* s = root.child("grounding")) {
      Section sec(*s, "grounding");
      sec.read("interaction_bonus", c.grounding.interaction_bonus);
      sec.read("base_score_min", c.grounding.base_score_min);
      sec.read("base_score_max", c.grounding.base_score_max);
      sec.read("conf_threshold", c.grounding.conf_threshold);
      sec.read("iou_threshold", c.grounding.iou_threshold);
    }
    if (auto* s = root.child("losses")) {
      Section sec(*s, "losses");
      sec.read("beta1", c.losses.beta1);
      sec.read("beta2", c.losses.beta2);
      sec.read("alpha_focal", c.losses.alpha_focal);
      sec.read("gamma_focal", c.losses.gamma_focal);
      sec.read("match_cls", c.losses.match_cls);
      sec.read("match_l1", c.losses.match_l1);
      sec.read("match_giou", c.losses.match_giou);
      sec.read("rrd_negatives_only", c.losses.rrd_negatives_only);
    }
    if (auto* s = root.child("distill")) {
      Section sec(*s, "distill");
      sec.read("edges", c.distill.edges);
      sec.read("descent_steps", c.distill.descent_steps);
      sec.read("step_size", c.distill.step_size);
      sec.read("perturb_sigma", c.distill.perturb_sigma);
    }
    if (auto* s = root.child("llm")) {
      Section sec(*s, "llm");
      sec.read("url", c.llm.url);
      sec.read("timeout_ms", c.llm.timeout_ms);
      sec.read("retries", c.llm.retries);
    }
    if (auto* s = root.child("vocabulary")) c.vocabulary = vocabulary_from_json(*s);
  }
  c.validate();
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  return {
      {"master_seed", c.master_seed},
      {"scenes", c.scenes},
      {"counter_action_backend", c.counter_action_backend},
      {"scene",
       {{"width", c.scene.width},
        {"height", c.scene.height},
        {"interactions", c.scene.interactions},
        {"distractors", c.scene.distractors},
        {"background_tokens", c.scene.background_tokens},
        {"min_box", c.scene.min_box},
        {"max_box", c.scene.max_box}}},
      {"embedding",
       {{"dim", c.embedding.dim},
        {"noise_sigma", c.embedding.noise_sigma},
        {"interaction_mix", c.embedding.interaction_mix}}},
      {"selection",
       {{"K", c.selection.K},
        {"L", c.selection.L},
        {"gamma_balance", c.selection.gamma_balance},
        {"predicate_flip_prob", c.selection.predicate_flip_prob}}},
      {"grounding",
       {{"interaction_bonus", c.grounding.interaction_bonus},
        {"base_score_min", c.grounding.base_score_min},
        {"base_score_max", c.grounding.base_score_max},
        {"conf_threshold", c.grounding.conf_threshold},
        {"iou_threshold", c.grounding.iou_threshold}}},
      {"losses",
       {{"beta1", c.losses.beta1},
        {"beta2", c.losses.beta2},
        {"alpha_focal", c.losses.alpha_focal},
        {"gamma_focal", c.losses.gamma_focal},
        {"match_cls", c.losses.match_cls},
        {"match_l1", c.losses.match_l1},
        {"match_giou", c.losses.match_giou},
        {"rrd_negatives_only", c.losses.rrd_negatives_only}}},
      {"distill",
       {{"edges", c.distill.edges},
        {"descent_steps", c.distill.descent_steps},
        {"step_size", c.distill.step_size},
        {"perturb_sigma", c.distill.perturb_sigma}}},
      {"llm", {{"url", c.llm.url}, {"timeout_ms", c.llm.timeout_ms}, {"retries", c.llm.retries}}},
      {"vocabulary", vocabulary_to_json(c.vocabulary)},
  };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::ConfigInvalid, "config is not valid JSON: " + path.string());
  return config_from_json(j);
}

}  // namespace sggmech
