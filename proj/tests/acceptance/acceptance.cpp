// Acceptance suite: `acceptance N` checks criterion N, `acceptance` checks all.
// Each criterion prints one line starting with "Criterion N: PASS" or "FAIL".
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unistd.h>

#include <fmt/format.h>

#include "sggmech/config.hpp"
#include "sggmech/evaluation.hpp"
#include "sggmech/experiments.hpp"
#include "sggmech/gradcheck.hpp"
#include "sggmech/json_io.hpp"
#include "sggmech/losses.hpp"
#include "sggmech/matching.hpp"
#include "sggmech/query_selection.hpp"
#include "sggmech/rng.hpp"
#include "sggmech/scene.hpp"
#include "sggmech/text.hpp"
#include "sggmech/token_matrix.hpp"

namespace fs = std::filesystem;
using namespace sggmech;

namespace {

// Pinned tolerances and limits.
constexpr double kMatchingSeconds = 5.0;
constexpr double kGiouTol = 1e-9;
constexpr double kFocalTol = 1e-9;
constexpr double kBceTol = 1e-9;
constexpr double kVrdTol = 1e-12;
constexpr double kRrdTol = 1e-9;
constexpr double kGradTol = 1e-4;
constexpr double kGradSeconds = 10.0;
constexpr double kRrdInvariantMax = 1e-8;
constexpr double kVrdMovedMin = 0.05;
constexpr double kSelectionSeconds = 60.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Outcome matching_equivalence() {
  Rng rng(substream_seed(1, 1));
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t mismatches = 0, square = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t r = 1 + rng.below(8), c = 1 + rng.below(8);
    square += r == c;
    Matrix m(r, c);
    // Every fourth matrix uses small integers so exact ties are common.
    for (double& v : m.data()) v = trial % 4 == 0 ? static_cast<double>(rng.below(5)) : rng.uniform(0.0, 10.0);
    if (hungarian(m).total_cost != brute_force_assignment(m).total_cost) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < kMatchingSeconds,
          fmt::format("1000 matrices ({} square), {} cost mismatches, {:.2f}s (limit {}s)", square, mismatches, secs,
                      kMatchingSeconds)};
}

EdgeFeature edge(std::vector<double> v) {
  EdgeFeature e;
  e.vector = std::move(v);
  e.is_negative = true;
  return e;
}

Outcome loss_fixtures() {
  const double giou = giou_loss({0, 0, 1, 1}, {2, 0, 3, 1});
  const double focal = focal_loss(0.5, 1.0, 0.0);
  const double bce = bce_relation_loss(Matrix(1, 1, 0.5), Matrix(1, 1, 1.0));
  const double vrd = vrd_loss(std::vector{edge({1, 2})}, std::vector{edge({0, 0})});
  const double rrd = rrd_loss(std::vector{edge({1, 0}), edge({1, 0})}, std::vector{edge({1, 0}), edge({0, 1})});
  const double ln2 = std::log(2.0);
  const bool ok = std::abs(giou - 4.0 / 3.0) <= kGiouTol && std::abs(focal - ln2) <= kFocalTol &&
                  std::abs(bce - ln2) <= kBceTol && std::abs(vrd - 3.0) <= kVrdTol && std::abs(rrd - 0.5) <= kRrdTol;
  return {ok, fmt::format("giou {:.15g}, focal {:.15g}, bce {:.15g}, vrd {:.15g}, rrd {:.15g}", giou, focal, bce, vrd,
                          rrd)};
}

Outcome gradient_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto reports = run_gradient_suite(substream_seed(1, 3), 100, kGradTol);
  const double secs = seconds_since(t0);
  bool ok = secs < kGradSeconds;
  std::string detail;
  for (const auto& r : reports) {
    if (r.name == "quadratic") continue;
    ok = ok && r.passed && r.points == 100;
    detail += fmt::format("{} {:.2e} ({} skipped); ", r.name, r.max_rel_error, r.skipped);
  }
  return {ok, detail + fmt::format("{:.2f}s (limit {}s)", secs, kGradSeconds)};
}

Outcome distill_invariance() {
  Rng rng(substream_seed(1, 4));
  double worst_rrd = 0.0, least_vrd = INFINITY;
  for (int trial = 0; trial < 50; ++trial) {
    Matrix teacher(8, 16);
    for (double& v : teacher.data()) v = rng.normal();
    const Matrix q = random_orthogonal(16, rng.next_u64());
    const double scale = rng.uniform(0.5, 2.0);
    Matrix student(8, 16);
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t r = 0; r < 16; ++r) student(i, r) = scale * dot(q.row(r), teacher.row(i));
    }
    worst_rrd = std::max(worst_rrd, rrd_loss(student, teacher));
    least_vrd = std::min(least_vrd, vrd_loss(student, teacher));
  }
  return {worst_rrd < kRrdInvariantMax && least_vrd > kVrdMovedMin,
          fmt::format("50 edge sets: max rrd {:.3e} (< {}), min vrd {:.4f} (> {})", worst_rrd, kRrdInvariantMax,
                      least_vrd, kVrdMovedMin)};
}

std::vector<std::size_t> sort_oracle(const std::vector<double>& s, std::size_t k) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] != s[b] ? s[a] > s[b] : a < b; });
  idx.resize(k);
  return idx;
}

TokenMatrix random_tokens(Rng& rng, std::size_t r, std::size_t d, TokenRole role) {
  Matrix m(r, d);
  for (double& v : m.data()) v = rng.normal();
  return TokenMatrix(std::move(m), role);
}

std::vector<double> raw_max_dot(const TokenMatrix& v, const TokenMatrix& keys) {
  std::vector<double> out(v.rows(), -INFINITY);
  for (std::size_t i = 0; i < v.rows(); ++i) {
    for (std::size_t j = 0; j < keys.rows(); ++j) out[i] = std::max(out[i], dot(v.row(i), keys.row(j)));
  }
  return out;
}

Outcome selection_correctness() {
  Rng rng(substream_seed(1, 5));
  std::size_t topk_bad = 0, step2_bad = 0, gamma_bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(50);
    std::vector<double> s(n);
    for (double& x : s) x = static_cast<double>(rng.below(8)) / 7.0;
    const std::size_t k = 1 + rng.below(n);
    topk_bad += top_k(s, k) != sort_oracle(s, k);
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(40), d = 1 + rng.below(8);
    const auto v = random_tokens(rng, n, d, TokenRole::Visual);
    const auto tin = random_tokens(rng, 1 + rng.below(4), d, TokenRole::Interaction);
    const auto to = random_tokens(rng, 1 + rng.below(6), d, TokenRole::ObjectClass);
    const auto tr = random_tokens(rng, 1 + rng.below(6), d, TokenRole::RelationClass);
    const std::size_t k = 1 + rng.below(n), l = rng.below(k + 1);
    const auto sel = step2_select(v, tin, to, k, l, rng.uniform(), tr);
    const std::set<std::size_t> prefix(sel.indices.begin(), sel.indices.begin() + static_cast<std::ptrdiff_t>(l));
    const std::set<std::size_t> rest(sel.indices.begin() + static_cast<std::ptrdiff_t>(l), sel.indices.end());
    bool ok = sel.indices.size() == k && sel.interaction_count == l && prefix.size() == l && rest.size() == k - l;
    for (std::size_t i : rest) ok = ok && !prefix.count(i);
    step2_bad += !ok;

    const auto g1 = step1_scores(v, to, tr, 1.0);
    gamma_bad += top_k(g1, n) != sort_oracle(raw_max_dot(v, to), n);
  }
  return {topk_bad == 0 && step2_bad == 0 && gamma_bad == 0,
          fmt::format("top_k mismatches {}/1000, step2 violations {}/1000, gamma=1 argsort mismatches {}/1000",
                      topk_bad, step2_bad, gamma_bad)};
}

Triplet boxed(std::string s, std::string p, std::string o, BoundingBox sb, BoundingBox ob) {
  return Triplet{std::move(s), std::move(p), std::move(o), sb, ob, std::nullopt};
}

Outcome recall_evaluator() {
  Rng rng(substream_seed(1, 6));
  const std::vector<std::string> labels{"man", "horse", "dog"}, preds{"ride", "hold"};
  std::size_t unequal = 0, exceeded = 0, nonmonotone = 0;
  auto check_all = [&](const std::vector<RankedPrediction>& p, const std::vector<Triplet>& g, bool expect_equal) {
    double prev = 0.0;
    for (std::size_t k = 1; k <= 10; ++k) {
      const double greedy = recall_at_k(p, g, k), best = oracle_recall(p, g, k);
      if (expect_equal && greedy != best) ++unequal;
      if (greedy > best) ++exceeded;
      if (greedy < prev) ++nonmonotone;
      prev = greedy;
    }
  };
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Triplet> gts;
    const std::size_t n_gt = 1 + rng.below(6);
    for (std::size_t g = 0; g < n_gt; ++g) {
      const double x = 100.0 * static_cast<double>(g);
      gts.push_back(boxed(labels[rng.below(3)], preds[rng.below(2)], labels[rng.below(3)], {x, 0, x + 10, 10},
                          {x, 20, x + 10, 30}));
    }
    std::vector<RankedPrediction> p;
    const std::size_t n_pred = rng.below(13);
    for (std::size_t i = 0; i < n_pred; ++i) {
      Triplet t = gts[rng.below(n_gt)];
      if (rng.uniform() < 0.3) t.predicate = t.predicate == "ride" ? "hold" : "ride";
      p.push_back({t, static_cast<double>(rng.below(5)), "img"});
    }
    check_all(p, gts, true);
  }
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Triplet> gts;
    const std::size_t n_gt = 1 + rng.below(6);
    for (std::size_t g = 0; g < n_gt; ++g) {
      const double x = rng.uniform(0, 3);
      gts.push_back(boxed("man", "ride", "horse", {x, 0, x + 10, 10}, {20, 20, 30, 30}));
    }
    std::vector<RankedPrediction> p;
    const std::size_t n_pred = rng.below(13);
    for (std::size_t i = 0; i < n_pred; ++i) {
      const double x = rng.uniform(-2, 5);
      p.push_back({boxed("man", "ride", "horse", {x, 0, x + 10, 10}, {20, 20, 30, 30}), rng.uniform(), "img"});
    }
    check_all(p, gts, false);
  }
  return {unequal == 0 && exceeded == 0 && nonmonotone == 0,
          fmt::format("separated: {} greedy/oracle differences; adversarial: {} greedy > oracle; {} K-monotonicity "
                      "violations (10 K values x 1000 fixtures)",
                      unequal, exceeded, nonmonotone)};
}

fs::path source_path(const std::string& rel) { return fs::path(SGGMECH_SOURCE_DIR) / rel; }

Outcome selection_direction() {
  const auto t0 = std::chrono::steady_clock::now();
  auto config = load_config(source_path("configs/selection.json"));
  const auto noisy = run_selection_experiment(config);
  config.embedding.noise_sigma = 0.0;
  const auto clean = run_selection_experiment(config);
  const double secs = seconds_since(t0);
  const bool ok = noisy.step2_mean > noisy.baseline_mean && clean.prefix_eligible > 0 &&
                  clean.prefix_exact_fraction == 1.0 && secs < kSelectionSeconds;
  return {ok, fmt::format("{} scenes: interaction-guided {:.4f} vs object-only {:.4f} (paired diff {:.4f}, 95% CI "
                          "[{:.4f}, {:.4f}]); noise 0 prefix exact {:.4f} over {} scenes; {:.2f}s",
                          noisy.scenes.size(), noisy.step2_mean, noisy.baseline_mean, noisy.diff_mean,
                          noisy.diff_ci_low, noisy.diff_ci_high, clean.prefix_exact_fraction, clean.prefix_eligible,
                          secs)};
}

Outcome infusion_direction() {
  auto config = load_config(source_path("configs/infusion.json"));
  const auto with_bonus = run_infusion_experiment(config);
  config.grounding.interaction_bonus = 0.0;
  const auto no_bonus = run_infusion_experiment(config);
  const bool ok = with_bonus.bidirectional_fraction() > with_bonus.object_only_fraction() &&
                  no_bonus.bidirectional_correct == no_bonus.object_only_correct;
  return {ok, fmt::format("bonus 0.3: bidirectional {:.4f} vs object-only {:.4f} over {} triplets; bonus 0: {} vs {}",
                          with_bonus.bidirectional_fraction(), with_bonus.object_only_fraction(), with_bonus.triplets,
                          no_bonus.bidirectional_correct, no_bonus.object_only_correct)};
}

Outcome prompt_goldens() {
  const RuleCounterAction rules;
  const std::string ride = counter_action("ride", rules), eat = counter_action("eat", rules),
                    hold = counter_action("hold", rules);
  const Triplet t{"man", "hold", "surfboard", std::nullopt, std::nullopt, std::nullopt};
  const std::string prompt = build_bidirectional_prompt(t, rules).combined;
  const bool ok = ride == "ridden by" && eat == "eaten by" && hold == "held by" &&
                  prompt == "man hold surfboard. surfboard held by man.";
  return {ok, fmt::format("ride->'{}', eat->'{}', hold->'{}', prompt '{}'", ride, eat, hold, prompt)};
}

// ---------------------------------------------------------------------------
// CLI determinism

std::string quote(const fs::path& p) { return "'" + p.string() + "'"; }

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  if (!fs::exists(dir)) return files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return files;
}

void write_inputs(const fs::path& in) {
  write_file(in / "config.json", R"({"master_seed": 7, "scenes": 16, "selection": {"K": 6, "L": 4},
"distill": {"edges": 8, "descent_steps": 20}})");
  write_file(in / "captions.txt",
             "c1\ta man riding a horse on the beach\n"
             "c2\tthe woman holds an umbrella\n"
             "a dog is eating pizza next to a child\n"
             "c4\ttwo men sitting on a bench\n");

  ExperimentConfig config;
  config.master_seed = 7;
  const auto model = config_embedding_model(config);
  const auto scene = gen_scene(config, scene_seed(config, 0));
  const auto tokens = embed_scene(scene, config.vocabulary, model, 8, scene.gt_triplets);
  write_token_matrix_text(in / "visual.txt", tokens.visual);
  write_token_matrix_text(in / "objects.txt", tokens.object_classes);
  write_token_matrix_text(in / "relations.txt", tokens.relation_classes);
  write_token_matrix_binary(in / "interactions.bin", tokens.interactions);

  Rng rng(substream_seed(1, 10));
  std::string cost = "6 5\n";
  for (int i = 0; i < 30; ++i) cost += fmt::format("{}{}", rng.uniform(0.0, 4.0), i % 5 == 4 ? "\n" : " ");
  write_file(in / "cost.txt", cost);

  std::vector<RankedPrediction> preds;
  std::vector<std::string> gt_lines;
  for (std::size_t s = 0; s < 12; ++s) {
    const auto sc = gen_scene(config, scene_seed(config, s));
    const std::string id = fmt::format("img{:02}", s);
    for (const auto& t : sc.gt_triplets) {
      gt_lines.push_back(Json{{"image_id", id}, {"triplet", triplet_to_json(t)}}.dump());
      Triplet p = t;
      if (rng.uniform() < 0.3) p.predicate = config.vocabulary.predicates()[rng.below(config.vocabulary.predicates().size())];
      preds.push_back({p, rng.uniform(), id});
      Triplet swapped = t;
      std::swap(swapped.subject_box, swapped.object_box);
      preds.push_back({swapped, rng.uniform(), id});
    }
  }
  write_predictions_jsonl(in / "preds.jsonl", preds);
  write_lines(in / "gt.jsonl", gt_lines);
}

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / fmt::format("sggmech_accept_{}", ::getpid());
  fs::remove_all(root);
  const fs::path in = root / "in";
  write_inputs(in);
  const std::string cli = quote(SGGMECH_CLI);
  const std::string cfg = " --config " + quote(in / "config.json");

  // Commands take the output directory as their last argument.
  std::vector<std::pair<std::string, std::string>> commands{
      {"parse", "parse --input " + quote(in / "captions.txt")},
      {"prompt", "prompt" + cfg + " --input " + quote(in / "triplets.jsonl")},
      {"ground", "ground" + cfg},
      {"select", "select" + cfg + " --visual " + quote(in / "visual.txt") + " --objects " + quote(in / "objects.txt") +
                     " --relations " + quote(in / "relations.txt") + " --interactions " +
                     quote(in / "interactions.bin")},
      {"match", "match --cost " + quote(in / "cost.txt")},
      {"match_brute", "match --brute-force --cost " + quote(in / "cost.txt")},
      {"eval", "eval" + cfg + " --predictions " + quote(in / "preds.jsonl") + " --ground-truth " +
                   quote(in / "gt.jsonl")},
      {"experiment_selection", "experiment selection" + cfg},
      {"experiment_distill", "experiment distill" + cfg},
      {"experiment_infusion", "experiment infusion" + cfg},
      {"gradcheck", "gradcheck" + cfg + " --points 10"},
  };

  std::vector<std::string> failures;
  std::size_t files = 0;
  for (const auto& [name, args] : commands) {
    std::map<std::string, std::string> reference;
    bool first = true;
    for (const char* threads : {"1", "1", "8", "8"}) {
      const fs::path out = root / "runs" / fmt::format("{}_{}_{}", name, threads, first ? "a" : "b");
      fs::remove_all(out);
      const std::string cmd =
          fmt::format("SGG_MECH_THREADS={} {} {} --seed 11 --out {} > /dev/null 2>&1", threads, cli, args, quote(out));
      const int rc = std::system(cmd.c_str());
      const auto snap = snapshot(out);
      if (rc != 0 || snap.empty()) {
        failures.push_back(fmt::format("{} exit {} with {} files", name, rc, snap.size()));
        break;
      }
      if (first) {
        reference = snap;
        files += snap.size();
        // Later commands read the parser output.
        if (name == "parse") fs::copy_file(out / "triplets.jsonl", in / "triplets.jsonl", fs::copy_options::overwrite_existing);
      } else if (snap != reference) {
        failures.push_back(fmt::format("{} differs at SGG_MECH_THREADS={}", name, threads));
        break;
      }
      first = false;
    }
  }
  fs::remove_all(root);
  std::string detail = fmt::format("{} commands x 4 runs (threads 1,1,8,8), {} output files compared", commands.size(),
                                   files);
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

const std::vector<std::function<Outcome()>> kCriteria{
    matching_equivalence, loss_fixtures,       gradient_suite,     distill_invariance, selection_correctness,
    recall_evaluator,     selection_direction, infusion_direction, prompt_goldens,     cli_determinism,
};

bool run(std::size_t n) {
  Outcome o;
  try {
    o = kCriteria.at(n - 1)();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  fmt::print("Criterion {}: {}  {}\n", n, o.pass ? "PASS" : "FAIL", o.detail);
  std::fflush(stdout);
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    const long n = std::strtol(argv[1], nullptr, 10);
    if (n < 1 || n > static_cast<long>(kCriteria.size())) {
      fmt::print(stderr, "usage: acceptance [1-{}]\n", kCriteria.size());
      return 2;
    }
    return run(static_cast<std::size_t>(n)) ? 0 : 1;
  }
  bool all = true;
  for (std::size_t n = 1; n <= kCriteria.size(); ++n) all = run(n) && all;
  return all ? 0 : 1;
}
