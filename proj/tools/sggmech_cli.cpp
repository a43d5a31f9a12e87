#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "sggmech/config.hpp"
#include "sggmech/error.hpp"
#include "sggmech/evaluation.hpp"
#include "sggmech/experiments.hpp"
#include "sggmech/gradcheck.hpp"
#include "sggmech/grounding.hpp"
#include "sggmech/json_io.hpp"
#include "sggmech/matching.hpp"
#include "sggmech/query_selection.hpp"
#include "sggmech/report.hpp"
#include "sggmech/text.hpp"
#include "sggmech/token_matrix.hpp"

namespace fs = std::filesystem;
using namespace sggmech;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = "out";

  ExperimentConfig load() const {
    ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (seed) c.master_seed = *seed;
    c.validate();
    return c;
  }
  fs::path file(const std::string& name) const { return fs::path(out) / name; }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "experiment config JSON");
  app->add_option("--seed", c.seed, "override the master seed");
  app->add_option("--out", c.out, "output directory")->capture_default_str();
}

int cmd_parse(const Common& common, const std::string& input) {
  std::ifstream in(input);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + input);
  const auto options = ParserOptions::defaults();
  std::vector<TripletRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::string id = std::to_string(line_no);
    std::string caption = line;
    if (auto tab = line.find('\t'); tab != std::string::npos) {
      id = line.substr(0, tab);
      caption = line.substr(tab + 1);
    }
    for (auto& t : parse_caption(caption, options)) records.push_back({std::move(t), id});
  }
  write_triplet_jsonl(common.file("triplets.jsonl"), records);
  fmt::print("{} triplets\n", records.size());
  return kExitOk;
}

int cmd_prompt(const Common& common, const std::string& input) {
  const auto config = common.load();
  const auto backend = make_counter_action_backend(config);
  std::vector<std::string> lines;
  for (const auto& r : read_triplet_jsonl(input)) {
    const auto p = build_bidirectional_prompt(r.triplet, *backend);
    const auto [sp, po] = decompose_triplet(r.triplet);
    Json j = {{"caption_id", r.caption_id}, {"forward", p.forward}, {"backward", p.backward},
              {"combined", p.combined},     {"pair_sp", sp},         {"pair_po", po}};
    lines.push_back(j.dump());
  }
  write_lines(common.file("prompts.jsonl"), lines);
  fmt::print("{} prompts\n", lines.size());
  return kExitOk;
}

int cmd_ground(const Common& common) {
  const auto config = common.load();
  const auto labels = run_grounding(config);
  write_pseudo_labels(common.file("pseudo_labels.jsonl"), labels);
  fmt::print("{} pseudo-labels from {} scenes\n", labels.size(), config.scenes);
  return kExitOk;
}

struct SelectArgs {
  std::string visual, objects, relations, interactions;
  std::optional<std::size_t> k, l;
  std::optional<double> gamma;
};

int cmd_select(const Common& common, const SelectArgs& a) {
  const auto config = common.load();
  const auto v = read_token_matrix(a.visual, TokenRole::Visual);
  const auto to = read_token_matrix(a.objects, TokenRole::ObjectClass);
  const auto tr = read_token_matrix(a.relations, TokenRole::RelationClass);
  const TokenMatrix tin = a.interactions.empty() ? TokenMatrix(Matrix(0, v.dim()), TokenRole::Interaction)
                                                 : read_token_matrix(a.interactions, TokenRole::Interaction);
  const auto budget = scaled_budget(a.k.value_or(static_cast<std::size_t>(config.selection.K)),
                                    a.l.value_or(static_cast<std::size_t>(config.selection.L)), v.rows());
  const double gamma = a.gamma.value_or(config.selection.gamma_balance);
  const auto set = step2_select(v, tin, to, budget.k, budget.l, gamma, tr);
  Json j = {{"K", budget.k}, {"L", budget.l}, {"indices", set.indices}, {"interaction_count", set.interaction_count}};
  write_file(common.file("selection.json"), j.dump(2) + "\n");
  fmt::print("selected {} of {} tokens ({} by interaction)\n", set.indices.size(), v.rows(), set.interaction_count);
  return kExitOk;
}

// "rows cols" followed by rows*cols whitespace-separated numbers.
Matrix read_cost_matrix(const std::string& path) {
  std::istringstream in(read_file(path));
  std::size_t rows = 0, cols = 0;
  if (!(in >> rows >> cols)) throw MalformedRecordError(1, "cost header must be 'rows cols'");
  Matrix m(rows, cols);
  for (double& v : m.data()) {
    std::string tok;
    if (!(in >> tok)) throw MalformedRecordError(1, "cost matrix has fewer than rows*cols entries");
    try {
      std::size_t used = 0;
      v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw MalformedRecordError(1, "not a number: " + tok);
    }
  }
  std::string extra;
  if (in >> extra) throw MalformedRecordError(1, "cost matrix has more than rows*cols entries");
  return m;
}

int cmd_match(const Common& common, const std::string& cost_path, bool brute) {
  const Matrix cost = read_cost_matrix(cost_path);
  const auto a = brute ? brute_force_assignment(cost) : hungarian(cost);
  Json pairs = Json::array();
  for (const auto& [q, g] : a.pairs) pairs.push_back({q, g});
  Json j = {{"pairs", pairs}, {"total_cost", a.total_cost}};
  write_file(common.file("assignment.json"), j.dump(2) + "\n");
  fmt::print("{} pairs, total cost {}\n", a.pairs.size(), a.total_cost);
  return kExitOk;
}

int cmd_eval(const Common& common, const std::string& preds_path, const std::string& gt_path,
             const std::vector<std::string>& split_names) {
  const auto config = common.load();
  std::vector<SplitSpec> splits;
  for (const auto& s : split_names) splits.push_back(split_from_string(s));
  const auto images = group_by_image(read_predictions_jsonl(preds_path), read_ground_truth_jsonl(gt_path));
  const auto report = evaluate(images, config.vocabulary, splits);
  write_recall_csv(common.file("recall.csv"), report);
  for (const auto& [name, sr] : report.splits) {
    fmt::print("{:<15} R@20/50/100 {:.4f} {:.4f} {:.4f}  mR@20/50/100 {:.4f} {:.4f} {:.4f}\n", name, sr.recall[0],
               sr.recall[1], sr.recall[2], sr.mean_recall[0], sr.mean_recall[1], sr.mean_recall[2]);
  }
  return kExitOk;
}

void emit_both(const Common& common, const std::string& stem, const Report& report) {
  emit_report(report, ReportFormat::Csv, common.file(stem + ".csv"));
  emit_report(report, ReportFormat::Svg, common.file(stem + ".svg"));
  fmt::print("{}", render_csv(report));
}

int cmd_experiment(const Common& common, const std::string& name) {
  const auto config = common.load();
  if (name == "selection") {
    const auto r = run_selection_experiment(config);
    std::vector<std::string> lines{"scene,interacting,K,L,object_only,stage_one,interaction_guided,prefix"};
    for (std::size_t i = 0; i < r.scenes.size(); ++i) {
      const auto& s = r.scenes[i];
      lines.push_back(fmt::format("{},{},{},{},{},{},{},{}", i, s.interacting, s.k, s.l, s.baseline, s.step1,
                                  s.step2, s.prefix));
    }
    write_lines(common.file("selection_scenes.csv"), lines);
    emit_both(common, "selection", r.to_report());
  } else if (name == "distill") {
    const auto r = run_distill_experiment(config);
    std::vector<std::string> lines{"step,loss"};
    for (std::size_t i = 0; i < r.descent_trace.size(); ++i) lines.push_back(fmt::format("{},{}", i, r.descent_trace[i]));
    write_lines(common.file("distill_trace.csv"), lines);
    emit_both(common, "distill", r.to_report());
  } else {
    emit_both(common, "infusion", run_infusion_experiment(config).to_report());
  }
  return kExitOk;
}

int cmd_gradcheck(const Common& common, std::size_t points, double tolerance) {
  const auto config = common.load();
  const auto reports = run_gradient_suite(config.master_seed, points, tolerance);
  std::vector<std::string> lines{"loss,points,compared,skipped,max_rel_error,tolerance,pass"};
  bool ok = true;
  for (const auto& r : reports) {
    lines.push_back(fmt::format("{},{},{},{},{},{},{}", r.name, r.points, r.compared, r.skipped, r.max_rel_error,
                                r.tolerance, r.passed ? 1 : 0));
    fmt::print("{:<10} {:>4} points {:>5} compared {:>4} skipped  max rel err {:.3e}  {}\n", r.name, r.points,
               r.compared, r.skipped, r.max_rel_error, r.passed ? "ok" : "FAIL");
    ok = ok && r.passed;
  }
  write_lines(common.file("gradcheck.csv"), lines);
  return ok ? kExitOk : kExitFailure;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
      return kExitConfig;
    case ErrorCode::Io:
    case ErrorCode::MalformedRecord:
      return kExitIo;
    default:
      return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene-graph mechanism toolkit"};
  app.require_subcommand(1);

  Common common;
  std::string input;

  auto* parse = app.add_subcommand("parse", "captions (one per line, optional 'id<TAB>') to triplet JSONL");
  add_common(parse, common);
  parse->add_option("--input", input, "caption file")->required();

  auto* prompt = app.add_subcommand("prompt", "triplet JSONL to bidirectional prompts");
  add_common(prompt, common);
  prompt->add_option("--input", input, "triplet JSONL")->required();

  auto* ground = app.add_subcommand("ground", "mock grounding of synthetic scenes to pseudo-label JSONL");
  add_common(ground, common);

  SelectArgs sel;
  auto* select = app.add_subcommand("select", "token matrices to selected query indices");
  add_common(select, common);
  select->add_option("--visual", sel.visual)->required();
  select->add_option("--objects", sel.objects)->required();
  select->add_option("--relations", sel.relations)->required();
  select->add_option("--interactions", sel.interactions);
  select->add_option("--k", sel.k);
  select->add_option("--l", sel.l);
  select->add_option("--gamma", sel.gamma);

  std::string cost_path;
  bool brute = false;
  auto* match = app.add_subcommand("match", "cost matrix to minimum-cost assignment");
  add_common(match, common);
  match->add_option("--cost", cost_path, "text file: 'rows cols' then values")->required();
  match->add_flag("--brute-force", brute, "exhaustive reference solver");

  std::string preds_path, gt_path;
  std::vector<std::string> split_names{"joint", "novel_object", "novel_relation", "base_relation", "base_object"};
  auto* eval = app.add_subcommand("eval", "predictions and ground truth to a recall CSV");
  add_common(eval, common);
  eval->add_option("--predictions", preds_path)->required();
  eval->add_option("--ground-truth", gt_path)->required();
  eval->add_option("--splits", split_names)->delimiter(',')->capture_default_str();

  std::string experiment_name;
  auto* experiment = app.add_subcommand("experiment", "run a seeded experiment and emit CSV/SVG reports");
  add_common(experiment, common);
  experiment->add_option("name", experiment_name)->required()->check(CLI::IsMember({"selection", "distill", "infusion"}));

  std::size_t points = 100;
  double tolerance = 1e-4;
  auto* gradcheck = app.add_subcommand("gradcheck", "analytic versus finite-difference gradients");
  add_common(gradcheck, common);
  gradcheck->add_option("--points", points)->capture_default_str();
  gradcheck->add_option("--tolerance", tolerance)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (parse->parsed()) return cmd_parse(common, input);
    if (prompt->parsed()) return cmd_prompt(common, input);
    if (ground->parsed()) return cmd_ground(common);
    if (select->parsed()) return cmd_select(common, sel);
    if (match->parsed()) return cmd_match(common, cost_path, brute);
    if (eval->parsed()) return cmd_eval(common, preds_path, gt_path, split_names);
    if (experiment->parsed()) return cmd_experiment(common, experiment_name);
    if (gradcheck->parsed()) return cmd_gradcheck(common, points, tolerance);
  } catch (const MalformedRecordError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
