#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sggmech/geometry.hpp"

namespace sggmech {

// <subject, predicate, object> with optional grounding boxes.
struct Triplet {
  std::string subject;
  std::string predicate;
  std::string object;
  std::optional<BoundingBox> subject_box;
  std::optional<BoundingBox> object_box;
  std::optional<double> confidence;

  bool has_boxes() const noexcept { return subject_box.has_value() && object_box.has_value(); }
  bool same_labels(const Triplet& o) const noexcept {
    return subject == o.subject && predicate == o.predicate && object == o.object;
  }
};

struct BidirectionalPrompt {
  std::string forward;
  std::string backward;
  std::string combined;
};

// ---------------------------------------------------------------------------
// Caption parsing

struct ParserOptions {
  // Base verb forms and multiword predicates ("sitting on"). Inflected
  // surface forms (-s, -ing, participle) are derived automatically.
  std::vector<std::string> verbs;

  static ParserOptions defaults();
};

// Lowercase word tokens; punctuation other than intra-word '-' and '\'' is dropped.
std::vector<std::string> tokenize(std::string_view text);

// Pattern subject-verb-object extraction. Unparseable input yields an empty list.
std::vector<Triplet> parse_caption(std::string_view caption,
                                   const ParserOptions& options = ParserOptions::defaults());

// ---------------------------------------------------------------------------
// Counter-actions

class CounterActionBackend {
 public:
  virtual ~CounterActionBackend() = default;
  // Raw backend answer; counter_action() normalizes it.
  virtual std::string generate(std::string_view verb) const = 0;
};

// Built-in morphology: irregular participle table with regular "-ed" fallback.
class RuleCounterAction final : public CounterActionBackend {
 public:
  std::string generate(std::string_view verb) const override;
};

// Past participle of a single verb token, including -ing/-s surface forms.
std::string past_participle(std::string_view verb);

// True when the predicate head is a spatial preposition ("on", "next to").
bool is_spatial_predicate(std::string_view predicate);

std::size_t irregular_participle_count();

// Canonical "<participle> by" form: trims, lowercases, strips quotes, a
// trailing period, and a leading "be ".
std::string normalize_counter_action(std::string_view raw);

std::string counter_action(std::string_view verb, const CounterActionBackend& backend);

// ---------------------------------------------------------------------------
// Prompts

BidirectionalPrompt build_bidirectional_prompt(const Triplet& t, const CounterActionBackend& backend);

// ("subject predicate", "predicate object")
std::pair<std::string, std::string> decompose_triplet(const Triplet& t);

// "a. b. c." for a non-empty list.
std::string join_categories(const std::vector<std::string>& categories);

}  // namespace sggmech
