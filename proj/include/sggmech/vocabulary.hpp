#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sggmech {

// Object and predicate categories with a base/novel partition. Indices not
// listed as base are novel, so the partition is exhaustive and disjoint.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> objects, std::vector<std::string> predicates,
             std::vector<std::size_t> base_objects, std::vector<std::size_t> base_predicates);

  const std::vector<std::string>& objects() const noexcept { return objects_; }
  const std::vector<std::string>& predicates() const noexcept { return predicates_; }
  const std::vector<std::size_t>& base_objects() const noexcept { return base_objects_; }
  const std::vector<std::size_t>& base_predicates() const noexcept { return base_predicates_; }
  std::vector<std::size_t> novel_objects() const;
  std::vector<std::size_t> novel_predicates() const;

  std::optional<std::size_t> object_index(std::string_view name) const;
  std::optional<std::size_t> predicate_index(std::string_view name) const;

  // Throw UnknownCategory for names outside the vocabulary.
  bool is_base_object(std::string_view name) const;
  bool is_base_predicate(std::string_view name) const;

 private:
  std::vector<std::string> objects_;
  std::vector<std::string> predicates_;
  std::vector<std::size_t> base_objects_;
  std::vector<std::size_t> base_predicates_;
  std::vector<bool> object_is_base_;
  std::vector<bool> predicate_is_base_;
  std::unordered_map<std::string, std::size_t> object_lookup_;
  std::unordered_map<std::string, std::size_t> predicate_lookup_;
};

// ("man. horse.", "riding. above.") in vocabulary order; no encoder special tokens.
std::pair<std::string, std::string> build_vocab_prompt(const Vocabulary& v);

}  // namespace sggmech
