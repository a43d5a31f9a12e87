#include "sggmech/vocabulary.hpp"

#include <algorithm>

#include "sggmech/error.hpp"
#include "sggmech/text.hpp"

namespace sggmech {

namespace {

std::unordered_map<std::string, std::size_t> index_names(const std::vector<std::string>& names,
                                                         const char* kind) {
  std::unordered_map<std::string, std::size_t> lookup;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) {
      throw Error(ErrorCode::InvalidArgument, std::string("empty ") + kind + " category");
    }
    if (!lookup.emplace(names[i], i).second) {
      throw Error(ErrorCode::InvalidArgument, std::string("duplicate ") + kind + " category '" + names[i] + "'");
    }
  }
  return lookup;
}

std::vector<bool> mark_base(const std::vector<std::size_t>& base, std::size_t n, const char* kind) {
  std::vector<bool> flags(n, false);
  for (std::size_t idx : base) {
    if (idx >= n) throw Error(ErrorCode::InvalidArgument, std::string(kind) + " base index out of range");
    if (flags[idx]) throw Error(ErrorCode::InvalidArgument, std::string(kind) + " base index repeated");
    flags[idx] = true;
  }
  return flags;
}

std::vector<std::size_t> complement(const std::vector<bool>& flags) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (!flags[i]) out.push_back(i);
  }
  return out;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> objects, std::vector<std::string> predicates,
                       std::vector<std::size_t> base_objects, std::vector<std::size_t> base_predicates)
    : objects_(std::move(objects)),
      predicates_(std::move(predicates)),
      base_objects_(std::move(base_objects)),
      base_predicates_(std::move(base_predicates)) {
  object_lookup_ = index_names(objects_, "object");
  predicate_lookup_ = index_names(predicates_, "predicate");
  object_is_base_ = mark_base(base_objects_, objects_.size(), "object");
  predicate_is_base_ = mark_base(base_predicates_, predicates_.size(), "predicate");
  std::sort(base_objects_.begin(), base_objects_.end());
  std::sort(base_predicates_.begin(), base_predicates_.end());
}

std::vector<std::size_t> Vocabulary::novel_objects() const { return complement(object_is_base_); }
std::vector<std::size_t> Vocabulary::novel_predicates() const { return complement(predicate_is_base_); }

std::optional<std::size_t> Vocabulary::object_index(std::string_view name) const {
  auto it = object_lookup_.find(std::string(name));
  if (it == object_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Vocabulary::predicate_index(std::string_view name) const {
  auto it = predicate_lookup_.find(std::string(name));
  if (it == predicate_lookup_.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::is_base_object(std::string_view name) const {
  auto idx = object_index(name);
  if (!idx) throw Error(ErrorCode::UnknownCategory, "object '" + std::string(name) + "'");
  return object_is_base_[*idx];
}

bool Vocabulary::is_base_predicate(std::string_view name) const {
  auto idx = predicate_index(name);
  if (!idx) throw Error(ErrorCode::UnknownCategory, "predicate '" + std::string(name) + "'");
  return predicate_is_base_[*idx];
}

std::pair<std::string, std::string> build_vocab_prompt(const Vocabulary& v) {
  if (v.objects().empty() || v.predicates().empty()) {
    throw Error(ErrorCode::EmptyVocabulary, "vocabulary needs at least one object and one predicate");
  }
  return {join_categories(v.objects()), join_categories(v.predicates())};
}

}  // namespace sggmech
