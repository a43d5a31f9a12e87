#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sggmech/geometry.hpp"
#include "sggmech/text.hpp"
#include "sggmech/vocabulary.hpp"

namespace sggmech {

using Json = nlohmann::json;

Json box_to_json(const BoundingBox& b);
// Accepts [x1,y1,x2,y2]; throws InvalidArgument on anything else.
BoundingBox box_from_json(const Json& j);

// {"subject","predicate","object"} plus "subject_box"/"object_box"/"confidence" when set.
Json triplet_to_json(const Triplet& t);
Triplet triplet_from_json(const Json& j);

struct TripletRecord {
  Triplet triplet;
  std::string caption_id;
};

// One {"subject","predicate","object","caption_id"} object per line.
void write_triplet_jsonl(const std::filesystem::path& path, const std::vector<TripletRecord>& records);
std::vector<TripletRecord> read_triplet_jsonl(const std::filesystem::path& path);

// Calls `fn(json, line_no)` per non-blank line. Parse failures and exceptions
// thrown by `fn` surface as MalformedRecordError with the 1-based line number.
void for_each_jsonl(const std::filesystem::path& path, const std::function<void(const Json&, std::size_t)>& fn);

// Writes `lines` joined with '\n' (trailing newline when non-empty).
void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// {"objects":[..],"predicates":[..],"base_objects":[names],"base_predicates":[names]}
Json vocabulary_to_json(const Vocabulary& v);
Vocabulary vocabulary_from_json(const Json& j);

}  // namespace sggmech
