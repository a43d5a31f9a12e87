#include "sggmech/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sggmech/error.hpp"

namespace sggmech {

Json box_to_json(const BoundingBox& b) { return Json::array({b.x1, b.y1, b.x2, b.y2}); }

BoundingBox box_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw Error(ErrorCode::InvalidArgument, "box must be [x1,y1,x2,y2]");
  for (const auto& v : j) {
    if (!v.is_number()) throw Error(ErrorCode::InvalidArgument, "box coordinate is not a number");
  }
  BoundingBox b = make_box(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>());
  validate(b);
  return b;
}

Json triplet_to_json(const Triplet& t) {
  Json j = {{"subject", t.subject}, {"predicate", t.predicate}, {"object", t.object}};
  if (t.subject_box) j["subject_box"] = box_to_json(*t.subject_box);
  if (t.object_box) j["object_box"] = box_to_json(*t.object_box);
  if (t.confidence) j["confidence"] = *t.confidence;
  return j;
}

namespace {
std::string required_string(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_string() || j[key].get<std::string>().empty()) {
    throw Error(ErrorCode::InvalidArgument, std::string("missing or empty string field '") + key + "'");
  }
  return j[key].get<std::string>();
}
}  // namespace

Triplet triplet_from_json(const Json& j) {
  Triplet t;
  t.subject = required_string(j, "subject");
  t.predicate = required_string(j, "predicate");
  t.object = required_string(j, "object");
  if (j.contains("subject_box")) t.subject_box = box_from_json(j["subject_box"]);
  if (j.contains("object_box")) t.object_box = box_from_json(j["object_box"]);
  if (j.contains("confidence")) {
    if (!j["confidence"].is_number()) throw Error(ErrorCode::InvalidArgument, "confidence is not a number");
    t.confidence = j["confidence"].get<double>();
  }
  return t;
}

void for_each_jsonl(const std::filesystem::path& path, const std::function<void(const Json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw MalformedRecordError(line_no, e.what());
    }
    try {
      fn(j, line_no);
    } catch (const MalformedRecordError&) {
      throw;
    } catch (const std::exception& e) {
      throw MalformedRecordError(line_no, e.what());
    }
  }
  if (in.bad()) throw Error(ErrorCode::Io, "read failed on " + path.string());
}

void write_triplet_jsonl(const std::filesystem::path& path, const std::vector<TripletRecord>& records) {
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const auto& r : records) {
    Json j = {{"subject", r.triplet.subject},
              {"predicate", r.triplet.predicate},
              {"object", r.triplet.object},
              {"caption_id", r.caption_id}};
    lines.push_back(j.dump());
  }
  write_lines(path, lines);
}

std::vector<TripletRecord> read_triplet_jsonl(const std::filesystem::path& path) {
  std::vector<TripletRecord> out;
  for_each_jsonl(path, [&](const Json& j, std::size_t) {
    TripletRecord r;
    r.triplet.subject = required_string(j, "subject");
    r.triplet.predicate = required_string(j, "predicate");
    r.triplet.object = required_string(j, "object");
    if (j.contains("caption_id")) {
      r.caption_id = j["caption_id"].is_string() ? j["caption_id"].get<std::string>() : j["caption_id"].dump();
    }
    out.push_back(std::move(r));
  });
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write failed on " + path.string());
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  std::string content;
  for (const auto& l : lines) {
    content += l;
    content.push_back('\n');
  }
  write_file(path, content);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json vocabulary_to_json(const Vocabulary& v) {
  Json base_o = Json::array();
  for (auto i : v.base_objects()) base_o.push_back(v.objects()[i]);
  Json base_p = Json::array();
  for (auto i : v.base_predicates()) base_p.push_back(v.predicates()[i]);
  return {{"objects", v.objects()}, {"predicates", v.predicates()}, {"base_objects", base_o},
          {"base_predicates", base_p}};
}

Vocabulary vocabulary_from_json(const Json& j) {
  try {
    auto objects = j.at("objects").get<std::vector<std::string>>();
    auto predicates = j.at("predicates").get<std::vector<std::string>>();
    auto resolve = [](const std::vector<std::string>& all, const Json& names, const char* kind) {
      std::vector<std::size_t> idx;
      for (const auto& n : names) {
        auto name = n.get<std::string>();
        auto it = std::find(all.begin(), all.end(), name);
        if (it == all.end()) {
          throw Error(ErrorCode::ConfigInvalid, std::string("base ") + kind + " '" + name + "' not in vocabulary");
        }
        idx.push_back(static_cast<std::size_t>(it - all.begin()));
      }
      return idx;
    };
    auto base_o = resolve(objects, j.value("base_objects", Json::array()), "object");
    auto base_p = resolve(predicates, j.value("base_predicates", Json::array()), "predicate");
    return Vocabulary(std::move(objects), std::move(predicates), std::move(base_o), std::move(base_p));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("vocabulary: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw Error(ErrorCode::ConfigInvalid, e.what());
    throw;
  }
}

}  // namespace sggmech
