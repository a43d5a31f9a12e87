#include "sggmech/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "sggmech/error.hpp"

namespace sggmech {

namespace {

// base form -> past participle
const std::unordered_map<std::string, std::string>& irregular_table() {
  static const std::unordered_map<std::string, std::string> table = {
      {"arise", "arisen"},   {"bear", "borne"},      {"beat", "beaten"},   {"become", "become"},
      {"begin", "begun"},    {"bend", "bent"},       {"bind", "bound"},    {"bite", "bitten"},
      {"blow", "blown"},     {"break", "broken"},    {"bring", "brought"}, {"build", "built"},
      {"buy", "bought"},     {"catch", "caught"},    {"choose", "chosen"}, {"cling", "clung"},
      {"come", "come"},      {"cut", "cut"},         {"dig", "dug"},       {"do", "done"},
      {"draw", "drawn"},     {"drink", "drunk"},     {"drive", "driven"},  {"eat", "eaten"},
      {"fall", "fallen"},    {"feed", "fed"},        {"feel", "felt"},     {"fight", "fought"},
      {"find", "found"},     {"fly", "flown"},       {"forget", "forgotten"}, {"freeze", "frozen"},
      {"get", "got"},        {"give", "given"},      {"go", "gone"},       {"grind", "ground"},
      {"grow", "grown"},     {"hang", "hung"},       {"have", "had"},      {"hear", "heard"},
      {"hide", "hidden"},    {"hit", "hit"},         {"hold", "held"},     {"hurt", "hurt"},
      {"keep", "kept"},      {"kneel", "knelt"},     {"know", "known"},    {"lay", "laid"},
      {"lead", "led"},       {"leave", "left"},      {"lend", "lent"},     {"let", "let"},
      {"lie", "lain"},       {"light", "lit"},       {"lose", "lost"},     {"make", "made"},
      {"meet", "met"},       {"overtake", "overtaken"}, {"pay", "paid"},   {"put", "put"},
      {"read", "read"},      {"ride", "ridden"},     {"ring", "rung"},     {"rise", "risen"},
      {"run", "run"},        {"say", "said"},        {"see", "seen"},      {"seek", "sought"},
      {"sell", "sold"},      {"send", "sent"},       {"set", "set"},       {"shake", "shaken"},
      {"shine", "shone"},    {"shoot", "shot"},      {"show", "shown"},    {"shut", "shut"},
      {"sing", "sung"},      {"sink", "sunk"},       {"sit", "sat"},       {"sleep", "slept"},
      {"slide", "slid"},     {"speak", "spoken"},    {"spin", "spun"},     {"split", "split"},
      {"spread", "spread"},  {"stand", "stood"},     {"steal", "stolen"},  {"stick", "stuck"},
      {"sting", "stung"},    {"strike", "struck"},   {"sweep", "swept"},   {"swim", "swum"},
      {"swing", "swung"},    {"take", "taken"},      {"teach", "taught"},  {"tear", "torn"},
      {"tell", "told"},      {"think", "thought"},   {"throw", "thrown"},  {"wake", "woken"},
      {"wear", "worn"},      {"weave", "woven"},     {"win", "won"},       {"wind", "wound"},
      {"write", "written"},
  };
  return table;
}

const std::unordered_set<std::string>& participle_set() {
  static const std::unordered_set<std::string> set = [] {
    std::unordered_set<std::string> s;
    for (const auto& [base, part] : irregular_table()) s.insert(part);
    return s;
  }();
  return set;
}

const std::unordered_set<std::string>& spatial_words() {
  static const std::unordered_set<std::string> words = {
      "on",      "in",     "near",    "under",  "above",   "below",  "behind", "beside",
      "at",      "of",     "with",    "by",     "over",    "across", "along",  "against",
      "beneath", "around", "inside",  "outside", "between", "next",  "onto",   "into",
      "atop",    "underneath", "through", "toward", "towards", "upon", "within", "close",
      "for",     "from",   "to",      "front",  "top",     "without"};
  return words;
}

const std::unordered_set<std::string>& stop_words() {
  static const std::unordered_set<std::string> words = {
      "a",     "an",    "the",   "some",  "two",   "three", "four",  "several", "many",
      "his",   "her",   "their", "its",   "my",    "your",  "our",   "this",    "that",
      "these", "those", "is",    "are",   "was",   "were",  "be",    "being",   "been",
      "and",   "or",    "while", "who",   "which", "very",  "there", "it",      "he",
      "she",   "they",  "one",   "other", "another", "each", "every", "big",    "small",
      "large", "little", "young", "old"};
  return words;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

std::size_t vowel_groups(std::string_view w) {
  std::size_t groups = 0;
  bool in_group = false;
  for (char c : w) {
    const bool v = is_vowel(c) || (c == 'y' && in_group);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  return groups;
}

// Consonant-vowel-consonant ending on a single-syllable word: "hug" -> "hugg".
bool doubles_final_consonant(std::string_view w) {
  if (w.size() < 3) return false;
  const char c3 = w[w.size() - 1];
  const char v = w[w.size() - 2];
  const char c1 = w[w.size() - 3];
  if (is_vowel(c3) || c3 == 'w' || c3 == 'x' || c3 == 'y') return false;
  if (!is_vowel(v) || is_vowel(c1)) return false;
  return vowel_groups(w) == 1;
}

std::string regular_participle(std::string_view base) {
  std::string w(base);
  if (w.empty()) return w;
  if (w.back() == 'e') return w + "d";
  if (w.back() == 'y' && w.size() >= 2 && !is_vowel(w[w.size() - 2])) {
    return w.substr(0, w.size() - 1) + "ied";
  }
  if (doubles_final_consonant(w)) return w + w.back() + "ed";
  return w + "ed";
}

std::string ing_form(std::string_view base) {
  std::string w(base);
  if (w.size() > 2 && w.back() == 'e' && w[w.size() - 2] != 'e') return w.substr(0, w.size() - 1) + "ing";
  if (w.size() > 2 && w.ends_with("ie")) return w.substr(0, w.size() - 2) + "ying";
  if (doubles_final_consonant(w)) return w + w.back() + "ing";
  return w + "ing";
}

std::string third_person(std::string_view base) {
  std::string w(base);
  if (w.empty()) return w;
  if (w.back() == 'y' && w.size() >= 2 && !is_vowel(w[w.size() - 2])) return w.substr(0, w.size() - 1) + "ies";
  if (w.ends_with("s") || w.ends_with("sh") || w.ends_with("ch") || w.ends_with("x") || w.ends_with("o")) {
    return w + "es";
  }
  if (w == "have") return "has";
  return w + "s";
}

// Best-effort lemma for -ing and -s surface forms.
std::string lemmatize(std::string_view word) {
  const auto& table = irregular_table();
  std::string w(word);
  if (table.count(w)) return w;
  if (w == "has") return "have";
  if (w.size() > 4 && w.ends_with("ing")) {
    std::string stem = w.substr(0, w.size() - 3);
    if (stem.ends_with("y") && table.count(stem.substr(0, stem.size() - 1) + "ie")) {
      return stem.substr(0, stem.size() - 1) + "ie";
    }
    if (table.count(stem + "e")) return stem + "e";
    if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
        table.count(stem.substr(0, stem.size() - 1))) {
      return stem.substr(0, stem.size() - 1);
    }
    if (table.count(stem)) return stem;
    if (stem.size() >= 3 && stem[stem.size() - 1] == stem[stem.size() - 2] && !is_vowel(stem.back()) &&
        stem.back() != 'l' && stem.back() != 's' && stem.back() != 'z') {
      return stem.substr(0, stem.size() - 1);
    }
    return stem;
  }
  if (w.size() > 3 && w.ends_with("ies")) {
    std::string base = w.substr(0, w.size() - 3) + "y";
    return base;
  }
  if (w.size() > 3 && w.ends_with("s") && !w.ends_with("ss")) {
    std::string stem = w.substr(0, w.size() - 1);
    if (table.count(stem)) return stem;
    if (w.ends_with("es") && table.count(w.substr(0, w.size() - 2))) return w.substr(0, w.size() - 2);
    return stem;
  }
  return w;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string join_words(const std::vector<std::string>& words, std::size_t begin, std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += words[i];
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Maps every surface form of every lexicon entry back to itself (as word lists).
struct Lexicon {
  std::set<std::vector<std::string>> phrases;
  std::size_t longest = 1;
};

Lexicon build_lexicon(const ParserOptions& options) {
  Lexicon lex;
  for (const auto& entry : options.verbs) {
    auto words = split_words(lower(entry));
    if (words.empty()) continue;
    const std::string head = words.front();
    std::set<std::string> forms = {head};
    const std::string lemma = lemmatize(head);
    forms.insert(lemma);
    forms.insert(third_person(lemma));
    forms.insert(ing_form(lemma));
    forms.insert(past_participle(lemma));
    for (const auto& f : forms) {
      auto variant = words;
      variant.front() = f;
      lex.longest = std::max(lex.longest, variant.size());
      lex.phrases.insert(std::move(variant));
    }
  }
  return lex;
}

}  // namespace

ParserOptions ParserOptions::defaults() {
  ParserOptions o;
  o.verbs = {"hold",  "ride",  "wear",  "eat",   "carry", "throw", "catch", "pull",  "push",
             "watch", "touch", "kick",  "hit",   "feed",  "drive", "fly",   "walk",  "chase",
             "hug",   "use",   "cut",   "play",  "drink", "read",  "bite",  "lick",  "sit",
             "stand", "lay",   "lie",   "hang",  "cover", "park",  "graze", "swing", "lean",
             "look at", "sit on", "stand on", "lay on", "lie on", "hang from", "lean on",
             "walk on", "park on", "play with", "talk on", "stand next to"};
  return o;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    while (!cur.empty() && (cur.back() == '-' || cur.back() == '\'')) cur.pop_back();
    if (!cur.empty()) tokens.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isalnum(u) || u >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if ((ch == '-' || ch == '\'') && !cur.empty()) {
      cur.push_back(ch);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

std::vector<Triplet> parse_caption(std::string_view caption, const ParserOptions& options) {
  std::vector<Triplet> out;
  if (caption.empty()) return out;
  const Lexicon lex = build_lexicon(options);

  // Clauses never span sentence punctuation.
  std::vector<std::string> clauses;
  std::string cur;
  for (char c : caption) {
    if (c == '.' || c == ',' || c == ';' || c == '!' || c == '?' || c == '\n') {
      clauses.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  clauses.push_back(cur);

  const auto& stops = stop_words();
  const auto& spatial = spatial_words();

  for (const auto& clause : clauses) {
    const auto tokens = tokenize(clause);
    std::vector<bool> is_verb(tokens.size(), false);

    struct VerbSpan {
      std::size_t begin;
      std::size_t end;
    };
    std::vector<VerbSpan> spans;
    for (std::size_t i = 0; i < tokens.size();) {
      std::size_t matched = 0;
      for (std::size_t len = std::min(lex.longest, tokens.size() - i); len >= 1; --len) {
        std::vector<std::string> window(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                        tokens.begin() + static_cast<std::ptrdiff_t>(i + len));
        if (lex.phrases.count(window)) {
          matched = len;
          break;
        }
      }
      if (matched == 0) {
        ++i;
        continue;
      }
      std::size_t end = i + matched;
      // A bare verb followed by a preposition absorbs it ("sitting on").
      if (matched == 1 && end < tokens.size() && spatial.count(tokens[end])) ++end;
      spans.push_back({i, end});
      for (std::size_t k = i; k < end; ++k) is_verb[k] = true;
      i = end;
    }

    auto is_content = [&](std::size_t k) {
      return !is_verb[k] && !stops.count(tokens[k]) && !spatial.count(tokens[k]);
    };

    for (const auto& span : spans) {
      std::optional<std::size_t> subj;
      for (std::size_t k = span.begin; k-- > 0;) {
        if (is_verb[k]) break;
        if (is_content(k)) {
          subj = k;
          break;
        }
      }
      std::optional<std::size_t> obj;
      for (std::size_t k = span.end; k < tokens.size(); ++k) {
        if (is_verb[k]) break;
        if (spatial.count(tokens[k])) break;
        if (is_content(k)) {
          obj = k;
          break;
        }
      }
      if (!subj || !obj) continue;
      Triplet t;
      t.subject = tokens[*subj];
      t.predicate = join_words(tokens, span.begin, span.end);
      t.object = tokens[*obj];
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::size_t irregular_participle_count() { return irregular_table().size(); }

bool is_spatial_predicate(std::string_view predicate) {
  const auto words = split_words(lower(trim(predicate)));
  return !words.empty() && spatial_words().count(words.front()) > 0;
}

std::string past_participle(std::string_view verb) {
  const std::string w = lower(trim(verb));
  const auto& table = irregular_table();
  if (auto it = table.find(w); it != table.end()) return it->second;
  if (participle_set().count(w)) return w;
  if (w.size() > 3 && w.ends_with("ed") && !w.ends_with("eed")) return w;
  const std::string lemma = lemmatize(w);
  if (auto it = table.find(lemma); it != table.end()) return it->second;
  return regular_participle(lemma);
}

std::string RuleCounterAction::generate(std::string_view verb) const {
  auto words = split_words(lower(trim(verb)));
  if (words.empty()) throw Error(ErrorCode::InvalidArgument, "empty verb");
  if (spatial_words().count(words.front())) return join_words(words, 0, words.size());
  words.front() = past_participle(words.front());
  return join_words(words, 0, words.size()) + " by";
}

std::string normalize_counter_action(std::string_view raw) {
  std::string s = lower(trim(raw));
  auto strip_quotes = [](std::string& v) {
    while (!v.empty() && (v.front() == '\'' || v.front() == '"' || v.front() == '`')) v.erase(v.begin());
    while (!v.empty() && (v.back() == '\'' || v.back() == '"' || v.back() == '`' || v.back() == '.')) {
      v.pop_back();
    }
  };
  strip_quotes(s);
  s = trim(s);
  if (s.starts_with("be ")) s = trim(s.substr(3));
  const auto words = split_words(s);
  return join_words(words, 0, words.size());
}

std::string counter_action(std::string_view verb, const CounterActionBackend& backend) {
  if (trim(verb).empty()) throw Error(ErrorCode::InvalidArgument, "empty verb");
  return normalize_counter_action(backend.generate(verb));
}

BidirectionalPrompt build_bidirectional_prompt(const Triplet& t, const CounterActionBackend& backend) {
  if (t.subject.empty() || t.predicate.empty() || t.object.empty()) {
    throw Error(ErrorCode::InvalidArgument, "triplet has an empty component");
  }
  BidirectionalPrompt p;
  p.forward = t.subject + " " + t.predicate + " " + t.object;
  p.backward = t.object + " " + counter_action(t.predicate, backend) + " " + t.subject;
  p.combined = p.forward + ". " + p.backward + ".";
  return p;
}

std::pair<std::string, std::string> decompose_triplet(const Triplet& t) {
  if (t.subject.empty() || t.predicate.empty() || t.object.empty()) {
    throw Error(ErrorCode::InvalidArgument, "triplet has an empty component");
  }
  return {t.subject + " " + t.predicate, t.predicate + " " + t.object};
}

std::string join_categories(const std::vector<std::string>& categories) {
  std::string out;
  for (const auto& c : categories) {
    if (!out.empty()) out.push_back(' ');
    out += c;
    out.push_back('.');
  }
  return out;
}

}  // namespace sggmech
