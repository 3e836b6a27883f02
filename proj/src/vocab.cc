#include "compparse/vocab.h"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "compparse/config.h"

namespace compparse {

std::string to_string(Extractor e) {
  switch (e) {
    case Extractor::Bi: return "bi";
    case Extractor::Backward: return "bw";
    case Extractor::Forward: return "fw";
  }
  return "?";
}

std::string to_string(Composition c) {
  switch (c) {
    case Composition::None: return "none";
    case Composition::Recurrent: return "rc";
    case Composition::Lstm: return "lc";
  }
  return "?";
}

std::string to_string(CompositionInputs c) {
  return c == CompositionInputs::Subtree ? "subtree" : "token";
}

Extractor parse_extractor(std::string_view s) {
  if (s == "bi") return Extractor::Bi;
  if (s == "bw") return Extractor::Backward;
  if (s == "fw") return Extractor::Forward;
  throw std::invalid_argument("unknown extractor '" + std::string(s) + "' (bi|bw|fw)");
}

Composition parse_composition(std::string_view s) {
  if (s == "none") return Composition::None;
  if (s == "rc") return Composition::Recurrent;
  if (s == "lc") return Composition::Lstm;
  throw std::invalid_argument("unknown composition '" + std::string(s) + "' (none|rc|lc)");
}

CompositionInputs parse_composition_inputs(std::string_view s) {
  if (s == "subtree") return CompositionInputs::Subtree;
  if (s == "token") return CompositionInputs::Token;
  throw std::invalid_argument("unknown composition inputs '" + std::string(s) +
                              "' (subtree|token)");
}

std::map<std::string, std::string> ReprConfig::to_map() const {
  return {
      {"use_pos", use_pos ? "1" : "0"},
      {"use_char", use_char ? "1" : "0"},
      {"extractor", to_string(extractor)},
      {"composition", to_string(composition)},
      {"composition_inputs", to_string(composition_inputs)},
      {"word_dim", std::to_string(word_dim)},
      {"pos_dim", std::to_string(pos_dim)},
      {"char_dim", std::to_string(char_dim)},
      {"char_hidden", std::to_string(char_hidden)},
      {"seq_hidden", std::to_string(seq_hidden)},
      {"relation_dim", std::to_string(relation_dim)},
      {"mlp_hidden", std::to_string(mlp_hidden)},
  };
}

ReprConfig ReprConfig::from_map(const std::map<std::string, std::string>& kv) {
  ReprConfig c;
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument(std::string("config: missing key ") + key);
    return it->second;
  };
  c.use_pos = get("use_pos") == "1";
  c.use_char = get("use_char") == "1";
  c.extractor = parse_extractor(get("extractor"));
  c.composition = parse_composition(get("composition"));
  c.composition_inputs = parse_composition_inputs(get("composition_inputs"));
  c.word_dim = std::stoi(get("word_dim"));
  c.pos_dim = std::stoi(get("pos_dim"));
  c.char_dim = std::stoi(get("char_dim"));
  c.char_hidden = std::stoi(get("char_hidden"));
  c.seq_hidden = std::stoi(get("seq_hidden"));
  c.relation_dim = std::stoi(get("relation_dim"));
  c.mlp_hidden = std::stoi(get("mlp_hidden"));
  return c;
}

Vocabulary Vocabulary::build(const Treebank& tb, int min_count) {
  std::map<std::string, int> counts;
  std::vector<std::string> order;
  std::set<std::string> tags;
  std::set<char32_t> chars;
  std::set<std::string> labels;
  for (const auto& s : tb.sentences) {
    for (const auto& t : s.tokens) {
      if (counts[t.form]++ == 0) order.push_back(t.form);
      if (t.upos) tags.insert(*t.upos);
      chars.insert(t.chars.begin(), t.chars.end());
      if (t.deprel) labels.insert(universal_relation(*t.deprel));
    }
  }
  Vocabulary v;
  v.words_ = {"<unk>", "<root>"};
  v.freqs_ = {0, 0};
  for (const auto& w : order) {
    if (counts[w] < min_count) continue;
    v.words_.push_back(w);
    v.freqs_.push_back(counts[w]);
  }
  v.tags_ = {"<unk>", "<root>"};
  v.tags_.insert(v.tags_.end(), tags.begin(), tags.end());
  // 0 unknown, 1 the root token's only character
  v.chars_ = {0, 1};
  v.chars_.insert(v.chars_.end(), chars.begin(), chars.end());
  v.labels_.assign(labels.begin(), labels.end());
  v.reindex();
  return v;
}

Vocabulary Vocabulary::from_tables(std::vector<std::string> words, std::vector<int> freqs,
                                   std::vector<std::string> tags, std::vector<char32_t> chars,
                                   std::vector<std::string> labels) {
  if (words.size() != freqs.size()) throw std::invalid_argument("vocabulary: frequency table size");
  if (words.size() < 2 || tags.size() < 2 || chars.size() < 2)
    throw std::invalid_argument("vocabulary: reserved entries missing");
  Vocabulary v;
  v.words_ = std::move(words);
  v.freqs_ = std::move(freqs);
  v.tags_ = std::move(tags);
  v.chars_ = std::move(chars);
  v.labels_ = std::move(labels);
  v.reindex();
  return v;
}

void Vocabulary::reindex() {
  word_index_.clear();
  tag_index_.clear();
  char_index_.clear();
  label_index_.clear();
  for (std::size_t i = 2; i < words_.size(); ++i) word_index_[words_[i]] = static_cast<int>(i);
  for (std::size_t i = 2; i < tags_.size(); ++i) tag_index_[tags_[i]] = static_cast<int>(i);
  for (std::size_t i = 2; i < chars_.size(); ++i) char_index_[chars_[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < labels_.size(); ++i) label_index_[labels_[i]] = static_cast<int>(i);
}

int Vocabulary::word(std::string_view form) const {
  auto it = word_index_.find(std::string(form));
  return it == word_index_.end() ? kUnknown : it->second;
}

int Vocabulary::pos(const std::optional<std::string>& upos) const {
  if (!upos) return kUnknown;
  auto it = tag_index_.find(*upos);
  return it == tag_index_.end() ? kUnknown : it->second;
}

int Vocabulary::character(char32_t ch) const {
  auto it = char_index_.find(ch);
  return it == char_index_.end() ? kUnknown : it->second;
}

int Vocabulary::label(std::string_view deprel) const {
  auto it = label_index_.find(universal_relation(deprel));
  return it == label_index_.end() ? -1 : it->second;
}

}  // namespace compparse
