#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "compparse/conllu.h"

namespace compparse {

/// Which side of the dependent the head is on.
enum class ArcDirection { Left = 0, Right = 1 };  // Left: head follows the dependent

/// Index maps for words, POS tags, characters and relation labels. Labels are
/// universal relations (subtypes stripped). Frozen after build().
class Vocabulary {
 public:
  static constexpr int kUnknown = 0;
  static constexpr int kRoot = 1;

  static Vocabulary build(const Treebank& tb, int min_count = 1);

  int word(std::string_view form) const;
  int pos(const std::optional<std::string>& upos) const;
  int character(char32_t ch) const;
  // -1 when the label never occurred in training.
  int label(std::string_view deprel) const;
  // Index of the (label, direction) pair in the relation embedding table.
  int relation(int label, ArcDirection dir) const { return 2 * label + static_cast<int>(dir); }

  std::size_t word_count() const { return words_.size(); }
  std::size_t pos_count() const { return tags_.size(); }
  std::size_t char_count() const { return chars_.size(); }
  std::size_t label_count() const { return labels_.size(); }
  std::size_t relation_count() const { return 2 * labels_.size(); }

  const std::string& word_string(int i) const { return words_.at(i); }
  const std::string& label_name(int i) const { return labels_.at(i); }
  // Training frequency of a word index (0 for reserved entries).
  int frequency(int word_index) const { return freqs_.at(word_index); }

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<int>& frequencies() const { return freqs_; }
  const std::vector<std::string>& tags() const { return tags_; }
  const std::vector<char32_t>& chars() const { return chars_; }
  const std::vector<std::string>& labels() const { return labels_; }

  // Rebuilds from stored tables (model loading); reserved entries included.
  static Vocabulary from_tables(std::vector<std::string> words, std::vector<int> freqs,
                                std::vector<std::string> tags, std::vector<char32_t> chars,
                                std::vector<std::string> labels);

  bool operator==(const Vocabulary& o) const {
    return words_ == o.words_ && freqs_ == o.freqs_ && tags_ == o.tags_ && chars_ == o.chars_ &&
           labels_ == o.labels_;
  }

 private:
  void reindex();

  std::vector<std::string> words_;
  std::vector<int> freqs_;
  std::vector<std::string> tags_;
  std::vector<char32_t> chars_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> word_index_;
  std::unordered_map<std::string, int> tag_index_;
  std::unordered_map<char32_t, int> char_index_;
  std::unordered_map<std::string, int> label_index_;
};

}  // namespace compparse
