#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace compparse {

/// Raised for malformed CoNLL-U input. The message names the sentence ordinal
/// (1-based) and the input line number.
class ConlluError : public std::runtime_error {
 public:
  ConlluError(const std::string& what, std::size_t sentence, std::size_t line);
  std::size_t sentence() const { return sentence_; }
  std::size_t line() const { return line_; }

 private:
  std::size_t sentence_;
  std::size_t line_;
};

struct Token {
  int id = 0;
  std::string form;
  std::optional<std::string> upos;
  // 0 is the artificial root.
  std::optional<int> head;
  std::optional<std::string> deprel;
  std::u32string chars;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::vector<std::string> comments;

  std::size_t size() const { return tokens.size(); }
  bool has_heads() const;
  // Gold head array indexed by position; entry 0 is unused and set to -1.
  std::vector<int> heads() const;
  bool operator==(const Sentence&) const = default;
};

struct Treebank {
  std::string name;
  std::vector<Sentence> sentences;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
};

std::u32string decode_utf8(std::string_view s);

// Strips a relation subtype: "nmod:poss" -> "nmod".
std::string universal_relation(std::string_view deprel);

Treebank parse_conllu(std::string_view text, std::string name = "");
std::string write_conllu(const Treebank& tb);

Treebank read_conllu_file(const std::string& path);
void write_conllu_file(const Treebank& tb, const std::string& path);

// Checks that heads[1..n] form a tree rooted at 0 (in range, no self loops,
// acyclic). heads[0] is ignored. Returns an empty string when valid,
// otherwise a short description of the violation.
std::string tree_violation(const std::vector<int>& heads);

struct TreebankStats {
  std::optional<double> right_headedness;
  std::optional<double> left_headedness;
  double avg_dependency_length = 0.0;
  double avg_sentence_length = 0.0;
  double avg_arc_depth = 0.0;
  double nonprojective_arc_fraction = 0.0;

  // Counts behind the averages, so stats of disjoint treebanks can be pooled.
  std::size_t sentence_count = 0;
  std::size_t token_count = 0;
  std::size_t arc_count = 0;
  std::size_t content_arc_count = 0;
};

const std::set<std::string>& default_content_relations();

TreebankStats treebank_stats(const Treebank& tb,
                             const std::set<std::string>& content_relations =
                                 default_content_relations());

// Depth of every position in the tree given by heads (root 0 has depth 0).
std::vector<int> arc_depths(const std::vector<int>& heads);

// Marks each dependent d whose arc (heads[d], d) is crossed by another arc.
std::vector<bool> crossed_arcs(const std::vector<int>& heads);

}  // namespace compparse
