#pragma once

#include <map>
#include <string>
#include <string_view>

namespace compparse {

enum class Extractor { Bi, Backward, Forward };
enum class Composition { None, Recurrent, Lstm };
// What feeds [h; d] in the composition functions: the current subtree vectors
// (default) or the raw token vectors.
enum class CompositionInputs { Subtree, Token };

std::string to_string(Extractor e);
std::string to_string(Composition c);
std::string to_string(CompositionInputs c);
Extractor parse_extractor(std::string_view s);
Composition parse_composition(std::string_view s);
CompositionInputs parse_composition_inputs(std::string_view s);

/// Shape of the word and token representations; every ablation axis lives here.
struct ReprConfig {
  bool use_pos = true;
  bool use_char = true;
  Extractor extractor = Extractor::Bi;
  Composition composition = Composition::None;
  CompositionInputs composition_inputs = CompositionInputs::Subtree;

  int word_dim = 100;
  int pos_dim = 20;
  int char_dim = 24;
  int char_hidden = 50;
  int seq_hidden = 125;
  int relation_dim = 20;
  int mlp_hidden = 100;

  int type_dim() const {
    return word_dim + (use_pos ? pos_dim : 0) + (use_char ? 2 * char_hidden : 0);
  }
  int token_dim() const { return extractor == Extractor::Bi ? 2 * seq_hidden : seq_hidden; }
  // Width of one feature slot: v_i, or v_i followed by c_i under composition.
  int slot_width() const {
    return composition == Composition::None ? token_dim() : 2 * token_dim();
  }
  static constexpr int kSlots = 3;  // s1, s0, b0
  int feature_width() const { return kSlots * slot_width(); }

  std::map<std::string, std::string> to_map() const;
  static ReprConfig from_map(const std::map<std::string, std::string>& kv);

  bool operator==(const ReprConfig&) const = default;
};

}  // namespace compparse
