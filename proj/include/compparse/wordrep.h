#pragma once

#include <random>
#include <unordered_map>
#include <vector>

#include "compparse/autodiff.h"
#include "compparse/config.h"
#include "compparse/conllu.h"
#include "compparse/lstm.h"
#include "compparse/vocab.h"

namespace compparse {

/// Embedding tables and encoders behind x_i and v_i. Only the parts the
/// configuration uses are created; unused pointers stay null.
struct WordRepParams {
  ad::Parameter* word_emb = nullptr;  // word_dim x |words|
  ad::Parameter* pos_emb = nullptr;   // pos_dim x |tags|
  ad::Parameter* char_emb = nullptr;  // char_dim x |chars|
  LstmCellParams char_fw, char_bw;
  LstmCellParams seq_fw, seq_bw;

  static WordRepParams create(ad::ParameterStore& store, const ReprConfig& cfg,
                              const Vocabulary& vocab, std::mt19937_64& rng);
  static WordRepParams bind(ad::ParameterStore& store, const ReprConfig& cfg);
};

/// Training-time word dropout: a word is replaced by the unknown index with
/// probability alpha / (alpha + freq(w)).
struct WordDropout {
  double alpha = 0.25;
  std::mt19937_64* rng = nullptr;
};

/// Graph-local encoder for one sentence at a time.
class TokenEncoder {
 public:
  TokenEncoder(ad::Graph& g, const WordRepParams& params, const ReprConfig& cfg,
               const Vocabulary& vocab);

  // x_i = e(w) . p(w) . [char_fw ; char_bw]; absent parts are omitted.
  ad::Expr type_vector(const Token& token, const WordDropout* dropout = nullptr);
  ad::Expr root_type_vector();

  // Token vectors for positions 0..n, position 0 being the root symbol, which
  // runs through the sequence encoder like any other token.
  std::vector<ad::Expr> extract_tokens(const Sentence& sentence,
                                       const WordDropout* dropout = nullptr);

  // Applies the configured feature function to precomputed type vectors.
  std::vector<ad::Expr> encode(const std::vector<ad::Expr>& type_vectors);

 private:
  ad::Expr char_component(const std::u32string& chars);
  ad::Expr assemble(int word, int pos, const std::u32string* chars);

  ad::Graph* graph_;
  const WordRepParams* params_;
  const ReprConfig* cfg_;
  const Vocabulary* vocab_;
  std::optional<LstmCell> char_fw_, char_bw_, seq_fw_, seq_bw_;
  std::unordered_map<std::u32string, ad::Expr> char_cache_;
};

}  // namespace compparse
