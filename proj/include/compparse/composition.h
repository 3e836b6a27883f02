#pragma once

// Subtree vectors c_i, updated whenever an arc is created.
//
//   rc:  c_h <- tanh(W [c_h; c_d; r] + b)
//   lc:  c_h <- h-output of a shared LSTM cell fed [c_h; c_d; r], with a
//        carry private to each head, started from zero on its first dependent

#include <optional>
#include <random>
#include <vector>

#include "compparse/autodiff.h"
#include "compparse/config.h"
#include "compparse/lstm.h"

namespace compparse {

struct CompositionParams {
  ad::Parameter* rc_weights = nullptr;  // d_c x (2 d_c + d_r)
  ad::Parameter* rc_bias = nullptr;     // d_c x 1
  LstmCellParams lc;                    // input 2 d_c + d_r, hidden d_c
  ad::Parameter* relations = nullptr;   // d_r x 2|labels|, column = vocab.relation()

  static CompositionParams create(ad::ParameterStore& store, const ReprConfig& cfg,
                                  int relation_count, std::mt19937_64& rng);
  static CompositionParams bind(ad::ParameterStore& store, const ReprConfig& cfg);
};

struct SubtreeState {
  ad::Expr c;
  std::optional<ad::Expr> lstm_memory;  // lc only, after the first attachment
};

SubtreeState init_subtree(const ad::Expr& token_vector);

/// Graph-local composition functions plus the per-sentence subtree table.
class Composer {
 public:
  Composer(ad::Graph& g, const CompositionParams& params, const ReprConfig& cfg);

  SubtreeState compose_rc(const SubtreeState& head, const SubtreeState& dep,
                          const ad::Expr& rel) const;
  SubtreeState compose_lc(const SubtreeState& head, const SubtreeState& dep,
                          const ad::Expr& rel) const;
  ad::Expr relation(int relation_index) const;

  // Starts a sentence: c_i = v_i for every position.
  void reset(const std::vector<ad::Expr>& token_vectors);
  // Updates the head's subtree after an arc; a no-op without composition.
  void on_arc(int head, int dependent, int relation_index);

  const SubtreeState& state(int pos) const { return states_.at(pos); }
  std::size_t size() const { return states_.size(); }

 private:
  ad::Graph* graph_;
  const CompositionParams* params_;
  const ReprConfig* cfg_;
  std::vector<ad::Expr> tokens_;
  std::vector<SubtreeState> states_;
  std::optional<LstmCell> cell_;
  ad::Expr rc_w_, rc_b_;
};

}  // namespace compparse
