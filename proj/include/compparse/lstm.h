#pragma once

#include <string>
#include <vector>

#include "compparse/autodiff.h"

namespace compparse {

/// Parameters of one LSTM cell. The four gates are stored as row blocks of a
/// single matrix acting on [x; h]:
///
///   rows [0, h)   input gate
///   rows [h, 2h)  forget gate (bias initialised to 1)
///   rows [2h, 3h) output gate
///   rows [3h, 4h) candidate
struct LstmCellParams {
  ad::Parameter* weights = nullptr;  // 4h x (d_in + h)
  ad::Parameter* bias = nullptr;     // 4h x 1
  int input_dim = 0;
  int hidden_dim = 0;

  static LstmCellParams create(ad::ParameterStore& store, const std::string& prefix, int input_dim,
                               int hidden_dim, std::mt19937_64& rng);
  // Rebinds to parameters already present in the store (after loading).
  static LstmCellParams bind(ad::ParameterStore& store, const std::string& prefix);
};

struct LstmState {
  ad::Expr h;
  ad::Expr c;
};

enum class Direction { Forward, Backward };

/// Graph-local view of a cell: parameter expressions are created once per graph.
class LstmCell {
 public:
  LstmCell(ad::Graph& g, const LstmCellParams& params);

  LstmState initial_state() const;
  LstmState step(const LstmState& state, const ad::Expr& x) const;
  int hidden_dim() const { return params_.hidden_dim; }

 private:
  ad::Graph* graph_;
  LstmCellParams params_;
  ad::Expr weights_;
  ad::Expr bias_;
};

LstmState lstm_step(ad::Graph& g, const LstmCellParams& params, const LstmState& state,
                    const ad::Expr& x);

/// Runs the cell over xs. Output i is the hidden state after consuming
/// x_1..x_i (forward) or x_n..x_i (backward); outputs are index-aligned with xs.
std::vector<ad::Expr> run_lstm(const LstmCell& cell, const std::vector<ad::Expr>& xs,
                               Direction direction);
std::vector<ad::Expr> run_lstm(ad::Graph& g, const LstmCellParams& params,
                               const std::vector<ad::Expr>& xs, Direction direction);

}  // namespace compparse
