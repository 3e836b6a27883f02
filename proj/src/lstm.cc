#include "compparse/lstm.h"

#include <stdexcept>

namespace compparse {

LstmCellParams LstmCellParams::create(ad::ParameterStore& store, const std::string& prefix,
                                      int input_dim, int hidden_dim, std::mt19937_64& rng) {
  LstmCellParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  const int h = hidden_dim;
  ad::Matrix w(4 * h, input_dim + h);
  // Glorot per gate block: fan_in = d_in + h, fan_out = h.
  const double limit = std::sqrt(6.0 / static_cast<double>(input_dim + 2 * h));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index j = 0; j < w.cols(); ++j)
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
  ad::Matrix b = ad::Matrix::Zero(4 * h, 1);
  b.middleRows(h, h).setOnes();
  p.weights = &store.add(prefix + ".W", std::move(w));
  p.bias = &store.add(prefix + ".b", std::move(b));
  return p;
}

LstmCellParams LstmCellParams::bind(ad::ParameterStore& store, const std::string& prefix) {
  LstmCellParams p;
  p.weights = &store.get(prefix + ".W");
  p.bias = &store.get(prefix + ".b");
  p.hidden_dim = static_cast<int>(p.weights->rows() / 4);
  p.input_dim = static_cast<int>(p.weights->cols()) - p.hidden_dim;
  return p;
}

LstmCell::LstmCell(ad::Graph& g, const LstmCellParams& params)
    : graph_(&g),
      params_(params),
      weights_(g.parameter(*params.weights)),
      bias_(g.parameter(*params.bias)) {}

LstmState LstmCell::initial_state() const {
  return {graph_->zeros(params_.hidden_dim), graph_->zeros(params_.hidden_dim)};
}

LstmState LstmCell::step(const LstmState& state, const ad::Expr& x) const {
  const int h = params_.hidden_dim;
  if (x.rows() != params_.input_dim || x.cols() != 1)
    throw std::invalid_argument("lstm step: input has " + std::to_string(x.rows()) +
                                " rows, cell expects " + std::to_string(params_.input_dim));
  if (state.h.rows() != h || state.c.rows() != h)
    throw std::invalid_argument("lstm step: state dimension mismatch");
  auto z = ad::affine(weights_, ad::concat({x, state.h}), bias_);
  auto hc = ad::lstm_cell(z, state.c);
  return {ad::slice(hc, 0, h), ad::slice(hc, h, h)};
}

LstmState lstm_step(ad::Graph& g, const LstmCellParams& params, const LstmState& state,
                    const ad::Expr& x) {
  return LstmCell(g, params).step(state, x);
}

std::vector<ad::Expr> run_lstm(const LstmCell& cell, const std::vector<ad::Expr>& xs,
                               Direction direction) {
  if (xs.empty()) throw std::invalid_argument("run_lstm: empty sequence");
  std::vector<ad::Expr> out(xs.size());
  auto state = cell.initial_state();
  if (direction == Direction::Forward) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      state = cell.step(state, xs[i]);
      out[i] = state.h;
    }
  } else {
    for (std::size_t i = xs.size(); i-- > 0;) {
      state = cell.step(state, xs[i]);
      out[i] = state.h;
    }
  }
  return out;
}

std::vector<ad::Expr> run_lstm(ad::Graph& g, const LstmCellParams& params,
                               const std::vector<ad::Expr>& xs, Direction direction) {
  return run_lstm(LstmCell(g, params), xs, direction);
}

}  // namespace compparse
