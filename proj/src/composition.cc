#include "compparse/composition.h"

#include <stdexcept>

namespace compparse {

CompositionParams CompositionParams::create(ad::ParameterStore& store, const ReprConfig& cfg,
                                            int relation_count, std::mt19937_64& rng) {
  CompositionParams p;
  if (cfg.composition == Composition::None) return p;
  const int dc = cfg.token_dim();
  const int in = 2 * dc + cfg.relation_dim;
  p.relations = &store.add("comp.rel", cfg.relation_dim, relation_count,
                           ad::Init::EmbeddingUniform, rng);
  if (cfg.composition == Composition::Recurrent) {
    p.rc_weights = &store.add("comp.rc.W", dc, in, ad::Init::GlorotUniform, rng);
    p.rc_bias = &store.add("comp.rc.b", dc, 1, ad::Init::Zeros, rng);
  } else {
    p.lc = LstmCellParams::create(store, "comp.lc", in, dc, rng);
  }
  return p;
}

CompositionParams CompositionParams::bind(ad::ParameterStore& store, const ReprConfig& cfg) {
  CompositionParams p;
  if (cfg.composition == Composition::None) return p;
  p.relations = &store.get("comp.rel");
  if (cfg.composition == Composition::Recurrent) {
    p.rc_weights = &store.get("comp.rc.W");
    p.rc_bias = &store.get("comp.rc.b");
  } else {
    p.lc = LstmCellParams::bind(store, "comp.lc");
  }
  return p;
}

SubtreeState init_subtree(const ad::Expr& token_vector) { return {token_vector, std::nullopt}; }

Composer::Composer(ad::Graph& g, const CompositionParams& params, const ReprConfig& cfg)
    : graph_(&g), params_(&params), cfg_(&cfg) {
  if (params.rc_weights) {
    rc_w_ = g.parameter(*params.rc_weights);
    rc_b_ = g.parameter(*params.rc_bias);
  }
  if (params.lc.weights) cell_.emplace(g, params.lc);
}

namespace {
void check_dims(const SubtreeState& head, const SubtreeState& dep, const ad::Expr& rel,
                Eigen::Index expected_in) {
  if (head.c.rows() != dep.c.rows() ||
      head.c.rows() + dep.c.rows() + rel.rows() != expected_in)
    throw std::invalid_argument("composition: dimension mismatch");
}
}  // namespace

SubtreeState Composer::compose_rc(const SubtreeState& head, const SubtreeState& dep,
                                  const ad::Expr& rel) const {
  if (!rc_w_.valid()) throw std::logic_error("compose_rc: recurrent composition not configured");
  check_dims(head, dep, rel, rc_w_.cols());
  return {ad::tanh(ad::affine(rc_w_, ad::concat({head.c, dep.c, rel}), rc_b_)), std::nullopt};
}

SubtreeState Composer::compose_lc(const SubtreeState& head, const SubtreeState& dep,
                                  const ad::Expr& rel) const {
  if (!cell_) throw std::logic_error("compose_lc: LSTM composition not configured");
  check_dims(head, dep, rel, params_->lc.input_dim);
  // A fresh LSTM per subtree: zero hidden state and carry before the first dependent.
  LstmState prev = cell_->initial_state();
  if (head.lstm_memory) prev = {head.c, *head.lstm_memory};
  const LstmState next = cell_->step(prev, ad::concat({head.c, dep.c, rel}));
  return {next.h, next.c};
}

ad::Expr Composer::relation(int relation_index) const {
  return graph_->lookup(*params_->relations, relation_index);
}

void Composer::reset(const std::vector<ad::Expr>& token_vectors) {
  tokens_ = token_vectors;
  states_.clear();
  states_.reserve(token_vectors.size());
  for (const auto& v : token_vectors) states_.push_back(init_subtree(v));
}

void Composer::on_arc(int head, int dependent, int relation_index) {
  if (cfg_->composition == Composition::None) return;
  const ad::Expr rel = relation(relation_index);
  const SubtreeState& h = states_.at(head);
  if (cfg_->composition_inputs == CompositionInputs::Subtree) {
    const SubtreeState& d = states_.at(dependent);
    states_[head] = cfg_->composition == Composition::Recurrent ? compose_rc(h, d, rel)
                                                                 : compose_lc(h, d, rel);
    return;
  }
  // Raw token vectors as inputs; the LSTM's own state still threads through.
  const ad::Expr x = ad::concat({tokens_.at(head), tokens_.at(dependent), rel});
  if (cfg_->composition == Composition::Recurrent) {
    states_[head] = {ad::tanh(ad::affine(rc_w_, x, rc_b_)), std::nullopt};
    return;
  }
  LstmState prev = cell_->initial_state();
  if (h.lstm_memory) prev = {h.c, *h.lstm_memory};
  const LstmState next = cell_->step(prev, x);
  states_[head] = {next.h, next.c};
}

}  // namespace compparse
