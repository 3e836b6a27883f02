#include "compparse/model.h"

#include <stdexcept>

namespace compparse {

std::string TrainConfig::violation() const {
  if (epochs < 0) return "epochs must be >= 0";
  if (margin <= 0) return "margin must be positive";
  if (exploration < 0 || exploration > 1) return "exploration must be in [0, 1]";
  if (word_dropout < 0) return "word dropout must be >= 0";
  if (adam.learning_rate <= 0) return "learning rate must be positive";
  return {};
}

ParserModel::ParserModel(ReprConfig cfg, Vocabulary vocab, std::uint64_t seed)
    : cfg_(std::move(cfg)), vocab_(std::move(vocab)) {
  std::mt19937_64 rng(seed);
  wordrep_ = WordRepParams::create(store_, cfg_, vocab_, rng);
  composition_ =
      CompositionParams::create(store_, cfg_, static_cast<int>(vocab_.relation_count()), rng);
  pad_ = &store_.add("pad", cfg_.slot_width(), 1, ad::Init::EmbeddingUniform, rng);
  w1_ = &store_.add("mlp.W1", cfg_.mlp_hidden, cfg_.feature_width(), ad::Init::GlorotUniform, rng);
  b1_ = &store_.add("mlp.b1", cfg_.mlp_hidden, 1, ad::Init::Zeros, rng);
  w2_ = &store_.add("mlp.W2", output_count(), cfg_.mlp_hidden, ad::Init::GlorotUniform, rng);
  b2_ = &store_.add("mlp.b2", output_count(), 1, ad::Init::Zeros, rng);
}

ParserModel::ParserModel(ReprConfig cfg, Vocabulary vocab, ad::ParameterStore store)
    : cfg_(std::move(cfg)), vocab_(std::move(vocab)), store_(std::move(store)) {
  bind();
}

void ParserModel::bind() {
  wordrep_ = WordRepParams::bind(store_, cfg_);
  composition_ = CompositionParams::bind(store_, cfg_);
  pad_ = &store_.get("pad");
  w1_ = &store_.get("mlp.W1");
  b1_ = &store_.get("mlp.b1");
  w2_ = &store_.get("mlp.W2");
  b2_ = &store_.get("mlp.b2");
  auto expect = [](const ad::Parameter& p, Eigen::Index r, Eigen::Index c) {
    if (p.rows() != r || p.cols() != c)
      throw std::runtime_error("parameter " + p.name() + " has the wrong shape");
  };
  expect(*pad_, cfg_.slot_width(), 1);
  expect(*w1_, cfg_.mlp_hidden, cfg_.feature_width());
  expect(*w2_, output_count(), cfg_.mlp_hidden);
  expect(*wordrep_.word_emb, cfg_.word_dim, static_cast<Eigen::Index>(vocab_.word_count()));
}

int ParserModel::output_index(const Transition& t) {
  switch (t.kind) {
    case TransitionKind::Shift: return 0;
    case TransitionKind::Swap: return 1;
    case TransitionKind::LeftArc: return 2 + 2 * t.label;
    case TransitionKind::RightArc: return 3 + 2 * t.label;
  }
  return -1;
}

Transition ParserModel::output_transition(int index) {
  if (index == 0) return {TransitionKind::Shift, -1};
  if (index == 1) return {TransitionKind::Swap, -1};
  const int l = (index - 2) / 2;
  return {(index % 2 == 0) ? TransitionKind::LeftArc : TransitionKind::RightArc, l};
}

std::vector<std::string> expected_parameter_names(const ReprConfig& cfg) {
  std::vector<std::string> names{"word_emb"};
  if (cfg.use_pos) names.push_back("pos_emb");
  if (cfg.use_char) {
    for (const char* n : {"char_emb", "char_fw.W", "char_fw.b", "char_bw.W", "char_bw.b"})
      names.push_back(n);
  }
  if (cfg.extractor != Extractor::Backward) names.insert(names.end(), {"seq_fw.W", "seq_fw.b"});
  if (cfg.extractor != Extractor::Forward) names.insert(names.end(), {"seq_bw.W", "seq_bw.b"});
  if (cfg.composition != Composition::None) names.push_back("comp.rel");
  if (cfg.composition == Composition::Recurrent)
    names.insert(names.end(), {"comp.rc.W", "comp.rc.b"});
  if (cfg.composition == Composition::Lstm) names.insert(names.end(), {"comp.lc.W", "comp.lc.b"});
  names.insert(names.end(), {"pad", "mlp.W1", "mlp.b1", "mlp.W2", "mlp.b2"});
  return names;
}

ParseSession::ParseSession(const ParserModel& model, ad::Graph& g, const Sentence& sentence,
                           const WordDropout* dropout)
    : model_(&model),
      graph_(&g),
      encoder_(g, model.wordrep(), model.config(), model.vocab()),
      composer_(g, model.composition(), model.config()),
      config_(static_cast<int>(sentence.size())) {
  tokens_ = encoder_.extract_tokens(sentence, dropout);
  composer_.reset(tokens_);
  pad_ = g.parameter(model.pad());
  w1_ = g.parameter(model.mlp_w1());
  b1_ = g.parameter(model.mlp_b1());
  w2_ = g.parameter(model.mlp_w2());
  b2_ = g.parameter(model.mlp_b2());
}

ad::Expr ParseSession::slot(int pos) const {
  if (pos < 0) return pad_;
  if (model_->config().composition == Composition::None) return tokens_[pos];
  return ad::concat({tokens_[pos], composer_.state(pos).c});
}

ad::Expr ParseSession::feature_vector() const {
  return ad::concat({slot(config_.s1()), slot(config_.s0()), slot(config_.b0())});
}

ad::Expr ParseSession::scores() const {
  return ad::affine(w2_, ad::tanh(ad::affine(w1_, feature_vector(), b1_)), b2_);
}

void ParseSession::apply(const Transition& t) {
  auto arc = config_.apply(t);
  if (!arc) return;
  const auto dir = arc->head > arc->dependent ? ArcDirection::Left : ArcDirection::Right;
  composer_.on_arc(arc->head, arc->dependent, model_->vocab().relation(arc->label, dir));
}

namespace {

// Legal labeled transitions in output order.
std::vector<Transition> legal_transitions(const Configuration& c, int labels) {
  std::vector<Transition> out;
  if (c.legal(TransitionKind::Shift)) out.push_back({TransitionKind::Shift, -1});
  if (c.legal(TransitionKind::Swap)) out.push_back({TransitionKind::Swap, -1});
  const bool left = c.legal(TransitionKind::LeftArc), right = c.legal(TransitionKind::RightArc);
  for (int l = 0; l < labels; ++l) {
    if (left) out.push_back({TransitionKind::LeftArc, l});
    if (right) out.push_back({TransitionKind::RightArc, l});
  }
  return out;
}

}  // namespace

ParsedTree greedy_parse(const ParserModel& model, const Sentence& sentence,
                        std::vector<TraceStep>* trace) {
  ad::Graph g;
  ParseSession session(model, g, sentence);
  const int n = static_cast<int>(sentence.size());
  const auto cap = Configuration::step_cap(n);
  while (!session.config().is_terminal()) {
    if (session.config().steps() >= cap) throw std::logic_error("greedy_parse: step cap exceeded");
    const Eigen::VectorXd s = session.scores().value();
    const auto legal = legal_transitions(session.config(), model.label_count());
    if (legal.empty()) throw std::logic_error("greedy_parse: no legal transition");
    const Transition* best = nullptr;
    double best_score = 0.0;
    for (const auto& t : legal) {
      const double v = s(ParserModel::output_index(t));
      if (!best || v > best_score) {
        best = &t;
        best_score = v;
      }
    }
    if (trace)
      trace->push_back({session.config().stack(), session.config().buffer(), *best, best_score});
    session.apply(*best);
  }
  return {session.config().heads(), session.config().labels()};
}

Sentence annotate(const Sentence& sentence, const ParsedTree& tree, const Vocabulary& vocab) {
  Sentence out = sentence;
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    out.tokens[i].head = tree.heads[i + 1];
    const int l = tree.labels[i + 1];
    out.tokens[i].deprel = l >= 0 ? vocab.label_name(l) : std::string("dep");
  }
  return out;
}

Treebank parse_treebank(const ParserModel& model, const Treebank& tb) {
  Treebank out;
  out.name = tb.name;
  out.sentences.reserve(tb.size());
  for (const auto& s : tb.sentences)
    out.sentences.push_back(annotate(s, greedy_parse(model, s), model.vocab()));
  return out;
}

std::vector<int> gold_label_indices(const Sentence& s, const Vocabulary& vocab) {
  std::vector<int> labels(s.size() + 1, -1);
  for (std::size_t i = 0; i < s.size(); ++i)
    labels[i + 1] = vocab.label(s.tokens[i].deprel.value_or(""));
  return labels;
}

}  // namespace compparse
