#include "compparse/wordrep.h"

namespace compparse {

WordRepParams WordRepParams::create(ad::ParameterStore& store, const ReprConfig& cfg,
                                    const Vocabulary& vocab, std::mt19937_64& rng) {
  WordRepParams p;
  p.word_emb = &store.add("word_emb", cfg.word_dim, static_cast<Eigen::Index>(vocab.word_count()),
                          ad::Init::EmbeddingUniform, rng);
  if (cfg.use_pos)
    p.pos_emb = &store.add("pos_emb", cfg.pos_dim, static_cast<Eigen::Index>(vocab.pos_count()),
                           ad::Init::EmbeddingUniform, rng);
  if (cfg.use_char) {
    p.char_emb = &store.add("char_emb", cfg.char_dim,
                            static_cast<Eigen::Index>(vocab.char_count()),
                            ad::Init::EmbeddingUniform, rng);
    p.char_fw = LstmCellParams::create(store, "char_fw", cfg.char_dim, cfg.char_hidden, rng);
    p.char_bw = LstmCellParams::create(store, "char_bw", cfg.char_dim, cfg.char_hidden, rng);
  }
  if (cfg.extractor != Extractor::Backward)
    p.seq_fw = LstmCellParams::create(store, "seq_fw", cfg.type_dim(), cfg.seq_hidden, rng);
  if (cfg.extractor != Extractor::Forward)
    p.seq_bw = LstmCellParams::create(store, "seq_bw", cfg.type_dim(), cfg.seq_hidden, rng);
  return p;
}

WordRepParams WordRepParams::bind(ad::ParameterStore& store, const ReprConfig& cfg) {
  WordRepParams p;
  p.word_emb = &store.get("word_emb");
  if (cfg.use_pos) p.pos_emb = &store.get("pos_emb");
  if (cfg.use_char) {
    p.char_emb = &store.get("char_emb");
    p.char_fw = LstmCellParams::bind(store, "char_fw");
    p.char_bw = LstmCellParams::bind(store, "char_bw");
  }
  if (cfg.extractor != Extractor::Backward) p.seq_fw = LstmCellParams::bind(store, "seq_fw");
  if (cfg.extractor != Extractor::Forward) p.seq_bw = LstmCellParams::bind(store, "seq_bw");
  return p;
}

TokenEncoder::TokenEncoder(ad::Graph& g, const WordRepParams& params, const ReprConfig& cfg,
                           const Vocabulary& vocab)
    : graph_(&g), params_(&params), cfg_(&cfg), vocab_(&vocab) {
  if (cfg.use_char) {
    char_fw_.emplace(g, params.char_fw);
    char_bw_.emplace(g, params.char_bw);
  }
  if (params.seq_fw.weights) seq_fw_.emplace(g, params.seq_fw);
  if (params.seq_bw.weights) seq_bw_.emplace(g, params.seq_bw);
}

ad::Expr TokenEncoder::char_component(const std::u32string& chars) {
  if (auto it = char_cache_.find(chars); it != char_cache_.end()) return it->second;
  std::vector<ad::Expr> xs;
  if (chars.empty()) {
    xs.push_back(graph_->lookup(*params_->char_emb, Vocabulary::kUnknown));
  } else {
    xs.reserve(chars.size());
    for (char32_t ch : chars) xs.push_back(graph_->lookup(*params_->char_emb, vocab_->character(ch)));
  }
  auto fw = run_lstm(*char_fw_, xs, Direction::Forward);
  auto bw = run_lstm(*char_bw_, xs, Direction::Backward);
  // Final states: the forward cell after the last char, the backward after the first.
  auto out = ad::concat({fw.back(), bw.front()});
  char_cache_.emplace(chars, out);
  return out;
}

ad::Expr TokenEncoder::assemble(int word, int pos, const std::u32string* chars) {
  std::vector<ad::Expr> parts;
  parts.push_back(graph_->lookup(*params_->word_emb, word));
  if (cfg_->use_pos) parts.push_back(graph_->lookup(*params_->pos_emb, pos));
  if (cfg_->use_char) {
    if (chars) {
      parts.push_back(char_component(*chars));
    } else {
      // The root symbol reads the reserved root character (index 1).
      std::vector<ad::Expr> xs{graph_->lookup(*params_->char_emb, Vocabulary::kRoot)};
      auto fw = run_lstm(*char_fw_, xs, Direction::Forward);
      auto bw = run_lstm(*char_bw_, xs, Direction::Backward);
      parts.push_back(ad::concat({fw.back(), bw.front()}));
    }
  }
  return parts.size() == 1 ? parts.front() : ad::concat(parts);
}

ad::Expr TokenEncoder::type_vector(const Token& token, const WordDropout* dropout) {
  int w = vocab_->word(token.form);
  if (dropout && dropout->rng && w != Vocabulary::kUnknown) {
    const double freq = vocab_->frequency(w);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(*dropout->rng) < dropout->alpha / (dropout->alpha + freq)) w = Vocabulary::kUnknown;
  }
  return assemble(w, vocab_->pos(token.upos), &token.chars);
}

ad::Expr TokenEncoder::root_type_vector() {
  return assemble(Vocabulary::kRoot, Vocabulary::kRoot, nullptr);
}

std::vector<ad::Expr> TokenEncoder::encode(const std::vector<ad::Expr>& xs) {
  switch (cfg_->extractor) {
    case Extractor::Forward:
      return run_lstm(*seq_fw_, xs, Direction::Forward);
    case Extractor::Backward:
      return run_lstm(*seq_bw_, xs, Direction::Backward);
    case Extractor::Bi: {
      auto fw = run_lstm(*seq_fw_, xs, Direction::Forward);
      auto bw = run_lstm(*seq_bw_, xs, Direction::Backward);
      std::vector<ad::Expr> out(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) out[i] = ad::concat({fw[i], bw[i]});
      return out;
    }
  }
  return {};
}

std::vector<ad::Expr> TokenEncoder::extract_tokens(const Sentence& sentence,
                                                   const WordDropout* dropout) {
  std::vector<ad::Expr> xs;
  xs.reserve(sentence.size() + 1);
  xs.push_back(root_type_vector());
  for (const auto& t : sentence.tokens) xs.push_back(type_vector(t, dropout));
  return encode(xs);
}

}  // namespace compparse
