#include <doctest.h>

#include "compparse/synth.h"
#include "compparse/vocab.h"
#include "compparse/wordrep.h"

using namespace compparse;

namespace {

ReprConfig small(Extractor e) {
  ReprConfig c;
  c.extractor = e;
  c.word_dim = 5;
  c.pos_dim = 3;
  c.char_dim = 4;
  c.char_hidden = 3;
  c.seq_hidden = 4;
  return c;
}

std::vector<Eigen::VectorXd> token_values(const WordRepParams& p, const ReprConfig& cfg,
                                          const Vocabulary& v, const Sentence& s) {
  ad::Graph g;
  TokenEncoder enc(g, p, cfg, v);
  std::vector<Eigen::VectorXd> out;
  for (const auto& e : enc.extract_tokens(s)) out.push_back(e.value());
  return out;
}

}  // namespace

TEST_CASE("vocabulary reserves unknown and root") {
  const auto tb = synth_head_final({10, 3});
  const auto v = Vocabulary::build(tb);
  CHECK(v.word("never-seen") == Vocabulary::kUnknown);
  CHECK(v.word_string(Vocabulary::kRoot) != v.word_string(Vocabulary::kUnknown));
  CHECK(v.pos(std::nullopt) == Vocabulary::kUnknown);
  CHECK(v.label("nsubj:pass") == v.label("nsubj"));
  CHECK(v.label("nonsense") == -1);
  CHECK(v.relation_count() == 2 * v.label_count());
}

TEST_CASE("three labels give six direction-tagged relations") {
  Treebank tb;
  Sentence s;
  for (auto [form, head, rel] : {std::tuple{"a", 2, "nsubj"}, {"b", 0, "root"}, {"c", 2, "obj"}}) {
    Token t;
    t.id = static_cast<int>(s.size()) + 1;
    t.form = form;
    t.head = head;
    t.deprel = rel;
    t.chars = decode_utf8(form);
    s.tokens.push_back(t);
  }
  tb.sentences.push_back(s);
  const auto v = Vocabulary::build(tb);
  CHECK(v.label_count() == 3);
  CHECK(v.relation_count() == 6);
  CHECK(v.relation(1, ArcDirection::Right) == 3);
}

TEST_CASE("type and token dimensions follow the configuration") {
  const auto tb = synth_head_final({5, 1});
  const auto v = Vocabulary::build(tb);
  for (bool pos : {true, false}) {
    for (bool chr : {true, false}) {
      for (auto e : {Extractor::Bi, Extractor::Backward, Extractor::Forward}) {
        auto cfg = small(e);
        cfg.use_pos = pos;
        cfg.use_char = chr;
        ad::ParameterStore store;
        std::mt19937_64 rng(1);
        auto p = WordRepParams::create(store, cfg, v, rng);
        ad::Graph g;
        TokenEncoder enc(g, p, cfg, v);
        CHECK(enc.type_vector(tb.sentences[0].tokens[0]).rows() == cfg.type_dim());
        const auto toks = enc.extract_tokens(tb.sentences[0]);
        CHECK(toks.size() == tb.sentences[0].size() + 1);
        CHECK(toks[1].rows() == cfg.token_dim());
      }
    }
  }
}

TEST_CASE("ablated extractors are causal in their direction") {
  const auto tb = synth_head_final({20, 9});
  const auto v = Vocabulary::build(tb);
  const Sentence& s = tb.sentences[3];
  REQUIRE(s.size() >= 4);
  for (auto e : {Extractor::Forward, Extractor::Backward, Extractor::Bi}) {
    const auto cfg = small(e);
    ad::ParameterStore store;
    std::mt19937_64 rng(2);
    auto p = WordRepParams::create(store, cfg, v, rng);
    const auto base = token_values(p, cfg, v, s);
    const int n = static_cast<int>(s.size());
    for (int j = 1; j <= n; ++j) {
      Sentence t = s;
      t.tokens[j - 1].form = "zzz";
      t.tokens[j - 1].chars = U"zzz";
      t.tokens[j - 1].upos = "PUNCT";
      const auto pert = token_values(p, cfg, v, t);
      for (int i = 0; i <= n; ++i) {
        const bool same = pert[i] == base[i];
        if (e == Extractor::Forward) CHECK(same == (i < j));
        if (e == Extractor::Backward) CHECK(same == (i > j));
        if (e == Extractor::Bi) CHECK_FALSE(same);
      }
    }
  }
}

TEST_CASE("word dropout only replaces known words") {
  const auto tb = synth_head_final({20, 4});
  const auto v = Vocabulary::build(tb);
  auto cfg = small(Extractor::Bi);
  cfg.use_pos = cfg.use_char = false;
  ad::ParameterStore store;
  std::mt19937_64 rng(1);
  auto p = WordRepParams::create(store, cfg, v, rng);
  std::mt19937_64 drop_rng(7);
  WordDropout always{1e9, &drop_rng};
  ad::Graph g;
  TokenEncoder enc(g, p, cfg, v);
  const auto& tok = tb.sentences[0].tokens[0];
  CHECK(enc.type_vector(tok, &always).value() ==
        p.word_emb->value().col(Vocabulary::kUnknown));
  WordDropout never{0.0, &drop_rng};
  CHECK(enc.type_vector(tok, &never).value() == p.word_emb->value().col(v.word(tok.form)));
}
