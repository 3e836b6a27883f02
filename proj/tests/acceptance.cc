// Acceptance runner: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; otherwise only the named ones.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "compparse/ensemble.h"
#include "compparse/eval.h"
#include "compparse/model.h"
#include "compparse/serialize.h"
#include "compparse/synth.h"
#include "compparse/transition.h"
#include "published.h"
#include "support.h"

using namespace compparse;
namespace ts = testing_support;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Gold labels drawn uniformly from [0, labels).
std::vector<int> random_labels(int n, int labels, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, labels - 1);
  std::vector<int> out(n + 1, -1);
  for (int i = 1; i <= n; ++i) out[i] = pick(rng);
  return out;
}

Outcome oracle_soundness() {
  std::mt19937_64 rng(2024);
  const int trees = 1000, labels = 4;
  int nonprojective = 0, exact = 0;
  std::size_t steps = 0;
  for (int t = 0; t < trees; ++t) {
    const int n = 1 + static_cast<int>(rng() % 10);
    const auto heads = ts::random_tree(n, rng);
    const auto gold_labels = random_labels(n, labels, rng);
    nonprojective += !ts::is_projective(heads);
    StaticDynamicOracle oracle(heads, gold_labels);
    Configuration c(n);
    bool stuck = false;
    while (!c.is_terminal()) {
      if (c.steps() > Configuration::step_cap(n)) {
        stuck = true;
        break;
      }
      const auto zero = oracle.verdict(c).zero_cost_set();
      if (zero.empty()) {
        stuck = true;
        break;
      }
      const auto kind = zero[rng() % zero.size()];
      c.apply({kind, oracle.gold_label(c, kind)});
    }
    steps += c.steps();
    if (stuck) continue;
    bool same = true;
    for (int d = 1; d <= n; ++d)
      same = same && c.heads()[d] == heads[d] && c.labels()[d] == gold_labels[d];
    exact += same;
  }
  const double frac = static_cast<double>(nonprojective) / trees;
  std::ostringstream d;
  d << exact << "/" << trees << " trees reproduced, non-projective " << fmt("%.3f", frac)
    << ", " << steps << " transitions";
  return {exact == trees && frac >= 0.3, d.str()};
}

Outcome cost_exactness() {
  std::mt19937_64 rng(77);
  const int trees = 300, labels = 2;
  std::size_t configs = 0, checked = 0, mismatches = 0, swap_configs = 0, clamped = 0;
  std::string first;
  for (int t = 0; t < trees; ++t) {
    const int n = 1 + t % 6;
    const auto heads = ts::random_tree(n, rng);
    const auto gold_labels = random_labels(n, labels, rng);
    StaticDynamicOracle oracle(heads, gold_labels);
    ts::MinimalLoss bf(heads, gold_labels, labels);
    std::vector<Configuration> todo{Configuration(n)};
    std::unordered_set<std::string> seen;
    while (!todo.empty()) {
      const auto c = todo.back();
      todo.pop_back();
      auto k = ts::key(c);
      for (int l : c.labels()) k += static_cast<char>(l + 1);
      if (!seen.insert(k).second || c.is_terminal()) continue;
      ++configs;
      const auto v = oracle.verdict(c);
      const int base = bf.loss(c);
      auto mismatch = [&](const Transition& tr, int got, int want) {
        ++mismatches;
        if (first.empty())
          first = "tree " + std::to_string(t) + " " + to_string(tr.kind) + " got " +
                  std::to_string(got) + " want " + std::to_string(want);
      };
      if (v.swap_due != bf.swap_due(c)) mismatch({TransitionKind::Swap, -1}, v.swap_due, 0);
      for (const auto& tr : bf.transitions(c)) {
        const auto next = apply(c, tr);
        const int delta = bf.loss(next) - base;
        const int got = oracle.cost(c, v, tr);
        ++checked;
        if (got != delta) mismatch(tr, got, delta);
        todo.push_back(next);
      }
      if (v.swap_due) {
        // The other legal moves leave the regime; they must cost at least one.
        ++swap_configs;
        for (auto kind : {TransitionKind::Shift, TransitionKind::LeftArc, TransitionKind::RightArc}) {
          if (!c.legal(kind)) continue;
          const Transition tr{kind, kind == TransitionKind::Shift ? -1 : 0};
          const int got = oracle.cost(c, v, tr);
          ++checked;
          if (got < 1) mismatch(tr, got, 1);
          clamped += bf.loss(apply(c, tr)) - base <= 0;
        }
      } else if (v[TransitionKind::Swap] != OracleVerdict::kInfinite) {
        mismatch({TransitionKind::Swap, -1}, v[TransitionKind::Swap], OracleVerdict::kInfinite);
      }
    }
  }
  std::ostringstream d;
  d << checked << " costs in " << configs << " configurations of " << trees << " trees, "
    << mismatches << " mismatches";
  if (!first.empty()) d << " (first: " << first << ")";
  d << "; " << swap_configs << " swap-due configurations, " << clamped
    << " off-regime moves with a brute-force delta of zero";
  return {mismatches == 0, d.str()};
}

ReprConfig small_dims(Extractor e, Composition c, bool pos, bool chr) {
  ReprConfig cfg;
  cfg.extractor = e;
  cfg.composition = c;
  cfg.use_pos = pos;
  cfg.use_char = chr;
  cfg.word_dim = 4;
  cfg.pos_dim = 3;
  cfg.char_dim = 3;
  cfg.char_hidden = 2;
  cfg.seq_hidden = 3;
  cfg.relation_dim = 2;
  cfg.mlp_hidden = 5;
  return cfg;
}

Sentence three_tokens() {
  const char* forms[] = {"ta", "kala", "miri"};
  const char* tags[] = {"DET", "NOUN", "VERB"};
  const char* rels[] = {"det", "nsubj", "root"};
  const int heads[] = {2, 3, 0};
  Sentence s;
  for (int i = 0; i < 3; ++i) {
    Token t;
    t.id = i + 1;
    t.form = forms[i];
    t.chars = decode_utf8(forms[i]);
    t.upos = tags[i];
    t.head = heads[i];
    t.deprel = rels[i];
    s.tokens.push_back(t);
  }
  return s;
}

Outcome gradient_integrity() {
  const Sentence s = three_tokens();
  Treebank tb;
  tb.sentences.push_back(s);
  const auto vocab = Vocabulary::build(tb);
  TrainConfig tcfg;
  tcfg.word_dropout = 0;
  double worst = 0;
  std::string where;
  int configs = 0, vacuous = 0;
  for (bool pos : {true, false})
    for (bool chr : {true, false})
      for (auto e : {Extractor::Bi, Extractor::Backward, Extractor::Forward})
        for (auto c : {Composition::None, Composition::Recurrent, Composition::Lstm}) {
          const auto cfg = small_dims(e, c, pos, chr);
          ParserModel m(cfg, vocab, 31 + configs);
          auto probe = deserialize_model(serialize_model(m));
          std::mt19937_64 rng(1);
          const auto steps = train_sentence(probe, s, tcfg, false, rng).steps;
          {
            ad::Graph g;
            if (replay_loss(m, g, s, steps, tcfg.margin).scalar() <= 0) ++vacuous;
          }
          const auto res = ts::gradient_check(
              m.store(), [&](ad::Graph& g) { return replay_loss(m, g, s, steps, tcfg.margin); });
          ++configs;
          if (res.max_rel >= worst) {
            worst = res.max_rel;
            where = to_string(e) + "/" + to_string(c) + (pos ? " pos+" : " pos-") +
                    (chr ? "char+ " : "char- ") + res.worst;
          }
        }
  std::ostringstream d;
  d << configs << " configurations, max relative error " << fmt("%.2e", worst) << " at "
    << where;
  if (vacuous) d << "; " << vacuous << " with zero loss";
  return {worst < 1e-4 && vacuous == 0, d.str()};
}

Outcome cle_optimality() {
  std::mt19937_64 rng(99);
  int exact = 0, invalid = 0;
  const int cases = 200;
  for (int t = 0; t < cases; ++t) {
    const int n = 1 + t % 5;
    ArcVoteMatrix w;
    if (t % 2 == 0) {
      // Votes of six random parsers.
      std::vector<std::vector<int>> trees;
      for (int k = 0; k < 6; ++k) trees.push_back(ts::random_tree(n, rng));
      w = collect_votes(trees);
    } else {
      w.n = n;
      w.votes.assign(n + 1, std::vector<int>(n + 1, 0));
      for (int h = 0; h <= n; ++h)
        for (int d = 1; d <= n; ++d)
          if (h != d) w.votes[h][d] = static_cast<int>(rng() % 7);
    }
    const auto heads = cle_mst(w);
    if (!tree_violation(heads).empty()) {
      ++invalid;
      continue;
    }
    exact += tree_weight(w, heads) == ts::brute_force_max_arborescence(w.votes);
  }
  std::ostringstream d;
  d << exact << "/" << cases << " optimal, " << invalid << " invalid trees";
  return {exact == cases, d.str()};
}

Outcome overfit() {
  const auto tb = read_conllu_file(COMPPARSE_SOURCE_DIR "/data/toy50.conllu");
  const auto stats = treebank_stats(tb);
  ReprConfig cfg;
  cfg.extractor = Extractor::Bi;
  cfg.composition = Composition::None;
  TrainConfig tcfg;
  tcfg.epochs = 50;
  tcfg.seed = 1;
  ParserModel m(cfg, Vocabulary::build(tb), tcfg.seed);
  double best = 0;
  int best_epoch = 0;
  train(m, tb, &tb, tcfg, [&](const EpochMetrics& em) {
    if (*em.dev_las > best) {
      best = *em.dev_las;
      best_epoch = em.epoch;
    }
  });
  const double final_las = score_trees(tb, parse_treebank(m, tb)).las * 100;
  std::ostringstream d;
  d << tb.size() << " sentences (non-projective arcs " << fmt("%.3f", stats.nonprojective_arc_fraction)
    << "), training LAS " << fmt("%.2f", final_las) << " (best epoch " << best_epoch << ")";
  return {final_las >= 99.0 && stats.nonprojective_arc_fraction > 0, d.str()};
}

std::vector<Eigen::VectorXd> token_values(const WordRepParams& p, const ReprConfig& cfg,
                                          const Vocabulary& v, const Sentence& s) {
  ad::Graph g;
  TokenEncoder enc(g, p, cfg, v);
  std::vector<Eigen::VectorXd> out;
  for (const auto& e : enc.extract_tokens(s)) out.push_back(e.value());
  return out;
}

Outcome causality() {
  const auto tb = read_conllu_file(COMPPARSE_SOURCE_DIR "/data/toy50.conllu");
  const auto v = Vocabulary::build(tb);
  std::size_t comparisons = 0, violations = 0;
  for (auto e : {Extractor::Forward, Extractor::Backward}) {
    ReprConfig cfg;
    cfg.extractor = e;
    ad::ParameterStore store;
    std::mt19937_64 rng(5);
    const auto p = WordRepParams::create(store, cfg, v, rng);
    for (std::size_t k = 0; k < tb.size(); k += 5) {
      const Sentence& s = tb.sentences[k];
      const auto base = token_values(p, cfg, v, s);
      const int n = static_cast<int>(s.size());
      for (int j = 1; j <= n; ++j) {
        Sentence t = s;
        auto& tok = t.tokens[j - 1];
        tok.form = tok.form + "x";
        tok.chars = decode_utf8(tok.form);
        tok.upos = tok.upos == "PUNCT" ? "X" : "PUNCT";
        const auto pert = token_values(p, cfg, v, t);
        for (int i = 0; i <= n; ++i) {
          const bool same = pert[i] == base[i];
          // fw: v_i depends on positions <= i; bw: on positions >= i.
          const bool expect_same = e == Extractor::Forward ? i < j : i > j;
          ++comparisons;
          violations += same != expect_same;
        }
      }
    }
  }
  std::ostringstream d;
  d << comparisons << " token comparisons, " << violations << " violations";
  return {violations == 0, d.str()};
}

Outcome head_finality() {
  const auto hf_train = synth_head_final({500, 101, 0.0});
  const auto hf_dev = synth_head_final({200, 202, 0.0});
  const auto hi_train = mirror_treebank(hf_train);
  const auto hi_dev = mirror_treebank(hf_dev);
  struct Lang {
    const char* name;
    const Treebank* train;
    const Treebank* dev;
  };
  const Lang langs[] = {{"head-final", &hf_train, &hf_dev}, {"head-initial", &hi_train, &hi_dev}};
  TrainConfig tcfg;
  tcfg.epochs = 15;
  std::map<std::string, double> mean;
  std::ostringstream d;
  for (const auto& lang : langs) {
    const auto vocab = Vocabulary::build(*lang.train);
    for (auto e : {Extractor::Bi, Extractor::Forward}) {
      double sum = 0;
      for (std::uint64_t seed : {1, 2, 3}) {
        ReprConfig cfg;
        cfg.extractor = e;
        tcfg.seed = seed;
        ParserModel m(cfg, vocab, seed);
        double best = 0;
        train(m, *lang.train, lang.dev, tcfg,
              [&](const EpochMetrics& em) { best = std::max(best, *em.dev_las * 100); });
        sum += best;
      }
      mean[std::string(lang.name) + to_string(e)] = sum / 3;
    }
    const double gap = mean[std::string(lang.name) + "bi"] - mean[std::string(lang.name) + "fw"];
    mean[lang.name] = gap;
    d << lang.name << " bi " << fmt("%.2f", mean[std::string(lang.name) + "bi"]) << " fw "
      << fmt("%.2f", mean[std::string(lang.name) + "fw"]) << " gap " << fmt("%.2f", gap) << "; ";
  }
  d << "expected head-final gap > head-initial gap";
  return {mean["head-final"] > mean["head-initial"], d.str()};
}

Outcome composition_plumbing() {
  const auto tb = synth_head_final({10, 3, 0.0});
  const auto vocab = Vocabulary::build(tb);
  const Sentence& s = tb.sentences[0];
  int checks = 0, failures = 0;
  auto expect = [&](bool ok) {
    ++checks;
    failures += !ok;
  };
  for (auto e : {Extractor::Bi, Extractor::Backward, Extractor::Forward})
    for (auto c : {Composition::None, Composition::Recurrent, Composition::Lstm}) {
      ReprConfig cfg;
      cfg.extractor = e;
      cfg.composition = c;
      ParserModel m(cfg, vocab, 3);
      ad::Graph g;
      ParseSession session(m, g, s);
      const int dim_v = session.tokens()[0].value().rows();
      const int width = session.feature_vector().value().rows();
      expect(dim_v == cfg.token_dim());
      expect(width == (c == Composition::None ? 3 : 6) * dim_v);
      expect(m.mlp_w1().cols() == width);
      for (std::size_t i = 0; i < session.tokens().size(); ++i) {
        if (c == Composition::None) break;
        expect(session.composer().state(i).c.value() == session.tokens()[i].value());
      }
    }
  std::ostringstream d;
  d << checks << " structural assertions, " << failures << " failed";
  return {failures == 0, d.str()};
}

Outcome ensemble_shape() {
  const auto tb = read_conllu_file(COMPPARSE_SOURCE_DIR "/data/toy50.conllu");
  std::vector<const Treebank*> six(6, &tb);
  const auto merged = ensemble_treebanks(six);
  const bool identical = write_conllu(merged) == write_conllu(tb);
  std::vector<std::string> names;
  for (int k = 1; k <= 6; ++k) names.push_back("m" + std::to_string(k));
  const auto rows = ensemble_rows(names, std::vector<Treebank>(6, tb), true, &tb);
  bool shape = rows.size() == 7 && rows[0].name == "full";
  for (int k = 1; shape && k < 7; ++k) shape = rows[k].name == "-" + names[k - 1];
  bool perfect = true;
  for (const auto& r : rows) perfect = perfect && r.score && r.score->las == 1.0;
  std::ostringstream d;
  d << "unanimous output " << (identical ? "identical" : "differs") << ", " << rows.size()
    << " rows";
  for (const auto& r : rows) d << " " << r.name;
  return {identical && shape && perfect, d.str()};
}

Outcome report_arithmetic() {
  const auto report = grid_report(published::grid());
  const auto& av = report.blocks.at(0).rows.at("av");
  const double bi = *av.at(0).las;
  std::ostringstream d;
  d << "bi average " << fmt("%.3f", bi) << " against 81.4";
  return {std::abs(bi - 81.4) <= 0.05, d.str()};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria = {
    {"oracle_soundness", oracle_soundness},
    {"cost_exactness", cost_exactness},
    {"gradient_integrity", gradient_integrity},
    {"cle_optimality", cle_optimality},
    {"overfit", overfit},
    {"causality", causality},
    {"head_finality", head_finality},
    {"composition_plumbing", composition_plumbing},
    {"ensemble_shape", ensemble_shape},
    {"report_arithmetic", report_arithmetic},
};

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> wanted(argv + 1, argv + argc);
  for (const auto& w : wanted) {
    bool known = false;
    for (const auto& [name, fn] : kCriteria) known = known || name == w;
    if (!known) {
      std::cerr << "unknown criterion: " << w << "\n";
      return 2;
    }
  }
  bool all = true;
  for (const auto& [name, fn] : kCriteria) {
    if (!wanted.empty() && !wanted.count(name)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " ["
              << fmt("%.1f", secs) << " s]" << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
