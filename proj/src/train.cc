#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "compparse/eval.h"
#include "compparse/model.h"

namespace compparse {

namespace {

// Highest-scoring candidate; exact ties are broken uniformly at random.
std::optional<Transition> pick_best(const std::vector<Transition>& candidates,
                                    const Eigen::VectorXd& scores, std::mt19937_64& rng) {
  std::vector<const Transition*> best;
  double best_score = 0.0;
  for (const auto& t : candidates) {
    const double v = scores(ParserModel::output_index(t));
    if (best.empty() || v > best_score) {
      best.assign(1, &t);
      best_score = v;
    } else if (v == best_score) {
      best.push_back(&t);
    }
  }
  if (best.empty()) return std::nullopt;
  if (best.size() == 1) return *best.front();
  std::uniform_int_distribution<std::size_t> pick(0, best.size() - 1);
  return *best[pick(rng)];
}

void labeled_candidates(const Configuration& c, const StaticDynamicOracle& oracle,
                        int label_count, std::vector<Transition>& correct,
                        std::vector<Transition>& wrong) {
  correct.clear();
  wrong.clear();
  const auto v = oracle.verdict(c);
  for (auto kind : kAllTransitionKinds) {
    if (!c.legal(kind)) continue;
    if (kind == TransitionKind::Shift || kind == TransitionKind::Swap) {
      (v[kind] == 0 ? correct : wrong).push_back({kind, -1});
      continue;
    }
    for (int l = 0; l < label_count; ++l) {
      const Transition t{kind, l};
      (oracle.cost(c, v, t) == 0 ? correct : wrong).push_back(t);
    }
  }
}

}  // namespace

SentenceResult train_sentence(ParserModel& model, const Sentence& sentence,
                              const TrainConfig& tcfg, bool explore, std::mt19937_64& rng) {
  if (!sentence.has_heads()) throw std::invalid_argument("train_sentence: sentence has no heads");
  ad::Graph g;
  WordDropout dropout{tcfg.word_dropout, &rng};
  ParseSession session(model, g, sentence, tcfg.word_dropout > 0 ? &dropout : nullptr);
  const StaticDynamicOracle oracle(sentence.heads(), gold_label_indices(sentence, model.vocab()));
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  SentenceResult result;
  std::vector<ad::Expr> losses;
  std::vector<Transition> correct, wrong;
  const auto cap = Configuration::step_cap(static_cast<int>(sentence.size()));
  while (!session.config().is_terminal()) {
    if (session.config().steps() >= cap) throw std::logic_error("train_sentence: step cap exceeded");
    const auto& c = session.config();
    labeled_candidates(c, oracle, model.label_count(), correct, wrong);
    if (correct.empty()) throw std::logic_error("train_sentence: oracle has no zero-cost transition");
    const ad::Expr scores = session.scores();
    const Eigen::VectorXd s = scores.value();
    StepDecision step;
    step.best_correct = *pick_best(correct, s, rng);
    step.best_wrong = pick_best(wrong, s, rng);
    step.followed = step.best_correct;
    if (step.best_wrong) {
      const double sg = s(ParserModel::output_index(step.best_correct));
      const double sw = s(ParserModel::output_index(*step.best_wrong));
      if (sw > sg - tcfg.margin) {
        step.hinge_active = true;
        losses.push_back(ad::pick(scores, ParserModel::output_index(*step.best_wrong)) -
                         ad::pick(scores, ParserModel::output_index(step.best_correct)));
      }
      // Exploration never leaves the static swap schedule: no exploring while a
      // swap is due, and never a wrong SWAP.
      if (explore && sw > sg && !oracle.swap_due(c) &&
          step.best_wrong->kind != TransitionKind::Swap && coin(rng) < tcfg.exploration)
        step.followed = *step.best_wrong;
    }
    session.apply(step.followed);
    result.steps.push_back(step);
  }
  if (!losses.empty()) {
    ad::Expr total = ad::sum(losses);
    result.loss = total.scalar() + tcfg.margin * static_cast<double>(losses.size());
    g.backward(total);
    ad::adam_step(model.store(), tcfg.adam);
  }
  return result;
}

ad::Expr replay_loss(const ParserModel& model, ad::Graph& g, const Sentence& sentence,
                     const std::vector<StepDecision>& steps, double margin) {
  ParseSession session(model, g, sentence);
  std::vector<ad::Expr> losses;
  double constant = 0.0;
  for (const auto& step : steps) {
    if (step.hinge_active) {
      const ad::Expr scores = session.scores();
      losses.push_back(ad::pick(scores, ParserModel::output_index(*step.best_wrong)) -
                       ad::pick(scores, ParserModel::output_index(step.best_correct)));
      constant += margin;
    }
    session.apply(step.followed);
  }
  if (losses.empty()) return g.input_scalar(0.0);
  return ad::sum(losses) + g.input_scalar(constant);
}

std::vector<EpochMetrics> train(ParserModel& model, const Treebank& train_tb,
                                const Treebank* dev_tb, const TrainConfig& tcfg,
                                const std::function<void(const EpochMetrics&)>& on_epoch) {
  if (train_tb.empty()) throw std::invalid_argument("train: empty treebank");
  if (auto v = tcfg.violation(); !v.empty()) throw std::invalid_argument("train: " + v);
  std::mt19937_64 rng(tcfg.seed * 0x9E3779B97F4A7C15ULL + 17);
  std::vector<std::size_t> order(train_tb.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<EpochMetrics> metrics;
  std::optional<double> best_las;
  std::vector<ad::Matrix> best_values;
  for (int epoch = 1; epoch <= tcfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const bool explore = tcfg.exploration > 0 && epoch >= tcfg.explore_from_epoch;
    double total = 0.0;
    for (auto i : order) total += train_sentence(model, train_tb.sentences[i], tcfg, explore, rng).loss;
    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = total / static_cast<double>(train_tb.size());
    if (dev_tb && !dev_tb->empty()) {
      const Score sc = score_trees(*dev_tb, parse_treebank(model, *dev_tb));
      m.dev_las = sc.las;
      m.dev_uas = sc.uas;
      if (!best_las || sc.las > *best_las) {
        best_las = sc.las;
        best_values = model.store().snapshot();
      }
    }
    metrics.push_back(m);
    if (on_epoch) on_epoch(m);
  }
  if (!best_values.empty()) model.store().restore(best_values);
  return metrics;
}

}  // namespace compparse
