#pragma once

// Feature extraction, MLP scoring, greedy parsing and oracle training.
//
// Output units of the scoring MLP, for L labels:
//   0          SHIFT
//   1          SWAP
//   2 + 2l     LEFT_ARC(l)
//   3 + 2l     RIGHT_ARC(l)

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "compparse/autodiff.h"
#include "compparse/composition.h"
#include "compparse/config.h"
#include "compparse/conllu.h"
#include "compparse/transition.h"
#include "compparse/vocab.h"
#include "compparse/wordrep.h"

namespace compparse {

struct TrainConfig {
  int epochs = 30;
  std::uint64_t seed = 1;
  double margin = 1.0;
  double exploration = 0.1;
  int explore_from_epoch = 2;  // 1-based
  double word_dropout = 0.25;
  ad::AdamConfig adam;

  // Empty when valid, otherwise what is wrong.
  std::string violation() const;
};

struct ParsedTree {
  std::vector<int> heads;   // index 0 unused (-1)
  std::vector<int> labels;  // label indices, index 0 unused
};

class ParserModel {
 public:
  ParserModel(ReprConfig cfg, Vocabulary vocab, std::uint64_t seed);
  // Adopts parameters created elsewhere (a loaded model file).
  ParserModel(ReprConfig cfg, Vocabulary vocab, ad::ParameterStore store);

  ParserModel(ParserModel&&) = default;
  ParserModel& operator=(ParserModel&&) = default;

  const ReprConfig& config() const { return cfg_; }
  const Vocabulary& vocab() const { return vocab_; }
  ad::ParameterStore& store() { return store_; }
  const ad::ParameterStore& store() const { return store_; }

  int label_count() const { return static_cast<int>(vocab_.label_count()); }
  int output_count() const { return 2 + 2 * label_count(); }
  static int output_index(const Transition& t);
  static Transition output_transition(int index);

  const WordRepParams& wordrep() const { return wordrep_; }
  const CompositionParams& composition() const { return composition_; }
  ad::Parameter& pad() const { return *pad_; }
  ad::Parameter& mlp_w1() const { return *w1_; }
  ad::Parameter& mlp_b1() const { return *b1_; }
  ad::Parameter& mlp_w2() const { return *w2_; }
  ad::Parameter& mlp_b2() const { return *b2_; }

 private:
  void bind();

  ReprConfig cfg_;
  Vocabulary vocab_;
  ad::ParameterStore store_;
  WordRepParams wordrep_;
  CompositionParams composition_;
  ad::Parameter* pad_ = nullptr;
  ad::Parameter *w1_ = nullptr, *b1_ = nullptr, *w2_ = nullptr, *b2_ = nullptr;
};

// Parameter names the configuration implies, in creation order.
std::vector<std::string> expected_parameter_names(const ReprConfig& cfg);

/// One sentence being parsed inside one graph.
class ParseSession {
 public:
  ParseSession(const ParserModel& model, ad::Graph& g, const Sentence& sentence,
               const WordDropout* dropout = nullptr);

  const Configuration& config() const { return config_; }
  const std::vector<ad::Expr>& tokens() const { return tokens_; }
  const Composer& composer() const { return composer_; }

  // Representation of one slot; pos < 0 yields the padding vector.
  ad::Expr slot(int pos) const;
  // [slot(s1); slot(s0); slot(b0)]
  ad::Expr feature_vector() const;
  ad::Expr scores() const;
  // Applies t and updates subtree vectors for the arc it creates.
  void apply(const Transition& t);

 private:
  const ParserModel* model_;
  ad::Graph* graph_;
  TokenEncoder encoder_;
  Composer composer_;
  std::vector<ad::Expr> tokens_;
  Configuration config_;
  ad::Expr pad_, w1_, b1_, w2_, b2_;
};

struct TraceStep {
  std::vector<int> stack;
  std::vector<int> buffer;
  Transition transition;
  double score = 0.0;
};

ParsedTree greedy_parse(const ParserModel& model, const Sentence& sentence,
                        std::vector<TraceStep>* trace = nullptr);
// Copy of the sentence carrying the predicted heads and label names.
Sentence annotate(const Sentence& sentence, const ParsedTree& tree, const Vocabulary& vocab);
Treebank parse_treebank(const ParserModel& model, const Treebank& tb);

// Gold labels as vocabulary indices (-1 for labels outside the vocabulary).
std::vector<int> gold_label_indices(const Sentence& s, const Vocabulary& vocab);

/// One oracle step as decided during training.
struct StepDecision {
  Transition best_correct;
  std::optional<Transition> best_wrong;
  Transition followed;
  bool hinge_active = false;
};

struct SentenceResult {
  double loss = 0.0;
  std::vector<StepDecision> steps;
};

// Builds the hinge loss for one sentence, applies one optimizer step when the
// loss is positive. `explore` enables error exploration.
SentenceResult train_sentence(ParserModel& model, const Sentence& sentence, const TrainConfig& tcfg,
                              bool explore, std::mt19937_64& rng);

// Loss of a recorded step sequence with the hinge choices frozen; smooth in
// the parameters, which makes it suitable for finite differences.
ad::Expr replay_loss(const ParserModel& model, ad::Graph& g, const Sentence& sentence,
                     const std::vector<StepDecision>& steps, double margin);

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;  // mean per sentence
  std::optional<double> dev_las;
  std::optional<double> dev_uas;
};

// Trains for tcfg.epochs epochs and keeps the parameters of the best dev-LAS
// epoch (the last epoch without a dev set).
std::vector<EpochMetrics> train(ParserModel& model, const Treebank& train_tb,
                                const Treebank* dev_tb, const TrainConfig& tcfg,
                                const std::function<void(const EpochMetrics&)>& on_epoch = {});

}  // namespace compparse
