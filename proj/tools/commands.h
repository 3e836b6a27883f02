#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "compparse/config.h"
#include "compparse/model.h"

namespace compparse::cli {

// Bad input or usage; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Representation and training flags shared by train and experiment. Unset
// flags fall back to the --config file, then to built-in defaults.
struct ModelFlags {
  std::string config_file;
  std::optional<std::string> extractor, composition, composition_inputs;
  std::optional<bool> pos, chr;
  std::optional<int> word_dim, pos_dim, char_dim, char_hidden, seq_hidden, relation_dim,
      mlp_hidden;
  std::optional<int> epochs;
  std::optional<std::uint64_t> seed;
  std::optional<double> margin, explore, word_dropout, learning_rate;

  void resolve(ReprConfig& repr, TrainConfig& train) const;
};

struct TrainOptions {
  ModelFlags flags;
  std::string train_file, dev_file, model_file, metrics_file;
};

struct ParseOptions {
  std::string model_file, input_file, output_file, trace_file;
};

struct EvalOptions {
  std::string gold_file, pred_file;
};

struct StatsOptions {
  std::vector<std::string> inputs;
  std::string content_relations;
};

struct EnsembleOptions {
  std::vector<std::string> inputs;  // predicted CoNLL-U files
  std::vector<std::string> models;  // or model files run on --input
  std::string input_file, gold_file, output_file;
  bool ablate_one = false;
  bool single_root = false;
};

struct ExperimentOptions {
  ModelFlags flags;
  std::vector<std::string> treebanks;  // name:train:dev
  std::vector<std::uint64_t> seeds{1};
  std::vector<std::string> compositions{"none", "lc"};
  std::vector<std::string> extractors{"bi", "bw", "fw"};
  std::vector<std::string> pos_values{"on", "off"};
  std::vector<std::string> char_values{"on", "off"};
  std::string json_file, tsv_file, rows_file;
};

struct OracleOptions {
  std::string input_file;
  bool verbose = false;
};

struct SynthOptions {
  int sentences = 50;
  std::uint64_t seed = 1;
  double nonprojective = 0.0;
  int max_depth = 2;
  bool mirror = false;
  std::string output_file;
};

int cmd_train(const TrainOptions& o);
int cmd_parse(const ParseOptions& o);
int cmd_eval(const EvalOptions& o);
int cmd_stats(const StatsOptions& o);
int cmd_ensemble(const EnsembleOptions& o);
int cmd_experiment(const ExperimentOptions& o);
int cmd_oracle(const OracleOptions& o);
int cmd_synth(const SynthOptions& o);

}  // namespace compparse::cli
