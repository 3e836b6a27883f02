// compparse: train, run and evaluate the transition parser from the shell.
//
// Exit codes: 0 success, 1 internal error, 2 usage or input error.

#include <iostream>

#include <CLI11.hpp>

#include "commands.h"
#include "compparse/conllu.h"

using namespace compparse::cli;

namespace {

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--config", f.config_file, "key=value file; flags take precedence");
  cmd->add_option("--extractor", f.extractor, "feature function: bi|bw|fw");
  cmd->add_option("--composition", f.composition, "subtree composition: none|rc|lc");
  cmd->add_option("--composition-inputs", f.composition_inputs,
                  "composition inputs: subtree|token");
  cmd->add_flag("--pos,!--no-pos", f.pos, "use POS embeddings");
  cmd->add_flag("--char,!--no-char", f.chr, "use character encoder");
  cmd->add_option("--word-dim", f.word_dim);
  cmd->add_option("--pos-dim", f.pos_dim);
  cmd->add_option("--char-dim", f.char_dim);
  cmd->add_option("--char-hidden", f.char_hidden);
  cmd->add_option("--seq-hidden", f.seq_hidden);
  cmd->add_option("--rel-dim", f.relation_dim);
  cmd->add_option("--mlp-hidden", f.mlp_hidden);
  cmd->add_option("--epochs", f.epochs);
  cmd->add_option("--seed", f.seed);
  cmd->add_option("--margin", f.margin);
  cmd->add_option("--explore", f.explore, "error exploration probability");
  cmd->add_option("--word-dropout", f.word_dropout, "alpha of frequency-based word dropout");
  cmd->add_option("--learning-rate", f.learning_rate);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transition-based dependency parser with subtree composition"};
  app.require_subcommand(1);

  TrainOptions train;
  auto* c_train = app.add_subcommand("train", "train a model");
  add_model_flags(c_train, train.flags);
  c_train->add_option("--train", train.train_file)->required();
  c_train->add_option("--dev", train.dev_file, "held-out set for model selection");
  c_train->add_option("--model", train.model_file, "output model file")->required();
  c_train->add_option("--metrics", train.metrics_file, "per-epoch TSV");

  ParseOptions parse;
  auto* c_parse = app.add_subcommand("parse", "parse CoNLL-U input");
  c_parse->add_option("--model", parse.model_file)->required();
  c_parse->add_option("--input", parse.input_file)->required();
  c_parse->add_option("--output", parse.output_file, "default: stdout");
  c_parse->add_option("--trace", parse.trace_file, "write the transition sequence");

  EvalOptions eval;
  auto* c_eval = app.add_subcommand("eval", "LAS/UAS of predictions");
  c_eval->add_option("--gold", eval.gold_file)->required();
  c_eval->add_option("--pred", eval.pred_file)->required();

  StatsOptions stats;
  auto* c_stats = app.add_subcommand("stats", "treebank statistics");
  c_stats->add_option("inputs", stats.inputs)->required();
  c_stats->add_option("--content-relations", stats.content_relations,
                      "comma-separated relation list");

  EnsembleOptions ens;
  auto* c_ens = app.add_subcommand("ensemble", "arc-voting reparsing ensemble");
  c_ens->add_option("--inputs", ens.inputs, "predicted CoNLL-U files");
  c_ens->add_option("--models", ens.models, "model files to run on --input");
  c_ens->add_option("--input", ens.input_file);
  c_ens->add_option("--gold", ens.gold_file);
  c_ens->add_option("--output", ens.output_file, "full ensemble output");
  c_ens->add_flag("--ablate-one", ens.ablate_one, "also leave out each member in turn");
  c_ens->add_flag("--single-root", ens.single_root, "allow one root dependent only");

  ExperimentOptions exp;
  auto* c_exp = app.add_subcommand("experiment", "run the ablation grid");
  add_model_flags(c_exp, exp.flags);
  c_exp->add_option("--treebank", exp.treebanks, "name:train.conllu:dev.conllu")->required();
  c_exp->add_option("--seeds", exp.seeds)->delimiter(',');
  c_exp->add_option("--compositions", exp.compositions)->delimiter(',');
  c_exp->add_option("--extractors", exp.extractors)->delimiter(',');
  c_exp->add_option("--pos-values", exp.pos_values, "on,off")->delimiter(',');
  c_exp->add_option("--char-values", exp.char_values, "on,off")->delimiter(',');
  c_exp->add_option("--json", exp.json_file);
  c_exp->add_option("--tsv", exp.tsv_file, "aggregated report");
  c_exp->add_option("--rows", exp.rows_file, "one row per cell and seed");

  OracleOptions oracle;
  auto* c_oracle = app.add_subcommand("oracle", "replay the oracle on gold trees");
  c_oracle->add_option("--input", oracle.input_file)->required();
  c_oracle->add_flag("--verbose", oracle.verbose);

  SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic head-final treebank");
  c_synth->add_option("--sentences", synth.sentences);
  c_synth->add_option("--seed", synth.seed);
  c_synth->add_option("--nonprojective", synth.nonprojective);
  c_synth->add_option("--max-depth", synth.max_depth);
  c_synth->add_flag("--mirror", synth.mirror, "emit the head-initial mirror image");
  c_synth->add_option("--output", synth.output_file);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_train) return cmd_train(train);
    if (*c_parse) return cmd_parse(parse);
    if (*c_eval) return cmd_eval(eval);
    if (*c_stats) return cmd_stats(stats);
    if (*c_ens) return cmd_ensemble(ens);
    if (*c_exp) return cmd_experiment(exp);
    if (*c_oracle) return cmd_oracle(oracle);
    if (*c_synth) return cmd_synth(synth);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const compparse::ConlluError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
