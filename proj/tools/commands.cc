#include "commands.h"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "compparse/conllu.h"
#include "compparse/ensemble.h"
#include "compparse/eval.h"
#include "compparse/serialize.h"
#include "compparse/synth.h"
#include "compparse/transition.h"

namespace compparse::cli {

namespace {

Treebank read_treebank(const std::string& path) {
  if (!std::filesystem::exists(path)) throw UsageError("no such file: " + path);
  try {
    return read_conllu_file(path);
  } catch (const ConlluError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

bool parse_switch(const std::string& key, const std::string& v) {
  if (v == "1" || v == "on" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "off" || v == "false" || v == "no") return false;
  throw UsageError(key + ": expected on/off, got '" + v + "'");
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  T out{};
  if (!(in >> out) || !in.eof()) throw UsageError(key + ": not a number: '" + v + "'");
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep))
    if (!part.empty()) out.push_back(part);
  return out;
}

std::string percent(double x) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << 100.0 * x;
  return out.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

}  // namespace

void ModelFlags::resolve(ReprConfig& repr, TrainConfig& train) const {
  std::map<std::string, std::string> kv;
  if (!config_file.empty()) kv = read_key_values(config_file);
  // Flags override the file.
  auto set = [&](const char* key, const auto& flag) {
    if (!flag) return;
    std::ostringstream s;
    if constexpr (std::is_same_v<std::decay_t<decltype(*flag)>, bool>)
      s << (*flag ? "on" : "off");
    else
      s << *flag;
    kv[key] = s.str();
  };
  set("extractor", extractor);
  set("composition", composition);
  set("composition_inputs", composition_inputs);
  set("pos", pos);
  set("char", chr);
  set("word_dim", word_dim);
  set("pos_dim", pos_dim);
  set("char_dim", char_dim);
  set("char_hidden", char_hidden);
  set("seq_hidden", seq_hidden);
  set("relation_dim", relation_dim);
  set("mlp_hidden", mlp_hidden);
  set("epochs", epochs);
  set("seed", seed);
  set("margin", margin);
  set("explore", explore);
  set("word_dropout", word_dropout);
  set("learning_rate", learning_rate);

  for (const auto& [k, v] : kv) {
    try {
      if (k == "extractor") repr.extractor = parse_extractor(v);
      else if (k == "composition") repr.composition = parse_composition(v);
      else if (k == "composition_inputs") repr.composition_inputs = parse_composition_inputs(v);
      else if (k == "pos") repr.use_pos = parse_switch(k, v);
      else if (k == "char") repr.use_char = parse_switch(k, v);
      else if (k == "word_dim") repr.word_dim = parse_number<int>(k, v);
      else if (k == "pos_dim") repr.pos_dim = parse_number<int>(k, v);
      else if (k == "char_dim") repr.char_dim = parse_number<int>(k, v);
      else if (k == "char_hidden") repr.char_hidden = parse_number<int>(k, v);
      else if (k == "seq_hidden") repr.seq_hidden = parse_number<int>(k, v);
      else if (k == "relation_dim") repr.relation_dim = parse_number<int>(k, v);
      else if (k == "mlp_hidden") repr.mlp_hidden = parse_number<int>(k, v);
      else if (k == "epochs") train.epochs = parse_number<int>(k, v);
      else if (k == "seed") train.seed = parse_number<std::uint64_t>(k, v);
      else if (k == "margin") train.margin = parse_number<double>(k, v);
      else if (k == "explore") train.exploration = parse_number<double>(k, v);
      else if (k == "word_dropout") train.word_dropout = parse_number<double>(k, v);
      else if (k == "learning_rate") train.adam.learning_rate = parse_number<double>(k, v);
      else throw UsageError("unknown config key '" + k + "'");
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  for (int d : {repr.word_dim, repr.pos_dim, repr.char_dim, repr.char_hidden, repr.seq_hidden,
                repr.relation_dim, repr.mlp_hidden})
    if (d <= 0) throw UsageError("dimensions must be positive");
  if (auto v = train.violation(); !v.empty()) throw UsageError(v);
}

int cmd_train(const TrainOptions& o) {
  ReprConfig repr;
  TrainConfig tcfg;
  o.flags.resolve(repr, tcfg);
  const auto train_tb = read_treebank(o.train_file);
  if (train_tb.empty()) throw UsageError("training treebank is empty");
  for (const auto& s : train_tb.sentences)
    if (!s.has_heads()) throw UsageError("training treebank lacks gold heads");
  std::optional<Treebank> dev;
  if (!o.dev_file.empty()) dev = read_treebank(o.dev_file);

  ParserModel model(repr, Vocabulary::build(train_tb), tcfg.seed);
  std::ofstream metrics;
  if (!o.metrics_file.empty()) {
    metrics.open(o.metrics_file);
    if (!metrics) throw UsageError("cannot write " + o.metrics_file);
    metrics << "epoch\ttrain_loss\tdev_las\tdev_uas\n";
  }
  train(model, train_tb, dev ? &*dev : nullptr, tcfg, [&](const EpochMetrics& m) {
    std::ostringstream row;
    row << m.epoch << '\t' << std::setprecision(6) << m.train_loss << '\t'
        << (m.dev_las ? percent(*m.dev_las) : "-") << '\t'
        << (m.dev_uas ? percent(*m.dev_uas) : "-") << '\n';
    std::cerr << row.str();
    if (metrics) metrics << row.str() << std::flush;
  });
  save_model(model, o.model_file);
  return 0;
}

int cmd_parse(const ParseOptions& o) {
  if (!std::filesystem::exists(o.model_file)) throw UsageError("no such file: " + o.model_file);
  const auto model = load_model(o.model_file);
  const auto input = read_treebank(o.input_file);
  std::ofstream trace;
  if (!o.trace_file.empty()) {
    trace.open(o.trace_file);
    if (!trace) throw UsageError("cannot write " + o.trace_file);
  }
  Treebank out;
  out.name = input.name;
  for (std::size_t i = 0; i < input.size(); ++i) {
    const auto& s = input.sentences[i];
    std::vector<TraceStep> steps;
    const auto tree = greedy_parse(model, s, trace ? &steps : nullptr);
    for (const auto& st : steps) {
      trace << i + 1 << '\t' << to_string(st.transition.kind);
      if (st.transition.is_arc()) trace << '(' << model.vocab().label_name(st.transition.label) << ')';
      trace << "\tstack=";
      for (int p : st.stack) trace << p << ',';
      trace << "\tbuffer=";
      for (int p : st.buffer) trace << p << ',';
      trace << '\t' << st.score << '\n';
    }
    out.sentences.push_back(annotate(s, tree, model.vocab()));
  }
  const auto text = write_conllu(out);
  if (o.output_file.empty() || o.output_file == "-")
    std::cout << text;
  else
    write_text(o.output_file, text);
  return 0;
}

int cmd_eval(const EvalOptions& o) {
  const auto gold = read_treebank(o.gold_file);
  const auto pred = read_treebank(o.pred_file);
  Score sc;
  try {
    sc = score_trees(gold, pred);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::cout << "tokens\t" << sc.token_count << "\nUAS\t" << percent(sc.uas) << "\nLAS\t"
            << percent(sc.las) << '\n';
  return 0;
}

int cmd_stats(const StatsOptions& o) {
  std::set<std::string> rels = default_content_relations();
  if (!o.content_relations.empty()) {
    const auto parts = split(o.content_relations, ',');
    rels = {parts.begin(), parts.end()};
  }
  std::vector<std::pair<std::string, TreebankStats>> rows;
  for (const auto& path : o.inputs) {
    const auto tb = read_treebank(path);
    try {
      rows.emplace_back(tb.name, treebank_stats(tb, rels));
    } catch (const std::invalid_argument& e) {
      throw UsageError(path + ": " + e.what());
    }
  }
  auto opt = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    std::ostringstream s;
    s << std::fixed << std::setprecision(4) << *v;
    return s.str();
  };
  std::cout << "treebank\tsentences\ttokens\tright_headed\tleft_headed\tavg_dep_len\t"
               "avg_sent_len\tavg_depth\tnonproj_frac\n";
  for (const auto& [name, st] : rows)
    std::cout << std::fixed << std::setprecision(4) << name << '\t' << st.sentence_count << '\t'
              << st.token_count << '\t' << opt(st.right_headedness) << '\t'
              << opt(st.left_headedness) << '\t' << st.avg_dependency_length << '\t'
              << st.avg_sentence_length << '\t' << st.avg_arc_depth << '\t'
              << st.nonprojective_arc_fraction << '\n';
  return 0;
}

int cmd_ensemble(const EnsembleOptions& o) {
  if (o.inputs.empty() == o.models.empty())
    throw UsageError("give either --inputs (predictions) or --models");
  std::vector<std::string> names;
  std::vector<Treebank> predictions;
  if (!o.inputs.empty()) {
    for (const auto& p : o.inputs) {
      predictions.push_back(read_treebank(p));
      names.push_back(std::filesystem::path(p).stem().string());
    }
  } else {
    if (o.input_file.empty()) throw UsageError("--models needs --input");
    const auto input = read_treebank(o.input_file);
    for (const auto& m : o.models) {
      if (!std::filesystem::exists(m)) throw UsageError("no such file: " + m);
      predictions.push_back(parse_treebank(load_model(m), input));
      names.push_back(std::filesystem::path(m).stem().string());
    }
  }
  if (o.ablate_one && predictions.size() < 2)
    throw UsageError("--ablate-one needs at least two ensemble members");
  std::optional<Treebank> gold;
  if (!o.gold_file.empty()) gold = read_treebank(o.gold_file);
  std::vector<EnsembleRow> rows;
  try {
    rows = ensemble_rows(names, predictions, o.ablate_one, gold ? &*gold : nullptr, o.single_root);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::cout << "ensemble\tmembers\tUAS\tLAS\n";
  for (const auto& r : rows) {
    const auto members = r.name == "full" ? predictions.size() : predictions.size() - 1;
    std::cout << r.name << '\t' << members << '\t' << (r.score ? percent(r.score->uas) : "-")
              << '\t' << (r.score ? percent(r.score->las) : "-") << '\n';
  }
  if (!o.output_file.empty()) write_conllu_file(rows.front().output, o.output_file);
  return 0;
}

int cmd_experiment(const ExperimentOptions& o) {
  if (o.treebanks.empty()) throw UsageError("experiment needs at least one --treebank");
  struct Language {
    std::string name;
    Treebank train, dev;
  };
  std::vector<Language> langs;
  for (const auto& t : o.treebanks) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw UsageError("--treebank expects name:train.conllu:dev.conllu");
    langs.push_back({parts[0], read_treebank(parts[1]), read_treebank(parts[2])});
  }
  ReprConfig base;
  TrainConfig tbase;
  o.flags.resolve(base, tbase);

  nlohmann::json rows_json = nlohmann::json::array();
  std::ostringstream rows_tsv;
  rows_tsv << "lang\textractor\tcomposition\tpos\tchar\tseed\tbest_epoch\tdev_las\tdev_uas\n";
  std::map<GridKey, std::pair<double, int>> sums;
  for (const auto& lang : langs) {
    const auto vocab = Vocabulary::build(lang.train);
    for (const auto& pv : o.pos_values)
      for (const auto& cv : o.char_values)
        for (const auto& ev : o.extractors)
          for (const auto& comp : o.compositions)
            for (auto seed : o.seeds) {
              ReprConfig repr = base;
              TrainConfig tcfg = tbase;
              try {
                repr.use_pos = parse_switch("pos", pv);
                repr.use_char = parse_switch("char", cv);
                repr.extractor = parse_extractor(ev);
                repr.composition = parse_composition(comp);
              } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
              }
              tcfg.seed = seed;
              ParserModel model(repr, vocab, seed);
              const auto metrics = train(model, lang.train, &lang.dev, tcfg);
              const EpochMetrics* best = nullptr;
              for (const auto& m : metrics)
                if (!best || *m.dev_las > *best->dev_las) best = &m;
              const double las = best ? *best->dev_las : 0.0;
              const double uas = best ? *best->dev_uas : 0.0;
              rows_tsv << lang.name << '\t' << ev << '\t' << comp << '\t' << pv << '\t' << cv
                       << '\t' << seed << '\t' << (best ? best->epoch : 0) << '\t'
                       << percent(las) << '\t' << percent(uas) << '\n';
              std::cerr << lang.name << ' ' << column_name(repr.extractor, repr.composition)
                        << " pos" << pv << " char" << cv << " seed " << seed << ": LAS "
                        << percent(las) << '\n';
              rows_json.push_back({{"lang", lang.name},
                                   {"extractor", ev},
                                   {"composition", comp},
                                   {"pos", repr.use_pos},
                                   {"char", repr.use_char},
                                   {"seed", seed},
                                   {"best_epoch", best ? best->epoch : 0},
                                   {"dev_las", 100.0 * las},
                                   {"dev_uas", 100.0 * uas}});
              auto& acc = sums[{lang.name, repr.extractor, repr.composition, repr.use_pos,
                                repr.use_char}];
              acc.first += 100.0 * las;
              acc.second += 1;
            }
  }
  std::map<GridKey, double> grid;
  nlohmann::json grid_json = nlohmann::json::array();
  for (const auto& [k, acc] : sums) {
    grid[k] = acc.first / acc.second;
    grid_json.push_back({{"lang", k.language},
                         {"extractor", to_string(k.extractor)},
                         {"composition", to_string(k.composition)},
                         {"pos", k.pos},
                         {"char", k.chr},
                         {"runs", acc.second},
                         {"mean_las", grid[k]}});
  }
  const auto report = grid_report(grid);
  std::cout << report.to_text();
  if (!o.tsv_file.empty()) write_text(o.tsv_file, report.to_tsv());
  if (!o.rows_file.empty()) write_text(o.rows_file, rows_tsv.str());
  if (!o.json_file.empty()) {
    nlohmann::json doc{{"config", base.to_map()}, {"rows", rows_json}, {"grid", grid_json}};
    write_text(o.json_file, doc.dump(2) + "\n");
  }
  return 0;
}

int cmd_oracle(const OracleOptions& o) {
  const auto tb = read_treebank(o.input_file);
  const auto vocab = Vocabulary::build(tb);
  std::size_t reproduced = 0;
  for (std::size_t i = 0; i < tb.size(); ++i) {
    const auto& s = tb.sentences[i];
    if (!s.has_heads()) throw UsageError("sentence " + std::to_string(i + 1) + " lacks heads");
    const StaticDynamicOracle oracle(s.heads(), gold_label_indices(s, vocab));
    Configuration c(static_cast<int>(s.size()));
    std::size_t swaps = 0;
    while (!c.is_terminal()) {
      const auto zero = oracle.verdict(c).zero_cost_set();
      if (zero.empty()) throw std::logic_error("oracle: no zero-cost transition");
      const auto kind = zero.front();
      const int label = oracle.gold_label(c, kind);
      if (o.verbose) {
        std::cout << i + 1 << '\t' << to_string(kind);
        if (label >= 0) std::cout << '(' << vocab.label_name(label) << ')';
        std::cout << '\n';
      }
      if (kind == TransitionKind::Swap) ++swaps;
      c.apply({kind, label});
    }
    const bool ok = std::equal(c.heads().begin() + 1, c.heads().end(),
                               oracle.gold_heads().begin() + 1) &&
                    std::equal(c.labels().begin() + 1, c.labels().end(),
                               oracle.gold_labels().begin() + 1);
    reproduced += ok ? 1 : 0;
    if (o.verbose) std::cout << i + 1 << "\tsteps=" << c.steps() << "\tswaps=" << swaps
                             << (ok ? "\tok" : "\tMISMATCH") << '\n';
  }
  std::cout << "reproduced " << reproduced << " / " << tb.size() << " sentences\n";
  return reproduced == tb.size() ? 0 : 1;
}

int cmd_synth(const SynthOptions& o) {
  SynthConfig cfg;
  cfg.sentences = o.sentences;
  cfg.seed = o.seed;
  cfg.nonprojective = o.nonprojective;
  cfg.max_depth = o.max_depth;
  if (cfg.sentences < 1 || cfg.nonprojective < 0 || cfg.nonprojective > 1)
    throw UsageError("synth: need --sentences >= 1 and --nonprojective in [0, 1]");
  auto tb = synth_head_final(cfg);
  if (o.mirror) tb = mirror_treebank(tb);
  const auto text = write_conllu(tb);
  if (o.output_file.empty() || o.output_file == "-")
    std::cout << text;
  else
    write_text(o.output_file, text);
  return 0;
}

}  // namespace compparse::cli
