#pragma once

// Reparsing ensemble: parsers vote on arcs, Chu-Liu-Edmonds extracts the
// maximum spanning arborescence rooted at 0.

#include <optional>
#include <string>
#include <vector>

#include "compparse/conllu.h"
#include "compparse/eval.h"
#include "compparse/model.h"

namespace compparse {

struct ArcVoteMatrix {
  int n = 0;
  // votes[h][d] for h in 0..n, d in 0..n; row/column layout (n+1) x (n+1).
  std::vector<std::vector<int>> votes;

  int at(int head, int dep) const { return votes[head][dep]; }
};

// Each tree is a head array with index 0 unused.
ArcVoteMatrix collect_votes(const std::vector<std::vector<int>>& trees);

// Maximum-vote arborescence. Ties go to lower head indices, then shorter arcs.
// With single_root, node 0 gets exactly one dependent.
std::vector<int> cle_mst(const ArcVoteMatrix& weights, bool single_root = false);

// Total votes of the arcs in heads.
long tree_weight(const ArcVoteMatrix& weights, const std::vector<int>& heads);

// Combines several predicted analyses of one sentence. Each arc of the result
// takes the majority label among the parsers that predicted it (ties broken
// lexicographically).
Sentence ensemble_sentence(const std::vector<const Sentence*>& predictions,
                           bool single_root = false);
Treebank ensemble_treebanks(const std::vector<const Treebank*>& predictions,
                            bool single_root = false);

Sentence ensemble_parse(const Sentence& sentence, const std::vector<const ParserModel*>& models,
                        bool single_root = false);

struct EnsembleRow {
  std::string name;  // "full" or "-<member>"
  Treebank output;
  std::optional<Score> score;
};

// The full ensemble, followed by one ensemble per left-out member when
// ablate_one is set (requires at least two members).
std::vector<EnsembleRow> ensemble_rows(const std::vector<std::string>& names,
                                       const std::vector<Treebank>& predictions, bool ablate_one,
                                       const Treebank* gold = nullptr, bool single_root = false);

}  // namespace compparse
