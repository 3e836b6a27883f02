#include "compparse/ensemble.h"

#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>

namespace compparse {

ArcVoteMatrix collect_votes(const std::vector<std::vector<int>>& trees) {
  if (trees.empty()) throw std::invalid_argument("collect_votes: no trees");
  ArcVoteMatrix m;
  m.n = static_cast<int>(trees.front().size()) - 1;
  m.votes.assign(m.n + 1, std::vector<int>(m.n + 1, 0));
  for (const auto& t : trees) {
    if (static_cast<int>(t.size()) != m.n + 1)
      throw std::invalid_argument("collect_votes: trees have different lengths");
    for (int d = 1; d <= m.n; ++d) {
      if (t[d] < 0 || t[d] > m.n || t[d] == d)
        throw std::invalid_argument("collect_votes: invalid head");
      ++m.votes[t[d]][d];
    }
  }
  return m;
}

long tree_weight(const ArcVoteMatrix& weights, const std::vector<int>& heads) {
  long w = 0;
  for (int d = 1; d <= weights.n; ++d) w += weights.at(heads[d], d);
  return w;
}

namespace {

using Score64 = std::int64_t;
constexpr Score64 kNone = std::numeric_limits<Score64>::min() / 4;

// Edmonds' algorithm on a dense score matrix s[h][d]; node 0 is the root.
std::vector<int> edmonds(const std::vector<std::vector<Score64>>& s) {
  const int size = static_cast<int>(s.size());
  std::vector<int> head(size, -1);
  for (int d = 1; d < size; ++d) {
    for (int h = 0; h < size; ++h) {
      if (h == d || s[h][d] == kNone) continue;
      if (head[d] < 0 || s[h][d] > s[head[d]][d]) head[d] = h;
    }
  }
  // Find a cycle among the greedy choices.
  std::vector<int> color(size, 0);  // 0 new, 1 on path, 2 done
  color[0] = 2;
  std::vector<int> cycle;
  for (int start = 1; start < size && cycle.empty(); ++start) {
    std::vector<int> path;
    int x = start;
    while (color[x] == 0) {
      color[x] = 1;
      path.push_back(x);
      x = head[x];
    }
    if (color[x] == 1) {
      for (int y = x;;) {
        cycle.push_back(y);
        y = head[y];
        if (y == x) break;
      }
    }
    for (int p : path) color[p] = 2;
  }
  if (cycle.empty()) return head;

  std::vector<bool> in_cycle(size, false);
  for (int c : cycle) in_cycle[c] = true;
  std::vector<int> to_new(size, -1), to_old;
  for (int v = 0; v < size; ++v) {
    if (in_cycle[v]) continue;
    to_new[v] = static_cast<int>(to_old.size());
    to_old.push_back(v);
  }
  const int c = static_cast<int>(to_old.size());
  std::vector<std::vector<Score64>> t(c + 1, std::vector<Score64>(c + 1, kNone));
  std::vector<int> enter(size, -1), leave(size, -1);
  for (int u = 0; u < size; ++u) {
    if (in_cycle[u]) continue;
    for (int v = 1; v < size; ++v) {
      if (in_cycle[v] || u == v) continue;
      t[to_new[u]][to_new[v]] = s[u][v];
    }
    for (int v : cycle) {
      if (s[u][v] == kNone) continue;
      const Score64 gain = s[u][v] - s[head[v]][v];
      if (enter[u] < 0 || gain > t[to_new[u]][c]) {
        t[to_new[u]][c] = gain;
        enter[u] = v;
      }
    }
  }
  for (int v = 1; v < size; ++v) {
    if (in_cycle[v]) continue;
    for (int u : cycle) {
      if (s[u][v] == kNone) continue;
      if (leave[v] < 0 || s[u][v] > t[c][to_new[v]]) {
        t[c][to_new[v]] = s[u][v];
        leave[v] = u;
      }
    }
  }
  const auto sub = edmonds(t);
  std::vector<int> out = head;  // cycle nodes keep their greedy heads
  for (int v = 1; v < size; ++v) {
    if (in_cycle[v]) continue;
    const int h = sub[to_new[v]];
    out[v] = h == c ? leave[v] : to_old[h];
  }
  const int u = to_old[sub[c]];
  out[enter[u]] = u;
  return out;
}

}  // namespace

std::vector<int> cle_mst(const ArcVoteMatrix& weights, bool single_root) {
  const int n = weights.n;
  if (n < 1) throw std::invalid_argument("cle_mst: empty sentence");
  // Composite integer scores: votes dominate, then the tie-break penalties,
  // whose total over any tree stays below one vote.
  const Score64 size = n + 1;
  // Per-arc penalty h * size + |h - d| < size^2, so a tree's total is < size^3.
  const Score64 vote_scale = size * size * size + 1;
  Score64 max_votes = 0;
  for (const auto& row : weights.votes)
    for (int v : row) max_votes = std::max<Score64>(max_votes, v);
  const Score64 root_penalty = single_root ? (max_votes * n + 1) * vote_scale : 0;

  std::vector<std::vector<Score64>> s(n + 1, std::vector<Score64>(n + 1, kNone));
  for (int h = 0; h <= n; ++h) {
    for (int d = 1; d <= n; ++d) {
      if (h == d) continue;
      s[h][d] = weights.at(h, d) * vote_scale - (h * size + std::abs(h - d));
      if (h == 0) s[h][d] -= root_penalty;
    }
  }
  auto heads = edmonds(s);
  heads[0] = -1;
  return heads;
}

Sentence ensemble_sentence(const std::vector<const Sentence*>& predictions, bool single_root) {
  if (predictions.empty()) throw std::invalid_argument("ensemble: no predictions");
  std::vector<std::vector<int>> trees;
  for (const auto* p : predictions) {
    if (p->size() != predictions.front()->size())
      throw std::invalid_argument("ensemble: predictions differ in length");
    if (!p->has_heads()) throw std::invalid_argument("ensemble: prediction without heads");
    trees.push_back(p->heads());
  }
  const auto heads = cle_mst(collect_votes(trees), single_root);
  Sentence out = *predictions.front();
  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    const int d = static_cast<int>(i) + 1;
    std::map<std::string, int> tally, fallback;
    for (const auto* p : predictions) {
      const auto label = p->tokens[i].deprel.value_or("_");
      ++fallback[label];
      if (*p->tokens[i].head == heads[d]) ++tally[label];
    }
    // An arc nobody predicted keeps the dependent's overall majority label.
    const auto& pool = tally.empty() ? fallback : tally;
    const std::string* best = nullptr;
    int best_count = 0;
    for (const auto& [label, count] : pool) {  // map order: lexicographic
      if (count > best_count) {
        best = &label;
        best_count = count;
      }
    }
    out.tokens[i].head = heads[d];
    out.tokens[i].deprel = *best;
  }
  return out;
}

Treebank ensemble_treebanks(const std::vector<const Treebank*>& predictions, bool single_root) {
  if (predictions.empty()) throw std::invalid_argument("ensemble: no predictions");
  Treebank out;
  out.name = predictions.front()->name;
  const auto count = predictions.front()->size();
  for (const auto* p : predictions)
    if (p->size() != count) throw std::invalid_argument("ensemble: treebanks differ in size");
  for (std::size_t s = 0; s < count; ++s) {
    std::vector<const Sentence*> preds;
    for (const auto* p : predictions) preds.push_back(&p->sentences[s]);
    out.sentences.push_back(ensemble_sentence(preds, single_root));
  }
  return out;
}

Sentence ensemble_parse(const Sentence& sentence, const std::vector<const ParserModel*>& models,
                        bool single_root) {
  if (models.empty()) throw std::invalid_argument("ensemble_parse: no models");
  std::vector<Sentence> parsed;
  for (const auto* m : models)
    parsed.push_back(annotate(sentence, greedy_parse(*m, sentence), m->vocab()));
  std::vector<const Sentence*> ptrs;
  for (const auto& p : parsed) ptrs.push_back(&p);
  return ensemble_sentence(ptrs, single_root);
}

std::vector<EnsembleRow> ensemble_rows(const std::vector<std::string>& names,
                                       const std::vector<Treebank>& predictions, bool ablate_one,
                                       const Treebank* gold, bool single_root) {
  if (names.size() != predictions.size())
    throw std::invalid_argument("ensemble: names and predictions differ in count");
  if (ablate_one && predictions.size() < 2)
    throw std::invalid_argument("ensemble: ablate-one needs at least two members");
  auto make_row = [&](std::string name, std::size_t skip) {
    std::vector<const Treebank*> members;
    for (std::size_t i = 0; i < predictions.size(); ++i)
      if (i != skip) members.push_back(&predictions[i]);
    EnsembleRow row{std::move(name), ensemble_treebanks(members, single_root), std::nullopt};
    if (gold) row.score = score_trees(*gold, row.output);
    return row;
  };
  std::vector<EnsembleRow> rows;
  rows.push_back(make_row("full", predictions.size()));
  if (ablate_one)
    for (std::size_t i = 0; i < predictions.size(); ++i) rows.push_back(make_row("-" + names[i], i));
  return rows;
}

}  // namespace compparse
