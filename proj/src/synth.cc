#include "compparse/synth.h"

#include <algorithm>
#include <array>
#include <random>
#include <string>

namespace compparse {

namespace {

struct Node {
  std::string form, upos, deprel;
  std::vector<Node> deps;  // in surface order, all before the head
};

class Grammar {
 public:
  explicit Grammar(std::mt19937_64& rng) : rng_(rng) {}

  Node clause(int depth) {
    Node v{pick(kVerbs), "VERB", "", {}};
    if (chance(0.9)) v.deps.push_back(np(depth, "nsubj"));
    if (depth > 0 && chance(0.25)) {
      Node c = clause(depth - 1);
      c.deprel = "ccomp";
      v.deps.push_back(std::move(c));
    }
    if (chance(0.4)) v.deps.push_back(np(depth, "obl", true));
    if (chance(0.6)) v.deps.push_back(np(depth, "obj"));
    if (chance(0.3)) v.deps.push_back({pick(kAdverbs), "ADV", "advmod", {}});
    if (chance(0.3)) v.deps.push_back({pick(kAux), "AUX", "aux", {}});
    return v;
  }

 private:
  Node np(int depth, const char* rel, bool with_case = false) {
    Node n{pick(kNouns), "NOUN", rel, {}};
    if (depth > 0 && chance(0.15)) n.deps.push_back(np(depth - 1, "nmod", true));
    if (chance(0.35)) n.deps.push_back({pick(kAdjectives), "ADJ", "amod", {}});
    if (chance(0.5)) n.deps.push_back({pick(kDeterminers), "DET", "det", {}});
    if (with_case) n.deps.push_back({pick(kCases), "ADP", "case", {}});
    return n;
  }

  template <std::size_t N>
  std::string pick(const std::array<const char*, N>& words) {
    std::uniform_int_distribution<std::size_t> d(0, N - 1);
    return words[d(rng_)];
  }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }

  static constexpr std::array<const char*, 12> kVerbs = {
      "miri", "katoni", "sulvi", "pendi", "rawi", "tolmi",
      "zekari", "bunni", "ladesi", "vorri", "nimi", "gaspi"};
  static constexpr std::array<const char*, 16> kNouns = {
      "kala", "meta", "surra", "pona", "dika", "lumma", "rasa", "venta",
      "hoba", "ziska", "tarra", "mola", "firna", "goza", "peska", "nurra"};
  static constexpr std::array<const char*, 8> kAdjectives = {
      "rune", "bale", "site", "kove", "murne", "dase", "lipe", "tasse"};
  static constexpr std::array<const char*, 4> kDeterminers = {"ta", "su", "ne", "ko"};
  static constexpr std::array<const char*, 5> kAdverbs = {"hulo", "remo", "sapo", "kilo", "vado"};
  static constexpr std::array<const char*, 3> kCases = {"ek", "ul", "im"};
  static constexpr std::array<const char*, 2> kAux = {"ab", "og"};

  std::mt19937_64& rng_;
};

// Head-final linearisation: each dependent's subtree, then the head.
// Returns the 0-based slot of the head word; heads[slot] = -1 until attached.
int linearise(const Node& n, std::vector<Token>& out, std::vector<int>& heads) {
  std::vector<int> dep_slots;
  for (const auto& d : n.deps) dep_slots.push_back(linearise(d, out, heads));
  Token head;
  head.form = n.form;
  head.upos = n.upos;
  head.deprel = n.deprel.empty() ? "root" : n.deprel;
  out.push_back(std::move(head));
  heads.push_back(-1);
  const int pos = static_cast<int>(out.size()) - 1;
  for (int d : dep_slots) heads[d] = pos;
  return pos;
}

Sentence make_sentence(const Node& root) {
  std::vector<Token> toks;
  std::vector<int> heads;  // 0-based slot of the head, -1 for root
  linearise(root, toks, heads);
  Sentence s;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    auto& t = toks[i];
    t.id = static_cast<int>(i) + 1;
    t.head = heads[i] < 0 ? 0 : heads[i] + 1;
    t.chars = decode_utf8(t.form);
    s.tokens.push_back(std::move(t));
  }
  return s;
}

// Reorders tokens: new position i holds old token order[i] (both 0-based).
Sentence permute(const Sentence& s, const std::vector<int>& order) {
  std::vector<int> new_pos(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) new_pos[order[i]] = static_cast<int>(i);
  Sentence out;
  out.comments = s.comments;
  for (std::size_t i = 0; i < order.size(); ++i) {
    Token t = s.tokens[order[i]];
    t.id = static_cast<int>(i) + 1;
    if (*t.head != 0) t.head = new_pos[*t.head - 1] + 1;
    out.tokens.push_back(std::move(t));
  }
  return out;
}

bool has_crossing(const Sentence& s) {
  const auto c = crossed_arcs(s.heads());
  return std::find(c.begin() + 1, c.end(), true) != c.end();
}

// Moves one leaf to another slot so that at least one arc crosses.
bool displace(Sentence& s, std::mt19937_64& rng) {
  const int n = static_cast<int>(s.size());
  if (n < 4) return false;
  std::vector<int> has_dep(n + 1, 0);
  for (const auto& t : s.tokens) has_dep[*t.head] = 1;
  std::uniform_int_distribution<int> any(0, n - 1);
  for (int attempt = 0; attempt < 30; ++attempt) {
    const int from = any(rng), to = any(rng);
    if (from == to || has_dep[from + 1] || *s.tokens[from].head == 0) continue;
    std::vector<int> order;
    for (int i = 0; i < n; ++i)
      if (i != from) order.push_back(i);
    order.insert(order.begin() + to, from);
    Sentence moved = permute(s, order);
    if (has_crossing(moved)) {
      s = std::move(moved);
      return true;
    }
  }
  return false;
}

}  // namespace

Treebank synth_head_final(const SynthConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  Grammar grammar(rng);
  std::uniform_real_distribution<double> coin(0, 1);
  Treebank tb;
  tb.name = "synth-head-final";
  for (int i = 0; i < cfg.sentences; ++i) {
    Sentence s = make_sentence(grammar.clause(cfg.max_depth));
    s.comments.push_back("# sent_id = " + std::to_string(i + 1));
    if (coin(rng) < cfg.nonprojective) displace(s, rng);
    tb.sentences.push_back(std::move(s));
  }
  return tb;
}

Treebank mirror_treebank(const Treebank& tb) {
  Treebank out;
  out.name = tb.name + "-mirrored";
  for (const auto& s : tb.sentences) {
    std::vector<int> order(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) order[i] = static_cast<int>(s.size() - 1 - i);
    out.sentences.push_back(permute(s, order));
  }
  return out;
}

}  // namespace compparse
