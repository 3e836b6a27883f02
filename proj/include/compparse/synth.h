#pragma once

// Synthetic treebanks from a small clause grammar with a fixed head
// direction: every dependent precedes its head (head-final). Mirroring a
// treebank reverses each sentence, which turns it strictly head-initial.

#include <cstdint>

#include "compparse/conllu.h"

namespace compparse {

struct SynthConfig {
  int sentences = 50;
  std::uint64_t seed = 1;
  // Share of sentences in which one word is displaced so that arcs cross.
  double nonprojective = 0.0;
  int max_depth = 2;  // clause/phrase embedding depth
};

Treebank synth_head_final(const SynthConfig& cfg);
Treebank mirror_treebank(const Treebank& tb);

}  // namespace compparse
